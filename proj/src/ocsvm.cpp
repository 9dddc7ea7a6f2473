#include "rom/ocsvm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "json.hpp"
#include "rom/errors.hpp"
#include "rom/version.hpp"

namespace rom {

namespace {

constexpr double kEtaFloor = 1e-12;
// Incremental gradient updates accumulate rounding; rebuild from scratch
// periodically and always before declaring convergence.
constexpr std::uint64_t kRefreshInterval = 131072;

// LRU cache of kernel matrix rows. References returned by row() stay valid
// until at least one more insertion after the next call.
class KernelCache {
 public:
  KernelCache(const Eigen::MatrixXd& X, double sigma, std::size_t budget_bytes)
      : X_(X), inv_two_sigma2_(1.0 / (2.0 * sigma * sigma)) {
    const std::size_t row_bytes = sizeof(double) * static_cast<std::size_t>(X.rows());
    capacity_ = std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(row_bytes, 1));
  }

  const Eigen::VectorXd& row(int i) {
    const auto it = map_.find(i);
    if (it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    if (map_.size() >= capacity_) {
      map_.erase(lru_.back());
      lru_.pop_back();
    }
    lru_.push_front(i);
    const auto ins = map_.emplace(i, std::make_pair(compute(i), lru_.begin()));
    return ins.first->second.first;
  }

  // Differences are formed explicitly instead of expanding the square, so a
  // constant shift of the data cannot change the result.
  Eigen::VectorXd compute(int i) const {
    const Eigen::VectorXd xi = X_.row(i);
    const Eigen::VectorXd d = (X_.rowwise() - xi.transpose()).rowwise().squaredNorm();
    return (-d.array() * inv_two_sigma2_).exp();
  }

 private:
  const Eigen::MatrixXd& X_;
  double inv_two_sigma2_;
  std::size_t capacity_;
  std::list<int> lru_;
  std::unordered_map<int, std::pair<Eigen::VectorXd, std::list<int>::iterator>> map_;
};

}  // namespace

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma) {
  if (a.size() != b.size()) throw std::invalid_argument("kernel arguments differ in dimension");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
}

std::string region_name(Region r) {
  switch (r) {
    case Region::inside: return "inside";
    case Region::boundary: return "boundary";
    case Region::outside: return "outside";
  }
  return "?";
}

TrainResult train_ocsvm(const Eigen::MatrixXd& samples, const TrainConfig& config) {
  const int m = static_cast<int>(samples.rows());
  if (m < 1) throw SchemaError("training needs at least one sample");
  if (!samples.allFinite()) throw SchemaError("training samples contain non-finite values");
  if (!(config.nu > 0.0 && config.nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
  if (!(config.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
  bool all_identical = true;
  for (int i = 1; i < m && all_identical; ++i) {
    all_identical = (samples.row(i).array() == samples.row(0).array()).all();
  }
  if (all_identical) throw SchemaError("training samples are all identical; the boundary is undefined");

  const double C = 1.0 / (config.nu * m);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  const int n_full = std::min(m, static_cast<int>(std::floor(config.nu * m)));
  for (int i = 0; i < n_full; ++i) alpha[i] = C;
  if (n_full < m) alpha[n_full] = 1.0 - n_full * C;

  KernelCache cache(samples, config.sigma, config.cache_bytes);

  // g = K alpha, the objective gradient.
  auto fresh_gradient = [&] {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
      if (alpha[j] > 0.0) g += alpha[j] * cache.compute(j);
    }
    return g;
  };
  Eigen::VectorXd g = fresh_gradient();

  auto select_pair = [&](int& i_up, int& j_dn) {
    i_up = -1;
    j_dn = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < m; ++t) {
      if (alpha[t] < C && g[t] < g_min) {
        g_min = g[t];
        i_up = t;
      }
      if (alpha[t] > 0.0 && g[t] > g_max) {
        g_max = g[t];
        j_dn = t;
      }
    }
    return (i_up >= 0 && j_dn >= 0) ? g_max - g_min : 0.0;
  };

  std::uint64_t iter = 0;
  double violation = 0.0;
  while (true) {
    int i_up = -1;
    int j_dn = -1;
    violation = select_pair(i_up, j_dn);
    if (violation <= config.tolerance) {
      g = fresh_gradient();
      violation = select_pair(i_up, j_dn);
      if (violation <= config.tolerance) break;
    }
    if (iter >= config.max_iterations) {
      throw ConvergenceError("boundary training stalled at pair violation " +
                                 std::to_string(violation) + " after " + std::to_string(iter) +
                                 " iterations (tolerance " + std::to_string(config.tolerance) + ")",
                             violation, iter);
    }

    const Eigen::VectorXd& Ki = cache.row(i_up);
    const Eigen::VectorXd& Kj = cache.row(j_dn);
    double eta = Ki[i_up] + Kj[j_dn] - 2.0 * Ki[j_dn];
    if (eta < kEtaFloor) eta = kEtaFloor;
    double delta = violation / eta;
    const double room_i = C - alpha[i_up];
    const double room_j = alpha[j_dn];
    // Clip to the box and land on the bound exactly so that later bound
    // comparisons are exact.
    if (delta >= room_i && room_i <= room_j) {
      delta = room_i;
      alpha[i_up] = C;
      alpha[j_dn] = room_j - room_i;
    } else if (delta >= room_j) {
      delta = room_j;
      alpha[j_dn] = 0.0;
      alpha[i_up] += delta;
    } else {
      alpha[i_up] += delta;
      alpha[j_dn] -= delta;
    }
    g += delta * (Ki - Kj);
    ++iter;
    if (iter % kRefreshInterval == 0) g = fresh_gradient();
  }

  double free_sum = 0.0;
  int free_count = 0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<int> sv_indices;
  for (int t = 0; t < m; ++t) {
    if (alpha[t] > 0.0) sv_indices.push_back(t);
    if (alpha[t] > 0.0 && alpha[t] < C) {
      free_sum += g[t];
      ++free_count;
    } else if (alpha[t] >= C) {
      lo = std::max(lo, g[t]);
    } else if (alpha[t] == 0.0) {
      hi = std::min(hi, g[t]);
    }
  }
  double rho = 0.0;
  if (free_count > 0) {
    rho = free_sum / free_count;
  } else if (std::isfinite(lo) && std::isfinite(hi)) {
    rho = 0.5 * (lo + hi);
  } else if (std::isfinite(lo)) {
    rho = lo;
  } else {
    rho = hi;
  }

  OcsvmModel model;
  model.sigma = config.sigma;
  model.nu = config.nu;
  model.rho = rho;
  model.training_count = m;
  model.sv_fraction = static_cast<double>(sv_indices.size()) / m;
  model.support_vectors.resize(static_cast<Eigen::Index>(sv_indices.size()), samples.cols());
  model.alphas.resize(static_cast<Eigen::Index>(sv_indices.size()));
  for (std::size_t k = 0; k < sv_indices.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = samples.row(sv_indices[k]);
    model.alphas[static_cast<Eigen::Index>(k)] = alpha[sv_indices[k]];
  }

  TrainDiagnostics diag;
  diag.iterations = iter;
  diag.kkt_violation = violation;
  diag.sv_indices = std::move(sv_indices);
  return {std::move(model), std::move(diag)};
}

double OcsvmModel::gamma(const Eigen::VectorXd& q) const {
  if (q.size() != support_vectors.cols()) {
    throw std::invalid_argument("query has dimension " + std::to_string(q.size()) + ", model expects " +
                                std::to_string(support_vectors.cols()));
  }
  const Eigen::VectorXd d = (support_vectors.rowwise() - q.transpose()).rowwise().squaredNorm();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  return (alphas.array() * (-d.array() * inv).exp()).sum() - rho;
}

Eigen::VectorXd OcsvmModel::gamma_rows(const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = gamma(Eigen::VectorXd(points.row(i).transpose()));
  return out;
}

Eigen::VectorXd OcsvmModel::gamma_gradient(const Eigen::VectorXd& q) const {
  if (q.size() != support_vectors.cols()) {
    throw std::invalid_argument("query has dimension " + std::to_string(q.size()) + ", model expects " +
                                std::to_string(support_vectors.cols()));
  }
  const Eigen::MatrixXd diff = support_vectors.rowwise() - q.transpose();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const Eigen::ArrayXd k = (-diff.rowwise().squaredNorm().array() * inv).exp();
  return diff.transpose() * (alphas.array() * k).matrix() * (2.0 * inv);
}

Region OcsvmModel::classify(const Eigen::VectorXd& q, double band) const {
  if (band < 0.0) throw std::invalid_argument("classification band must be nonnegative");
  const double g = gamma(q);
  if (g > band) return Region::inside;
  if (g < -band) return Region::outside;
  return Region::boundary;
}

void OcsvmModel::validate() const {
  if (support_vectors.rows() == 0) throw SchemaError("model has no support vectors");
  if (alphas.size() != support_vectors.rows()) {
    throw SchemaError("model has " + std::to_string(support_vectors.rows()) + " support vectors but " +
                      std::to_string(alphas.size()) + " weights");
  }
  if (!(sigma > 0.0)) throw SchemaError("model sigma must be positive");
  if (!support_vectors.allFinite() || !alphas.allFinite() || !std::isfinite(rho)) {
    throw SchemaError("model contains non-finite values");
  }
  if (alphas.minCoeff() < 0.0) throw SchemaError("model weights must be nonnegative");
  if (std::abs(alphas.sum() - 1.0) > 1e-8) {
    throw SchemaError("model weights must sum to 1");
  }
  if (!dofs.empty() && dofs.size() != static_cast<std::size_t>(support_vectors.cols())) {
    throw SchemaError("model dof names do not match its dimension");
  }
}

std::string OcsvmModel::to_json() const {
  validate();
  nlohmann::json j;
  j["version"] = kVersion;
  j["dimension"] = dimension();
  j["sigma"] = sigma;
  j["nu"] = nu;
  j["rho"] = rho;
  nlohmann::json svs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < support_vectors.cols(); ++c) row.push_back(support_vectors(i, c));
    svs.push_back(std::move(row));
  }
  j["support_vectors"] = std::move(svs);
  j["alphas"] = std::vector<double>(alphas.data(), alphas.data() + alphas.size());
  j["training"] = {{"m", training_count}, {"sv_fraction", sv_fraction}};
  if (!dofs.empty()) j["dofs"] = dofs;
  return j.dump(2);
}

OcsvmModel OcsvmModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model JSON: ") + e.what());
  }
  OcsvmModel m;
  try {
    const auto version = j.at("version").get<std::string>();
    if (version != kVersion) {
      throw SchemaError("model was written by version " + version + "; this build reads " + kVersion);
    }
    const int dim = j.at("dimension").get<int>();
    m.sigma = j.at("sigma").get<double>();
    m.nu = j.at("nu").get<double>();
    m.rho = j.at("rho").get<double>();
    const auto& svs = j.at("support_vectors");
    if (!svs.is_array() || svs.empty()) throw SchemaError("model JSON: support_vectors must be a nonempty array");
    m.support_vectors.resize(static_cast<Eigen::Index>(svs.size()), dim);
    for (std::size_t i = 0; i < svs.size(); ++i) {
      const auto& row = svs[i];
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        throw SchemaError("model JSON: support vector " + std::to_string(i) + " has wrong dimension");
      }
      for (int c = 0; c < dim; ++c) m.support_vectors(static_cast<Eigen::Index>(i), c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    const auto a = j.at("alphas").get<std::vector<double>>();
    m.alphas = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
    const auto& tr = j.at("training");
    m.training_count = tr.at("m").get<int>();
    m.sv_fraction = tr.at("sv_fraction").get<double>();
    if (j.contains("dofs")) m.dofs = j.at("dofs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("model JSON: ") + e.what());
  }
  m.validate();
  return m;
}

void OcsvmModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open for writing: " + path);
  out << to_json() << '\n';
  if (!out) throw SchemaError("failed to write " + path);
}

OcsvmModel OcsvmModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace rom
