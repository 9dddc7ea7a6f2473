#include "rom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rom/errors.hpp"
#include "rom/kinematics.hpp"

namespace rom {

namespace {

struct Window {
  double lo_x, hi_x, lo_y, hi_y;
};

Window sv_window(const OcsvmModel& model, double padding_deg) {
  const auto& sv = model.support_vectors;
  return {sv.col(0).minCoeff() - padding_deg, sv.col(0).maxCoeff() + padding_deg,
          sv.col(1).minCoeff() - padding_deg, sv.col(1).maxCoeff() + padding_deg};
}

void require_2d(const OcsvmModel& model, const char* who) {
  model.validate();
  if (model.dimension() != 2) {
    throw std::invalid_argument(std::string(who) + " needs a 2-D model, got dimension " +
                                std::to_string(model.dimension()));
  }
}

}  // namespace

PairArea pair_area(const OcsvmModel& model, int resolution, double padding_deg) {
  require_2d(model, "pair_area");
  if (resolution < 64) throw std::invalid_argument("resolution must be at least 64");
  if (!(padding_deg > 0.0)) throw std::invalid_argument("padding must be positive");

  double pad = padding_deg;
  for (int attempt = 0;; ++attempt) {
    const Window w = sv_window(model, pad);
    const double dx = (w.hi_x - w.lo_x) / resolution;
    const double dy = (w.hi_y - w.lo_y) / resolution;

    // Signs of gamma at the cell centers.
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> inside(resolution, resolution);
    bool border_clear = true;
    Eigen::Vector2d q;
    for (int r = 0; r < resolution && border_clear; ++r) {
      for (int c = 0; c < resolution; ++c) {
        q[0] = w.lo_x + (c + 0.5) * dx;
        q[1] = w.lo_y + (r + 0.5) * dy;
        const bool in = model.gamma(q) > 0.0;
        inside(r, c) = in;
        if (in && (r == 0 || c == 0 || r == resolution - 1 || c == resolution - 1)) {
          border_clear = false;
          break;
        }
      }
    }
    if (!border_clear) {
      if (attempt == 0) {
        pad *= 2.0;
        continue;
      }
      throw std::runtime_error(
          "the boundary does not close inside the evaluation window even after doubling the padding");
    }

    std::int64_t in_count = 0;
    std::int64_t crossing = 0;
    for (int r = 0; r < resolution; ++r) {
      for (int c = 0; c < resolution; ++c) {
        if (inside(r, c)) ++in_count;
        const bool self = inside(r, c);
        const bool crosses = (r > 0 && inside(r - 1, c) != self) ||
                             (r + 1 < resolution && inside(r + 1, c) != self) ||
                             (c > 0 && inside(r, c - 1) != self) ||
                             (c + 1 < resolution && inside(r, c + 1) != self);
        if (crosses) ++crossing;
      }
    }

    PairArea out;
    out.area = static_cast<double>(in_count) * dx * dy;
    out.uncertainty = static_cast<double>(crossing) * dx * dy;
    out.resolution = resolution;
    out.lo_x = w.lo_x;
    out.hi_x = w.hi_x;
    out.lo_y = w.lo_y;
    out.hi_y = w.hi_y;
    return out;
  }
}

std::pair<int, int> dof_pair_of(const OcsvmModel& model) {
  if (model.dofs.size() != 2) {
    throw SchemaError("model does not name exactly two degrees of freedom");
  }
  const auto& names = dof_names();
  std::pair<int, int> out{-1, -1};
  for (int k = 0; k < kArmDofCount; ++k) {
    if (model.dofs[0] == names[static_cast<std::size_t>(k)]) out.first = k;
    if (model.dofs[1] == names[static_cast<std::size_t>(k)]) out.second = k;
  }
  if (out.first < 0 || out.second < 0 || out.first == out.second) {
    throw SchemaError("model dof names '" + model.dofs[0] + "', '" + model.dofs[1] +
                      "' are not two distinct known angles");
  }
  return out;
}

void WeightMatrix::set(int i, int j, double weight) {
  if (i == j) throw std::invalid_argument("pair weights are defined for distinct indices");
  if (i < 0 || j < 0) throw std::invalid_argument("pair indices must be nonnegative");
  if (!(weight >= 0.0)) throw std::invalid_argument("pair weights must be nonnegative");
  entries_[std::minmax(i, j)] = weight;
}

double WeightMatrix::at(int i, int j) const {
  const auto it = entries_.find(std::minmax(i, j));
  return it == entries_.end() ? 0.0 : it->second;
}

std::string WeightMatrix::to_json() const {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [key, w] : entries_) {
    pairs.push_back({{"i", key.first}, {"j", key.second}, {"w", w}});
  }
  nlohmann::json j;
  j["weights"] = std::move(pairs);
  return j.dump(2);
}

WeightMatrix WeightMatrix::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("weight matrix: ") + e.what());
  }
  WeightMatrix m;
  try {
    for (const auto& entry : j.at("weights")) {
      const int i = entry.at("i").get<int>();
      const int jj = entry.at("j").get<int>();
      if (m.entries_.count(std::minmax(i, jj)) > 0) {
        throw SchemaError("weight matrix repeats pair (" + std::to_string(i) + ", " +
                          std::to_string(jj) + ")");
      }
      m.set(i, jj, entry.at("w").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("weight matrix: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("weight matrix: ") + e.what());
  }
  return m;
}

WeightMatrix WeightMatrix::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open weight matrix: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

double weighted_volume(const std::vector<PairArea>& areas, const WeightMatrix& weights) {
  std::map<std::pair<int, int>, double> by_pair;
  for (const auto& a : areas) {
    if (a.i == a.j) throw SchemaError("pair area has identical DoF indices");
    const auto key = std::minmax(a.i, a.j);
    if (!by_pair.emplace(key, a.area).second) {
      throw SchemaError("two areas were given for pair (" + std::to_string(key.first) + ", " +
                        std::to_string(key.second) + ")");
    }
  }
  double total = 0.0;
  for (const auto& [key, w] : weights.entries()) {
    if (w == 0.0) continue;
    const auto it = by_pair.find(key);
    if (it == by_pair.end()) {
      throw SchemaError("weight matrix references pair (" + std::to_string(key.first) + ", " +
                        std::to_string(key.second) + ") but no area was computed for it");
    }
    total += w * it->second;
  }
  return total;
}

double impairment_index(double impaired_volume, double healthy_volume) {
  if (!(healthy_volume > 0.0)) {
    throw std::invalid_argument("the healthy reference volume must be positive");
  }
  return impaired_volume / healthy_volume;
}

McVolume mc_volume(const OcsvmModel& model, std::int64_t samples, double padding_deg,
                   std::uint64_t seed) {
  model.validate();
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  if (!(padding_deg > 0.0)) throw std::invalid_argument("padding must be positive");
  const int n = model.dimension();
  Eigen::VectorXd lo(n), hi(n);
  double box = 1.0;
  for (int d = 0; d < n; ++d) {
    lo[d] = model.support_vectors.col(d).minCoeff() - padding_deg;
    hi[d] = model.support_vectors.col(d).maxCoeff() + padding_deg;
    box *= hi[d] - lo[d];
  }
  std::mt19937_64 rng(seed);
  std::int64_t inside = 0;
  Eigen::VectorXd q(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int d = 0; d < n; ++d) q[d] = std::uniform_real_distribution<double>(lo[d], hi[d])(rng);
    if (model.gamma(q) >= 0.0) ++inside;
  }
  const double p = static_cast<double>(inside) / static_cast<double>(samples);
  McVolume out;
  out.volume = box * p;
  out.std_error = box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

IsolineLattice isoline_lattice(const OcsvmModel& model, int resolution, double padding_deg) {
  require_2d(model, "isoline_lattice");
  if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
  if (!(padding_deg > 0.0)) throw std::invalid_argument("padding must be positive");
  const Window w = sv_window(model, padding_deg);
  IsolineLattice out;
  out.xs.resize(resolution);
  out.ys.resize(resolution);
  for (int i = 0; i < resolution; ++i) {
    out.xs[i] = w.lo_x + (w.hi_x - w.lo_x) * i / (resolution - 1);
    out.ys[i] = w.lo_y + (w.hi_y - w.lo_y) * i / (resolution - 1);
  }
  out.values.resize(resolution, resolution);
  Eigen::Vector2d q;
  for (int r = 0; r < resolution; ++r) {
    for (int c = 0; c < resolution; ++c) {
      q[0] = out.xs[c];
      q[1] = out.ys[r];
      out.values(r, c) = model.gamma(q);
    }
  }
  return out;
}

}  // namespace rom
