#include "rom/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rom/errors.hpp"

namespace rom {

namespace {

constexpr double kLambdaFloor = 1e-12;

// Relative cutoff separating "the hull reaches the origin" from "the origin
// is strictly outside": squared distances below (1e-9)^2 * scale are noise.
constexpr double kEdgeRelTol = 1e-18;

int row_of_min_norm(const Eigen::MatrixXd& P) {
  int best = 0;
  double best_v = P.row(0).squaredNorm();
  for (Eigen::Index i = 1; i < P.rows(); ++i) {
    const double v = P.row(i).squaredNorm();
    if (v < best_v) {
      best_v = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

MinNormResult min_norm_point(const Eigen::MatrixXd& points) {
  const int k = static_cast<int>(points.rows());
  if (k == 0) throw std::invalid_argument("min_norm_point needs at least one point");

  MinNormResult result;
  result.lambda = Eigen::VectorXd::Zero(k);

  double scale = 0.0;
  for (int i = 0; i < k; ++i) scale = std::max(scale, points.row(i).squaredNorm());
  if (scale == 0.0) {
    result.lambda[0] = 1.0;
    return result;
  }
  const double gap_tol = 1e-14 * scale;

  std::vector<int> S{row_of_min_norm(points)};
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x = points.row(S[0]).transpose();

  const int max_major = 1000 + 16 * k;
  for (int major = 0; major < max_major; ++major) {
    // Wolfe optimality: no vertex improves on the current point.
    int j_best = 0;
    double dot_best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      const double v = points.row(j).dot(x);
      if (v < dot_best) {
        dot_best = v;
        j_best = j;
      }
    }
    if (dot_best >= x.squaredNorm() - gap_tol) break;
    if (std::find(S.begin(), S.end(), j_best) != S.end()) break;  // numerical stall
    S.push_back(j_best);
    lam.conservativeResize(static_cast<Eigen::Index>(S.size()));
    lam[static_cast<Eigen::Index>(S.size()) - 1] = 0.0;

    while (true) {
      const int s = static_cast<int>(S.size());
      // Affine minimizer over S: minimize |sum mu_i p_i|^2 with sum mu = 1.
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(s + 1, s + 1);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j <= i; ++j) {
          A(i, j) = A(j, i) = points.row(S[static_cast<std::size_t>(i)])
                                  .dot(points.row(S[static_cast<std::size_t>(j)]));
        }
        A(i, s) = A(s, i) = 1.0;
      }
      Eigen::VectorXd b = Eigen::VectorXd::Zero(s + 1);
      b[s] = 1.0;
      Eigen::VectorXd mu = A.completeOrthogonalDecomposition().solve(b).head(s);
      const double mu_sum = mu.sum();
      if (std::abs(mu_sum) > 0.5) mu /= mu_sum;

      if (mu.minCoeff() > kLambdaFloor) {
        lam = mu;
        break;
      }
      // Walk from lam toward mu until the first weight hits zero, drop it.
      double theta = 1.0;
      int drop = -1;
      for (int i = 0; i < s; ++i) {
        if (mu[i] <= kLambdaFloor && lam[i] > mu[i]) {
          const double t = lam[i] / (lam[i] - mu[i]);
          if (t < theta) {
            theta = t;
            drop = i;
          }
        }
      }
      if (drop < 0) {  // cannot make progress; accept clipped weights
        lam = mu.cwiseMax(0.0);
        const double total = lam.sum();
        if (total > 0.0) lam /= total;
        break;
      }
      lam = (1.0 - theta) * lam + theta * mu;
      lam[drop] = 0.0;
      std::vector<int> keep_rows;
      Eigen::VectorXd new_lam(s);
      int kept = 0;
      for (int i = 0; i < s; ++i) {
        if (i != drop && lam[i] > kLambdaFloor) {
          keep_rows.push_back(S[static_cast<std::size_t>(i)]);
          new_lam[kept++] = lam[i];
        }
      }
      if (kept == 0) {  // keep the strongest row rather than emptying the set
        int strongest = 0;
        lam.maxCoeff(&strongest);
        keep_rows.push_back(S[static_cast<std::size_t>(strongest)]);
        new_lam[kept++] = 1.0;
      }
      S = std::move(keep_rows);
      lam = new_lam.head(kept);
      const double total = lam.sum();
      if (total > 0.0) lam /= total;
    }

    x.setZero();
    for (std::size_t i = 0; i < S.size(); ++i) {
      x += lam[static_cast<Eigen::Index>(i)] * points.row(S[i]).transpose();
    }
  }

  result.norm_sq = x.squaredNorm();
  for (std::size_t i = 0; i < S.size(); ++i) {
    result.lambda[S[i]] = lam[static_cast<Eigen::Index>(i)];
  }
  return result;
}

EdgeResult edge_sv_test(const Eigen::MatrixXd& neighbor_offsets, int max_misclassified,
                        int min_neighbors) {
  if (max_misclassified < 0) throw std::invalid_argument("max_misclassified must be nonnegative");
  EdgeResult r;
  if (neighbor_offsets.rows() == 0 || neighbor_offsets.rows() < min_neighbors) {
    r.edge = true;
    r.low_confidence = true;
    return r;
  }
  Eigen::MatrixXd pts = neighbor_offsets;
  for (int dropped = 0;; ++dropped) {
    double scale = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) scale = std::max(scale, pts.row(i).squaredNorm());
    if (scale == 0.0) {  // a neighbor coincides with the support vector
      r.edge = false;
      return r;
    }
    const MinNormResult mn = min_norm_point(pts);
    if (mn.norm_sq > kEdgeRelTol * scale) {
      r.edge = true;
      return r;
    }
    if (dropped >= max_misclassified || pts.rows() <= 1) {
      r.edge = false;
      return r;
    }
    int worst = 0;
    mn.lambda.maxCoeff(&worst);
    Eigen::MatrixXd reduced(pts.rows() - 1, pts.cols());
    Eigen::Index w = 0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      if (i != worst) reduced.row(w++) = pts.row(i);
    }
    pts = std::move(reduced);
  }
}

double median_nn_distance(const Eigen::MatrixXd& samples) {
  const int m = static_cast<int>(samples.rows());
  if (m < 2) throw SchemaError("need at least two samples for a neighbor distance");
  std::vector<double> nn;
  nn.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double d2 = (samples.row(i) - samples.row(j)).squaredNorm();
      if (d2 > 0.0 && d2 < best) best = d2;
    }
    if (std::isfinite(best)) nn.push_back(std::sqrt(best));
  }
  if (nn.empty()) throw SchemaError("all samples are identical");
  const std::size_t mid = nn.size() / 2;
  std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(mid), nn.end());
  return nn[mid];
}

MEsvResult m_esv_check(const OcsvmModel& model, const Eigen::MatrixXd& samples, const MEsvConfig& config) {
  model.validate();
  if (samples.rows() == 0) throw SchemaError("the interior-support-vector check needs training samples");
  if (samples.cols() != model.dimension()) {
    throw SchemaError("samples have dimension " + std::to_string(samples.cols()) + ", model expects " +
                      std::to_string(model.dimension()));
  }
  if (config.min_neighbors < 1) throw std::invalid_argument("min_neighbors must be positive");

  if (!(config.max_interior_fraction >= 0.0 && config.max_interior_fraction <= 1.0)) {
    throw std::invalid_argument("max_interior_fraction must lie in [0, 1]");
  }

  MEsvResult r;
  r.radius = config.radius > 0.0 ? config.radius : 4.0 * median_nn_distance(samples);
  const int nsv = model.sv_count();
  r.max_interior = config.max_interior >= 0
                       ? config.max_interior
                       : static_cast<int>(std::ceil(config.max_interior_fraction * nsv));
  const double r2 = r.radius * r.radius;

  for (int s = 0; s < nsv; ++s) {
    const Eigen::RowVectorXd sv = model.support_vectors.row(s);
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
      const double d2 = (samples.row(i) - sv).squaredNorm();
      if (d2 > 0.0 && d2 <= r2) idx.push_back(static_cast<int>(i));
    }
    if (static_cast<int>(idx.size()) < config.min_neighbors) {
      ++r.low_confidence_count;  // counted as an edge, but an unreliable one
      continue;
    }
    Eigen::MatrixXd offsets(static_cast<Eigen::Index>(idx.size()), samples.cols());
    for (std::size_t n = 0; n < idx.size(); ++n) {
      offsets.row(static_cast<Eigen::Index>(n)) = samples.row(idx[n]) - sv;
    }
    const EdgeResult e = edge_sv_test(offsets, config.max_misclassified);
    if (!e.edge) {
      ++r.interior_count;
      r.interior_svs.push_back(s);
    }
  }
  r.passed = r.interior_count <= r.max_interior;
  return r;
}

InclusionResult constraint_test_inclusion(const OcsvmModel& model, const Eigen::MatrixXd& test) {
  if (test.rows() == 0) throw SchemaError("the inclusion constraint needs a nonempty test set");
  const Eigen::VectorXd g = model.gamma_rows(test);
  InclusionResult r;
  r.min_gamma = g.minCoeff();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] < 0.0) ++r.violations;
  }
  r.passed = r.violations == 0;
  return r;
}

Eigen::MatrixXd make_negative_samples(const Eigen::MatrixXd& train, double offset_deg) {
  if (train.rows() == 0) throw SchemaError("cannot build negative samples from an empty training set");
  if (!(offset_deg > 0.0)) throw std::invalid_argument("negative offset must be positive");
  const Eigen::Index n = train.cols();
  const Eigen::RowVectorXd mean = train.colwise().mean();
  Eigen::MatrixXd out(2 * n, n);
  for (Eigen::Index d = 0; d < n; ++d) {
    out.row(2 * d) = mean;
    out(2 * d, d) = train.col(d).minCoeff() - offset_deg;
    out.row(2 * d + 1) = mean;
    out(2 * d + 1, d) = train.col(d).maxCoeff() + offset_deg;
  }
  return out;
}

NegativeResult constraint_negative_exclusion(const OcsvmModel& model, const Eigen::MatrixXd& negatives) {
  if (negatives.rows() == 0) throw SchemaError("the exclusion constraint needs negative samples");
  const Eigen::VectorXd g = model.gamma_rows(negatives);
  NegativeResult r;
  r.max_gamma = g.maxCoeff();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] >= 0.0) ++r.violations;
  }
  r.passed = r.violations == 0;
  return r;
}

void GridConfig::validate() const {
  if (!(nu_lo > 0.0) || !(nu_hi <= 1.0) || !(nu_lo <= nu_hi)) {
    throw std::invalid_argument("nu grid must satisfy 0 < lo <= hi <= 1");
  }
  if (!(sigma_lo > 0.0) || !(sigma_lo <= sigma_hi)) {
    throw std::invalid_argument("sigma grid must satisfy 0 < lo <= hi");
  }
  if (nu_count < 2 || sigma_count < 2) throw std::invalid_argument("grid counts must be at least 2");
  if (refine_rounds < 0) throw std::invalid_argument("refine_rounds must be nonnegative");
  if (!(boundary_change_threshold > 0.0)) {
    throw std::invalid_argument("boundary_change_threshold must be positive");
  }
  if (eval_points_per_dim < 2) throw std::invalid_argument("eval_points_per_dim must be at least 2");
  if (!(eval_padding >= 0.0)) throw std::invalid_argument("eval_padding must be nonnegative");
  if (!(negative_offset > 0.0)) throw std::invalid_argument("negative_offset must be positive");
  if (threads < 0) throw std::invalid_argument("threads must be nonnegative");
}

namespace {

std::vector<double> log_axis(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  if (count == 1) {
    v[0] = std::sqrt(lo * hi);
    return v;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < count; ++i) {
    v[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (count - 1));
  }
  return v;
}

// Fixed evaluation point set over the padded training box. Full lattice up to
// about one million points, otherwise a deterministic uniform draw of the
// same order (full grids are hopeless past three dimensions).
Eigen::MatrixXd eval_points(const Eigen::MatrixXd& train, int per_dim, double pad, double& box_volume) {
  const int n = static_cast<int>(train.cols());
  std::vector<std::pair<double, double>> bounds(static_cast<std::size_t>(n));
  box_volume = 1.0;
  for (int d = 0; d < n; ++d) {
    const double lo = train.col(d).minCoeff() - pad;
    const double hi = train.col(d).maxCoeff() + pad;
    bounds[static_cast<std::size_t>(d)] = {lo, hi};
    box_volume *= hi - lo;
  }
  const double total_f = std::pow(static_cast<double>(per_dim), n);
  if (total_f <= 1048576.0) {
    const std::int64_t total = static_cast<std::int64_t>(std::llround(total_f));
    Eigen::MatrixXd pts(total, n);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (std::int64_t r = 0; r < total; ++r) {
      for (int d = 0; d < n; ++d) {
        const auto [lo, hi] = bounds[static_cast<std::size_t>(d)];
        pts(r, d) = lo + (hi - lo) * idx[static_cast<std::size_t>(d)] / (per_dim - 1);
      }
      for (int d = n - 1; d >= 0; --d) {
        if (++idx[static_cast<std::size_t>(d)] < per_dim) break;
        idx[static_cast<std::size_t>(d)] = 0;
      }
    }
    return pts;
  }
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  const std::int64_t count = 1 << 17;
  Eigen::MatrixXd pts(count, n);
  for (std::int64_t r = 0; r < count; ++r) {
    for (int d = 0; d < n; ++d) {
      const auto [lo, hi] = bounds[static_cast<std::size_t>(d)];
      pts(r, d) = std::uniform_real_distribution<double>(lo, hi)(rng);
    }
  }
  return pts;
}

struct CellOutcome {
  CellDiagnostics diag;
  std::vector<bool> mask;  // inside/outside per eval point, accepted cells only
};

CellOutcome evaluate_cell(double nu, double sigma, const Eigen::MatrixXd& train,
                          const Eigen::MatrixXd& test, const Eigen::MatrixXd& negatives,
                          const MEsvConfig& mesv, const TrainConfig& base,
                          const Eigen::MatrixXd& lattice, double box_volume) {
  CellOutcome out;
  out.diag.nu = nu;
  out.diag.sigma = sigma;
  TrainConfig cfg = base;
  cfg.nu = nu;
  cfg.sigma = sigma;
  OcsvmModel model;
  try {
    model = train_ocsvm(train, cfg).model;
  } catch (const ConvergenceError& e) {
    out.diag.note = e.what();
    return out;
  }
  out.diag.trained = true;
  out.diag.sv_fraction = model.sv_fraction;
  out.diag.c1_inclusion = constraint_test_inclusion(model, test).passed;
  out.diag.c2_mesv = m_esv_check(model, train, mesv).passed;
  out.diag.c3_negatives = constraint_negative_exclusion(model, negatives).passed;
  out.diag.accepted = out.diag.c1_inclusion && out.diag.c2_mesv && out.diag.c3_negatives;
  if (out.diag.accepted) {
    const Eigen::VectorXd g = model.gamma_rows(lattice);
    out.mask.resize(static_cast<std::size_t>(g.size()));
    std::int64_t inside = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const bool in = g[i] >= 0.0;
      out.mask[static_cast<std::size_t>(i)] = in;
      inside += in ? 1 : 0;
    }
    out.diag.volume = box_volume * static_cast<double>(inside) / static_cast<double>(g.size());
  }
  return out;
}

double mask_disagreement(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size() || a.empty()) return 1.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i] ? 1 : 0;
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

struct AcceptedCell {
  double nu{0.0};
  double sigma{0.0};
  double volume{0.0};
  std::vector<bool> mask;
};

// Smallest enclosed volume wins; ties prefer the stricter nu, then the
// narrower kernel.
bool cell_precedes(const AcceptedCell& a, const AcceptedCell& b) {
  if (a.volume != b.volume) return a.volume < b.volume;
  if (a.nu != b.nu) return a.nu > b.nu;
  return a.sigma < b.sigma;
}

}  // namespace

TuneResult grid_search(const Eigen::MatrixXd& train, const Eigen::MatrixXd& test,
                       const GridConfig& grid, const MEsvConfig& mesv, const TrainConfig& base) {
  grid.validate();
  if (train.rows() < 2) throw SchemaError("grid search needs at least two training samples");
  if (test.rows() == 0) throw SchemaError("grid search needs a reserved test set");
  if (test.cols() != train.cols()) {
    throw SchemaError("test samples have dimension " + std::to_string(test.cols()) +
                      ", training samples have " + std::to_string(train.cols()));
  }

  double box_volume = 0.0;
  const Eigen::MatrixXd lattice = eval_points(train, grid.eval_points_per_dim, grid.eval_padding, box_volume);
  const Eigen::MatrixXd negatives = make_negative_samples(train, grid.negative_offset);
  MEsvConfig mesv_resolved = mesv;
  if (mesv_resolved.radius <= 0.0) mesv_resolved.radius = 4.0 * median_nn_distance(train);

  TuneResult result;
  TuningReport& report = result.report;

  const double orig_lnu_lo = std::log(grid.nu_lo);
  const double orig_lnu_hi = std::log(grid.nu_hi);
  const double orig_lsg_lo = std::log(grid.sigma_lo);
  const double orig_lsg_hi = std::log(grid.sigma_hi);
  double lnu_lo = orig_lnu_lo, lnu_hi = orig_lnu_hi;
  double lsg_lo = orig_lsg_lo, lsg_hi = orig_lsg_hi;
  int nu_count = grid.nu_count;
  int sigma_count = grid.sigma_count;

  std::vector<AcceptedCell> accepted;
  std::vector<bool> prev_winner_mask;

  for (int round = 0; round <= grid.refine_rounds; ++round) {
    const std::vector<double> nus = log_axis(std::exp(lnu_lo), std::exp(lnu_hi), nu_count);
    const std::vector<double> sigmas = log_axis(std::exp(lsg_lo), std::exp(lsg_hi), sigma_count);
    std::vector<CellOutcome> outcomes(nus.size() * sigmas.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      while (true) {
        const std::size_t c = next.fetch_add(1);
        if (c >= outcomes.size()) return;
        const double nu = nus[c / sigmas.size()];
        const double sigma = sigmas[c % sigmas.size()];
        try {
          outcomes[c] = evaluate_cell(nu, sigma, train, test, negatives, mesv_resolved, base,
                                      lattice, box_volume);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t nthreads =
        std::min<std::size_t>(grid.threads > 0 ? static_cast<std::size_t>(grid.threads) : hw,
                              outcomes.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);

    TuningRound tr;
    tr.index = round;
    tr.nu_lo = std::exp(lnu_lo);
    tr.nu_hi = std::exp(lnu_hi);
    tr.sigma_lo = std::exp(lsg_lo);
    tr.sigma_hi = std::exp(lsg_hi);
    tr.nu_count = nu_count;
    tr.sigma_count = sigma_count;
    for (auto& oc : outcomes) {
      tr.cells.push_back(oc.diag);
      if (oc.diag.accepted) {
        accepted.push_back({oc.diag.nu, oc.diag.sigma, oc.diag.volume, std::move(oc.mask)});
      }
    }

    if (!accepted.empty()) {
      const auto winner = std::min_element(accepted.begin(), accepted.end(), cell_precedes);
      if (!prev_winner_mask.empty()) {
        tr.boundary_change = mask_disagreement(winner->mask, prev_winner_mask);
      }
      prev_winner_mask = winner->mask;
    }
    const double change = tr.boundary_change;
    report.rounds.push_back(std::move(tr));

    if (accepted.empty()) break;
    if (round == grid.refine_rounds) break;
    if (round > 0 && change < grid.boundary_change_threshold) break;

    // Shrink onto the accepted cells, padded by one current grid step, and
    // double the resolution.
    double a_nu_lo = std::numeric_limits<double>::infinity(), a_nu_hi = -a_nu_lo;
    double a_sg_lo = a_nu_lo, a_sg_hi = -a_nu_lo;
    for (const auto& c : accepted) {
      a_nu_lo = std::min(a_nu_lo, std::log(c.nu));
      a_nu_hi = std::max(a_nu_hi, std::log(c.nu));
      a_sg_lo = std::min(a_sg_lo, std::log(c.sigma));
      a_sg_hi = std::max(a_sg_hi, std::log(c.sigma));
    }
    const double step_nu = nu_count > 1 ? (lnu_hi - lnu_lo) / (nu_count - 1) : lnu_hi - lnu_lo;
    const double step_sg = sigma_count > 1 ? (lsg_hi - lsg_lo) / (sigma_count - 1) : lsg_hi - lsg_lo;
    lnu_lo = std::clamp(a_nu_lo - step_nu, orig_lnu_lo, orig_lnu_hi);
    lnu_hi = std::clamp(a_nu_hi + step_nu, orig_lnu_lo, orig_lnu_hi);
    lsg_lo = std::clamp(a_sg_lo - step_sg, orig_lsg_lo, orig_lsg_hi);
    lsg_hi = std::clamp(a_sg_hi + step_sg, orig_lsg_lo, orig_lsg_hi);
    nu_count *= 2;
    sigma_count *= 2;
  }

  if (accepted.empty()) {
    report.feasible = false;
    for (const auto& round : report.rounds) {
      for (const auto& cell : round.cells) {
        if (!cell.trained) {
          ++report.failure_counts["training"];
          continue;
        }
        if (!cell.c1_inclusion) ++report.failure_counts["inclusion"];
        if (!cell.c2_mesv) ++report.failure_counts["interior_svs"];
        if (!cell.c3_negatives) ++report.failure_counts["negatives"];
      }
    }
    return result;
  }

  const auto winner = std::min_element(accepted.begin(), accepted.end(), cell_precedes);
  report.feasible = true;
  report.best_nu = winner->nu;
  report.best_sigma = winner->sigma;
  report.best_volume = winner->volume;
  TrainConfig best_cfg = base;
  best_cfg.nu = winner->nu;
  best_cfg.sigma = winner->sigma;
  result.model = train_ocsvm(train, best_cfg).model;
  return result;
}

std::string TuningReport::to_json() const {
  nlohmann::json j;
  j["feasible"] = feasible;
  if (feasible) {
    j["selected"] = {{"nu", best_nu}, {"sigma", best_sigma}, {"volume", best_volume}};
  }
  nlohmann::json accepted = nlohmann::json::array();
  for (const auto& r : rounds) {
    for (const auto& c : r.cells) {
      if (c.accepted) accepted.push_back({{"nu", c.nu}, {"sigma", c.sigma}, {"volume", c.volume}});
    }
  }
  j["accepted"] = std::move(accepted);
  j["failure_counts"] = failure_counts;
  nlohmann::json rounds_json = nlohmann::json::array();
  for (const auto& r : rounds) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : r.cells) {
      cells.push_back({{"nu", c.nu},
                       {"sigma", c.sigma},
                       {"trained", c.trained},
                       {"inclusion", c.c1_inclusion},
                       {"interior_svs_ok", c.c2_mesv},
                       {"negatives", c.c3_negatives},
                       {"accepted", c.accepted},
                       {"volume", c.volume},
                       {"sv_fraction", c.sv_fraction},
                       {"note", c.note}});
    }
    rounds_json.push_back({{"index", r.index},
                           {"nu_range", {r.nu_lo, r.nu_hi}},
                           {"sigma_range", {r.sigma_lo, r.sigma_hi}},
                           {"nu_count", r.nu_count},
                           {"sigma_count", r.sigma_count},
                           {"boundary_change", r.boundary_change},
                           {"cells", std::move(cells)}});
  }
  j["rounds"] = std::move(rounds_json);
  return j.dump(2);
}

void TuningReport::write_cells_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot open for writing: " + path);
  out << "round,nu,sigma,trained,inclusion,interior_svs_ok,negatives,accepted,volume,sv_fraction,note\n";
  for (const auto& r : rounds) {
    for (const auto& c : r.cells) {
      std::string note = c.note;
      for (auto& ch : note) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out << r.index << ',' << c.nu << ',' << c.sigma << ',' << c.trained << ',' << c.c1_inclusion
          << ',' << c.c2_mesv << ',' << c.c3_negatives << ',' << c.accepted << ',' << c.volume
          << ',' << c.sv_fraction << ',' << note << '\n';
    }
  }
}

}  // namespace rom
