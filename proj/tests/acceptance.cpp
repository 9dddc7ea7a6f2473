// Release gate: nine end-to-end checks over the library, one line each.
// A check that fails prints its measurements; the exit code is the number
// of unexpected failures. Known data discrepancies are reported as such
// and do not fail the gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rom/dataset.hpp"
#include "rom/kinematics.hpp"
#include "rom/metrics.hpp"
#include "rom/ocsvm.hpp"
#include "rom/tuning.hpp"
#include "testutil.hpp"

namespace {

struct Outcome {
  bool passed{false};
  bool known_discrepancy{false};  // failure explained by a documented data defect
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[768];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1: stored impairment ratios against their volume quotients ----------

Outcome check_reference_ratios() {
  struct Row {
    double healthy, impaired, expected;
  };
  const Row rows[] = {{12850.0, 6229.6, 0.4848},
                      {13450.0, 8621.4, 0.6410},
                      {12825.3, 8380.7, 0.6534},
                      {13167.9, 9328.4, 0.7084}};
  constexpr double kTol = 5e-5;

  Outcome o;
  o.passed = true;
  int failing = -1;
  double failing_delta = 0.0;
  std::string ratios, deltas;
  for (int r = 0; r < 4; ++r) {
    const double ii = rom::impairment_index(rows[r].impaired, rows[r].healthy);
    const double delta = std::abs(ii - rows[r].expected);
    ratios += fmt("%s%.6f", r ? "/" : "", ii);
    deltas += fmt("%s%.1e", r ? "/" : "", delta);
    if (delta > kTol) {
      o.passed = false;
      failing = r;
      failing_delta = delta;
    }
  }
  o.detail = fmt("ratios %s, deltas %s, tolerance 5e-05", ratios.c_str(), deltas.c_str());
  if (!o.passed && failing == 2 && failing_delta < 1e-4) {
    // 8380.7 / 12825.3 = 0.6534506..., which rounds to 0.6535; the stored
    // reference 0.6534 misses it by 5.06e-5. The arithmetic here is checked
    // by the other three rows.
    o.known_discrepancy = true;
    o.detail += "; row 3 reference 0.6534 disagrees with its own volumes (quotient 0.65345)";
  }
  return o;
}

// ---- 2: nu bounds the outlier and support-vector fractions ---------------

Outcome check_nu_property() {
  rom::ShapeSpec disk;
  disk.kind = rom::ShapeKind::disk;
  disk.center = {35.0, 15.0};
  disk.a = 40.0;
  const Eigen::MatrixXd train = rom::sample_shape(disk, 2000, 101);

  Outcome o;
  o.passed = true;
  for (const double nu : {0.01, 0.05, 0.2}) {
    rom::TrainConfig cfg;
    cfg.nu = nu;
    cfg.sigma = 12.0;
    const rom::OcsvmModel model = rom::train_ocsvm(train, cfg).model;
    const Eigen::VectorXd g = model.gamma_rows(train);
    int outliers = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) outliers += g[i] < 0.0 ? 1 : 0;
    const double out_frac = static_cast<double>(outliers) / static_cast<double>(train.rows());
    const bool ok = out_frac <= nu + 0.02 && model.sv_fraction >= nu - 0.02;
    o.passed = o.passed && ok;
    o.detail += fmt("%snu=%.2f out=%.4f sv=%.4f%s", o.detail.empty() ? "" : ", ", nu, out_frac,
                    model.sv_fraction, ok ? "" : " VIOLATED");
  }
  return o;
}

// ---- 3: independent KKT certification -------------------------------------

Outcome check_kkt() {
  const double nus[] = {0.03, 0.08, 0.15, 0.3};
  const double sigmas[] = {8.0, 15.0, 25.0, 40.0};

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    rom::ShapeSpec shape;
    switch (i % 4) {
      case 0:
        shape.kind = rom::ShapeKind::disk;
        shape.a = 30.0 + i;
        break;
      case 1:
        shape.kind = rom::ShapeKind::ellipse;
        shape.a = 50.0;
        shape.b = 25.0;
        break;
      case 2:
        shape.kind = rom::ShapeKind::crescent;
        shape.a = 50.0;
        shape.b = 40.0;
        shape.d = 55.0;
        break;
      default:
        shape.kind = rom::ShapeKind::annulus_sector;
        shape.a = 30.0;
        shape.b = 60.0;
        shape.theta0 = -45.0;
        shape.theta1 = 170.0;
        break;
    }
    const int m = 150 + 10 * i;
    const Eigen::MatrixXd train = rom::sample_shape(shape, m, 500 + static_cast<std::uint64_t>(i));
    rom::TrainConfig cfg;
    cfg.nu = nus[i % 4];
    cfg.sigma = sigmas[(i / 4) % 4];
    const rom::TrainResult result = rom::train_ocsvm(train, cfg);

    // Rebuild the gradient of the dual from scratch and measure the gap
    // between the worst raisable and worst reducible coordinate.
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    for (int s = 0; s < result.model.sv_count(); ++s) {
      alpha[result.diagnostics.sv_indices[static_cast<std::size_t>(s)]] = result.model.alphas[s];
    }
    const double c_bound = 1.0 / (cfg.nu * m);
    double up = -std::numeric_limits<double>::infinity();
    double down = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      double gr = 0.0;
      for (int s = 0; s < m; ++s) {
        if (alpha[s] > 0.0) {
          gr += alpha[s] *
                rom::rbf_kernel(train.row(r).transpose(), train.row(s).transpose(), cfg.sigma);
        }
      }
      if (alpha[r] > 0.0) up = std::max(up, gr);
      if (alpha[r] < c_bound) down = std::min(down, gr);
    }
    worst = std::max(worst, up - down);
  }

  Outcome o;
  o.passed = worst <= 1e-6;
  o.detail = fmt("max violation %.2e over 20 seeded datasets, tolerance 1e-06", worst);
  return o;
}

// ---- 4: analytic gradient against central differences ---------------------

Outcome check_gradient() {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> coord(-120.0, 120.0);
  std::uniform_real_distribution<double> query(-150.0, 150.0);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::uniform_real_distribution<double> width(5.0, 80.0);
  std::uniform_int_distribution<int> sv_count(3, 30);
  const int dims[] = {2, 3, 5, 7};

  double worst_ratio = 0.0;
  int bad = 0;
  for (int c = 0; c < 500; ++c) {
    const int n = dims[c % 4];
    const int k = sv_count(rng);
    Eigen::MatrixXd svs(k, n);
    Eigen::VectorXd alphas(k);
    for (int i = 0; i < k; ++i) {
      for (int d = 0; d < n; ++d) svs(i, d) = coord(rng);
      alphas[i] = weight(rng);
    }
    const rom::OcsvmModel model =
        testutil::make_model(svs, alphas, width(rng), weight(rng));
    Eigen::VectorXd q(n);
    for (int d = 0; d < n; ++d) q[d] = query(rng);

    const Eigen::VectorXd analytic = model.gamma_gradient(q);
    const Eigen::VectorXd fd = testutil::fd_gradient(model, q, 1e-3);
    const double err = (fd - analytic).norm();
    const double tol = std::max(1e-6, 1e-4 * analytic.norm());
    worst_ratio = std::max(worst_ratio, err / tol);
    if (err > tol) ++bad;
  }

  Outcome o;
  o.passed = bad == 0;
  o.detail = fmt("500 cases, %d over tolerance, worst error/tolerance %.3f", bad, worst_ratio);
  return o;
}

// ---- 5: tuned pipeline against analytic areas ------------------------------

Outcome check_pipeline_area() {
  auto run = [](const rom::ShapeSpec& shape, const rom::ShapeSpec& inner, double& rel_err,
                std::string& note) {
    const Eigen::MatrixXd train = rom::sample_shape(shape, 1200, 21);
    const Eigen::MatrixXd test = rom::sample_shape(inner, 300, 22);
    rom::GridConfig grid;
    grid.nu_lo = 0.01;
    grid.nu_hi = 0.15;
    grid.nu_count = 5;
    grid.sigma_lo = 5.0;
    grid.sigma_hi = 200.0;
    grid.sigma_count = 6;
    grid.refine_rounds = 2;
    grid.eval_points_per_dim = 48;
    const rom::TuneResult tuned = rom::grid_search(train, test, grid, rom::MEsvConfig{},
                                                   rom::TrainConfig{});
    if (!tuned.report.feasible) {
      note = "no feasible cell";
      rel_err = 1.0;
      return false;
    }
    const rom::PairArea area = rom::pair_area(*tuned.model, 512, 30.0);
    const double truth = rom::shape_area(shape);
    rel_err = area.area / truth - 1.0;
    note = fmt("nu=%.3f sigma=%.1f area=%.0f true=%.0f err=%+.1f%%", tuned.report.best_nu,
               tuned.report.best_sigma, area.area, truth, 100.0 * rel_err);
    return std::abs(rel_err) <= 0.10;
  };

  rom::ShapeSpec disk;
  disk.kind = rom::ShapeKind::disk;
  disk.a = 50.0;
  rom::ShapeSpec disk_in = disk;
  disk_in.a = 48.5;

  rom::ShapeSpec ellipse;
  ellipse.kind = rom::ShapeKind::ellipse;
  ellipse.a = 60.0;
  ellipse.b = 30.0;
  rom::ShapeSpec ellipse_in = ellipse;
  ellipse_in.a = 58.5;
  ellipse_in.b = 28.5;

  double disk_err = 0.0, ellipse_err = 0.0;
  std::string disk_note, ellipse_note;
  const bool disk_ok = run(disk, disk_in, disk_err, disk_note);
  const bool ellipse_ok = run(ellipse, ellipse_in, ellipse_err, ellipse_note);

  Outcome o;
  o.passed = disk_ok && ellipse_ok;
  o.detail = fmt("disk: %s; ellipse: %s", disk_note.c_str(), ellipse_note.c_str());
  return o;
}

// ---- 6: constraint filter at extreme kernel widths -------------------------

Outcome check_constraint_filter() {
  struct Probe {
    bool mesv_passed{false};
    bool negatives_passed{false};
    double max_gamma{0.0};
  };
  auto probe = [](const Eigen::MatrixXd& train, double sigma, double interior_fraction) {
    rom::TrainConfig cfg;
    cfg.nu = 0.05;
    cfg.sigma = sigma;
    const rom::OcsvmModel model = rom::train_ocsvm(train, cfg).model;
    rom::MEsvConfig mesv;
    mesv.max_interior_fraction = interior_fraction;
    Probe p;
    p.mesv_passed = rom::m_esv_check(model, train, mesv).passed;
    const rom::NegativeResult neg =
        rom::constraint_negative_exclusion(model, rom::make_negative_samples(train, 5.0));
    p.negatives_passed = neg.passed;
    p.max_gamma = neg.max_gamma;
    return p;
  };

  rom::ShapeSpec disk;
  disk.kind = rom::ShapeKind::disk;
  disk.a = 50.0;
  const Eigen::MatrixXd disk_train = rom::sample_shape(disk, 900, 11);

  rom::ShapeSpec crescent;
  crescent.kind = rom::ShapeKind::crescent;
  crescent.a = 50.0;
  crescent.b = 40.0;
  crescent.d = 55.0;
  const Eigen::MatrixXd cres_train = rom::sample_shape(crescent, 900, 11);

  const Probe disk_tight = probe(disk_train, 1.0, 0.1);
  const Probe disk_wide = probe(disk_train, 1000.0, 0.1);
  const Probe cres_tight = probe(cres_train, 1.0, 0.3);
  const Probe cres_wide = probe(cres_train, 1000.0, 0.3);

  // Grid over the concave set: the accepted widths must sit strictly
  // between the two extremes.
  rom::ShapeSpec inner = crescent;
  inner.a = 48.5;
  inner.b = 41.5;
  const Eigen::MatrixXd cres_test = rom::sample_shape(inner, 200, 12);
  rom::GridConfig grid;
  grid.nu_lo = 0.02;
  grid.nu_hi = 0.2;
  grid.nu_count = 4;
  grid.sigma_lo = 1.0;
  grid.sigma_hi = 1000.0;
  grid.sigma_count = 7;
  grid.refine_rounds = 1;
  grid.eval_points_per_dim = 48;
  rom::MEsvConfig mesv;
  mesv.max_interior_fraction = 0.3;
  const rom::TuneResult tuned =
      rom::grid_search(cres_train, cres_test, grid, mesv, rom::TrainConfig{});
  const bool between = tuned.report.feasible && tuned.report.best_sigma > 1.0 &&
                       tuned.report.best_sigma < 1000.0;

  Outcome o;
  o.passed = !disk_tight.mesv_passed && !cres_tight.mesv_passed && !cres_wide.negatives_passed &&
             between;
  o.detail = fmt(
      "sigma=1: interior-SV check fails on disk (%s) and concave set (%s); "
      "sigma=1e3: negatives swallowed on concave set (%s, max gamma %+.1e); "
      "accepted sigma=%.1f strictly between",
      disk_tight.mesv_passed ? "no" : "yes", cres_tight.mesv_passed ? "no" : "yes",
      cres_wide.negatives_passed ? "no" : "yes", cres_wide.max_gamma,
      tuned.report.feasible ? tuned.report.best_sigma : -1.0);
  if (disk_wide.negatives_passed) {
    // A radially symmetric cloud has no pocket for a wide kernel to bridge,
    // so the underfit rejection needs the concave set to show up.
    o.detail += fmt("; note: disk at sigma=1e3 keeps all negatives outside (max gamma %+.1e)",
                    disk_wide.max_gamma);
  }
  return o;
}

// ---- 7: edge test against a convex hull oracle -----------------------------

Outcome check_edge_oracle() {
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> count(3, 30);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);

  int disagreements = 0;
  for (int c = 0; c < 100; ++c) {
    const int k = count(rng);
    Eigen::MatrixXd offsets(k, 2);
    for (int i = 0; i < k; ++i) {
      offsets(i, 0) = coord(rng);
      offsets(i, 1) = coord(rng);
    }
    const bool edge = rom::edge_sv_test(offsets).edge;
    const bool inside = testutil::origin_strictly_inside_hull_2d(offsets);
    if (edge == inside) ++disagreements;  // edge must mean "origin not interior"
  }

  Outcome o;
  o.passed = disagreements == 0;
  o.detail = fmt("%d disagreements over 100 random instances", disagreements);
  return o;
}

// ---- 8: kinematic round trips ----------------------------------------------

Outcome check_kinematics() {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> zy(-179.0, 179.0);
  std::uniform_real_distribution<double> x(-89.0, 89.0);

  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const double z0 = zy(rng), x0 = x(rng), y0 = zy(rng);
    const rom::EulerZxy e = rom::rotmat_to_euler_zxy(rom::compose_zxy(z0, x0, y0));
    worst = std::max({worst, std::abs(rom::wrap_degrees(e.z_deg - z0)),
                      std::abs(rom::wrap_degrees(e.x_deg - x0)),
                      std::abs(rom::wrap_degrees(e.y_deg - y0))});
  }
  const bool round_ok = worst <= 1e-6;

  const rom::KinematicChain chain = rom::KinematicChain::upper_body(rom::Side::right);
  const rom::SkeletonFrame zero =
      rom::synthesize_frame(chain, Eigen::Matrix<double, rom::kArmDofCount, 1>::Zero());
  const rom::JointAngles angles = rom::extract_joint_angles(zero, chain);
  double zero_worst = 0.0;
  for (int d = 0; d < rom::kArmDofCount; ++d) {
    zero_worst = std::max(zero_worst, std::abs(angles.q[d]));
  }
  const bool zero_ok = zero_worst <= 1e-9;

  std::vector<rom::Quaternion> walk;
  walk.push_back(testutil::random_quaternion(rng));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 1; s < 500; ++s) {
    rom::Quaternion q = testutil::random_quaternion(rng);
    if (unit(rng) < 0.5) q = {-q.w, -q.x, -q.y, -q.z};  // adversarial sign flips
    walk.push_back(q);
  }
  const std::vector<rom::Quaternion> aligned = rom::hemisphere_align(walk);
  bool hemi_ok = true;
  for (std::size_t i = 1; i < aligned.size(); ++i) {
    const double dot = aligned[i].w * aligned[i - 1].w + aligned[i].x * aligned[i - 1].x +
                       aligned[i].y * aligned[i - 1].y + aligned[i].z * aligned[i - 1].z;
    hemi_ok = hemi_ok && dot >= 0.0;
  }

  Outcome o;
  o.passed = round_ok && zero_ok && hemi_ok;
  o.detail = fmt("round trip worst %.2e deg over 1000 cases; zero pose worst %.1e deg; "
                 "consecutive quaternion dots %s",
                 worst, zero_worst, hemi_ok ? "all nonnegative" : "NEGATIVE FOUND");
  return o;
}

// ---- 9: sparse operating point ---------------------------------------------

Outcome check_operating_point() {
  rom::ShapeSpec disk;
  disk.kind = rom::ShapeKind::disk;
  disk.a = 170.0;
  const Eigen::MatrixXd train = rom::sample_shape(disk, 2000, 909);

  rom::TrainConfig cfg;
  cfg.nu = 0.0075;
  cfg.sigma = 40.0;
  Outcome o;
  try {
    const rom::TrainResult result = rom::train_ocsvm(train, cfg);
    o.passed = result.model.sv_fraction < 0.05;
    o.detail = fmt("converged in %llu iterations, %d support vectors (fraction %.4f), "
                   "kkt %.1e",
                   static_cast<unsigned long long>(result.diagnostics.iterations),
                   result.model.sv_count(), result.model.sv_fraction,
                   result.diagnostics.kkt_violation);
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail = fmt("training failed: %s", e.what());
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "stored impairment ratios match their volume quotients", check_reference_ratios},
      {2, "nu bounds the outlier fraction above and the support fraction below", check_nu_property},
      {3, "independent KKT certification across 20 seeded datasets", check_kkt},
      {4, "analytic boundary gradient matches central differences", check_gradient},
      {5, "tuned pipeline recovers analytic areas within 10%", check_pipeline_area},
      {6, "constraint filter rejects overfit and underfit kernel widths", check_constraint_filter},
      {7, "edge support vector test agrees with a convex hull oracle", check_edge_oracle},
      {8, "Euler round trips, zero pose and hemisphere continuity", check_kinematics},
      {9, "nu=0.0075 sigma=40 trains sparsely at arm scale", check_operating_point},
  };

  int unexpected = 0;
  int known = 0;
  int passed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = fmt("unhandled exception: %s", e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* verdict = o.passed ? "[PASS]" : "[FAIL]";
    std::printf("%s criterion %d: %s (%s; %.2f s)\n", verdict, c.id, c.label, o.detail.c_str(),
                seconds);
    if (o.passed) {
      ++passed;
    } else if (o.known_discrepancy) {
      ++known;
    } else {
      ++unexpected;
    }
  }
  std::printf("criteria passed: %d/9", passed);
  if (known > 0) {
    std::printf(", known data discrepancies: %d (reported above, not counted as regressions)",
                known);
  }
  if (unexpected > 0) std::printf(", unexpected failures: %d", unexpected);
  std::printf("\n");
  return unexpected;
}
