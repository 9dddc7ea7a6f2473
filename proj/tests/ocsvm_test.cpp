#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "rom/dataset.hpp"
#include "rom/errors.hpp"
#include "rom/ocsvm.hpp"
#include "testutil.hpp"

using namespace rom;

namespace {

Eigen::MatrixXd disk_data(int m, double radius, std::uint64_t seed) {
  ShapeSpec disk;
  disk.kind = ShapeKind::disk;
  disk.a = radius;
  return sample_shape(disk, m, seed);
}

// Reference KKT measure, recomputed from scratch: with g = K alpha, a
// converged solution has max_{alpha_i > 0} g_i - min_{alpha_i < C} g_i <= tol.
double pair_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& alpha, double sigma,
                      double C) {
  const int m = static_cast<int>(X.rows());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (alpha[j] > 0.0) {
        g[i] += alpha[j] * rbf_kernel(X.row(i).transpose(), X.row(j).transpose(), sigma);
      }
    }
  }
  double up = -std::numeric_limits<double>::infinity();
  double dn = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    if (alpha[i] > 0.0) up = std::max(up, g[i]);
    if (alpha[i] < C) dn = std::min(dn, g[i]);
  }
  return up - dn;
}

Eigen::VectorXd full_alpha(const TrainResult& r, int m) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < r.diagnostics.sv_indices.size(); ++k) {
    alpha[r.diagnostics.sv_indices[k]] = r.model.alphas[static_cast<Eigen::Index>(k)];
  }
  return alpha;
}

}  // namespace

TEST_SUITE_BEGIN("ocsvm");

TEST_CASE("rbf kernel hits the e^-1 landmark and validates input") {
  const double sigma = 7.0;
  Eigen::VectorXd a(2), b(2);
  a << 0.0, 0.0;
  b << sigma * std::sqrt(2.0), 0.0;
  CHECK(rbf_kernel(a, b, sigma) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(rbf_kernel(a, a, sigma) == doctest::Approx(1.0));

  Eigen::VectorXd c(3);
  c.setZero();
  CHECK_THROWS_AS(rbf_kernel(a, c, sigma), std::invalid_argument);
  CHECK_THROWS_AS(rbf_kernel(a, b, 0.0), std::invalid_argument);
}

TEST_CASE("gram matrix is positive semidefinite") {
  const Eigen::MatrixXd X = disk_data(150, 40.0, 31);
  Eigen::MatrixXd K(X.rows(), X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
      K(i, j) = rbf_kernel(X.row(i).transpose(), X.row(j).transpose(), 15.0);
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("two distinct points at nu = 1 split the weight evenly") {
  Eigen::MatrixXd X(2, 2);
  X << 0.0, 0.0, 10.0, 0.0;
  TrainConfig cfg;
  cfg.nu = 1.0;
  cfg.sigma = 8.0;
  const TrainResult r = train_ocsvm(X, cfg);
  REQUIRE(r.model.sv_count() == 2);
  CHECK(r.model.alphas[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.model.alphas[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.model.sv_fraction == doctest::Approx(1.0));
  // both points sit exactly on the boundary of the learned region
  CHECK(r.model.gamma(X.row(0).transpose()) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("training rejects bad input") {
  TrainConfig cfg;
  CHECK_THROWS_AS(train_ocsvm(Eigen::MatrixXd(0, 2), cfg), SchemaError);
  CHECK_THROWS_AS(train_ocsvm(Eigen::MatrixXd::Constant(5, 2, 3.0), cfg), SchemaError);

  Eigen::MatrixXd nonfinite = Eigen::MatrixXd::Zero(3, 2);
  nonfinite(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train_ocsvm(nonfinite, cfg), SchemaError);

  Eigen::MatrixXd ok = disk_data(60, 10.0, 1);
  TrainConfig bad = cfg;
  bad.nu = 0.0;
  CHECK_THROWS_AS(train_ocsvm(ok, bad), std::invalid_argument);
  bad.nu = 1.5;
  CHECK_THROWS_AS(train_ocsvm(ok, bad), std::invalid_argument);
  bad = cfg;
  bad.sigma = -1.0;
  CHECK_THROWS_AS(train_ocsvm(ok, bad), std::invalid_argument);
}

TEST_CASE("nu bounds outliers from above and support vectors from below") {
  const Eigen::MatrixXd X = disk_data(400, 30.0, 17);
  for (const double nu : {0.02, 0.1, 0.3}) {
    TrainConfig cfg;
    cfg.nu = nu;
    cfg.sigma = 12.0;
    const TrainResult r = train_ocsvm(X, cfg);
    // Any point more than the stopping tolerance below the boundary must be
    // a bounded support vector, and those cannot number more than nu * m.
    // Points within the tolerance band can be free vectors, so they do not
    // count against the bound.
    int outliers = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (r.model.gamma(X.row(i).transpose()) < -cfg.tolerance) ++outliers;
    }
    const double m = static_cast<double>(X.rows());
    CAPTURE(nu);
    CHECK(outliers / m <= nu + 1e-9);
    CHECK(r.model.sv_fraction >= nu - 1e-9);
  }
}

TEST_CASE("solutions satisfy the kkt conditions under independent recomputation") {
  std::mt19937_64 seeds(23);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd X = disk_data(200, 25.0, seeds());
    TrainConfig cfg;
    cfg.nu = 0.08;
    cfg.sigma = 10.0;
    const TrainResult r = train_ocsvm(X, cfg);
    const double C = 1.0 / (cfg.nu * static_cast<double>(X.rows()));
    const Eigen::VectorXd alpha = full_alpha(r, static_cast<int>(X.rows()));
    CHECK(std::abs(alpha.sum() - 1.0) < 1e-12);
    CHECK(alpha.maxCoeff() <= C + 1e-15);
    CHECK(pair_violation(X, alpha, cfg.sigma, C) <= cfg.tolerance);

    // classification form: bounded SVs inside-or-on, free SVs on the
    // boundary, non-SVs outside-or-on, all up to the solver tolerance
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double gi = r.model.gamma(X.row(i).transpose());
      if (alpha[i] >= C) {
        CHECK(gi <= cfg.tolerance);
      } else if (alpha[i] > 0.0) {
        CHECK(std::abs(gi) <= cfg.tolerance);
      } else {
        CHECK(gi >= -cfg.tolerance);
      }
    }
  }
}

TEST_CASE("training is deterministic") {
  const Eigen::MatrixXd X = disk_data(250, 20.0, 5);
  TrainConfig cfg;
  cfg.nu = 0.05;
  cfg.sigma = 9.0;
  const TrainResult a = train_ocsvm(X, cfg);
  const TrainResult b = train_ocsvm(X, cfg);
  CHECK(a.diagnostics.iterations == b.diagnostics.iterations);
  CHECK(a.model.rho == b.model.rho);
  CHECK((a.model.alphas.array() == b.model.alphas.array()).all());
  CHECK(a.diagnostics.sv_indices == b.diagnostics.sv_indices);
}

TEST_CASE("a starving kernel cache does not change the solution") {
  const Eigen::MatrixXd X = disk_data(250, 20.0, 5);
  TrainConfig cfg;
  cfg.nu = 0.05;
  cfg.sigma = 9.0;
  const TrainResult big = train_ocsvm(X, cfg);
  cfg.cache_bytes = 0;  // degenerates to the two-row minimum
  const TrainResult small = train_ocsvm(X, cfg);
  CHECK((big.model.alphas.array() == small.model.alphas.array()).all());
  CHECK(big.model.rho == small.model.rho);
}

TEST_CASE("iteration cap raises a convergence error with diagnostics") {
  const Eigen::MatrixXd X = disk_data(300, 30.0, 9);
  TrainConfig cfg;
  cfg.nu = 0.2;
  cfg.sigma = 5.0;
  cfg.max_iterations = 3;
  try {
    train_ocsvm(X, cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.kkt_violation() > cfg.tolerance);
  }
}

TEST_CASE("translation equivariance of the learned boundary") {
  const Eigen::MatrixXd X = disk_data(200, 15.0, 41);
  TrainConfig cfg;
  cfg.nu = 0.1;
  cfg.sigma = 6.0;
  const OcsvmModel base = train_ocsvm(X, cfg).model;

  Eigen::RowVector2d shift(720.0, -1080.0);
  const OcsvmModel moved = train_ocsvm(X.rowwise() + shift, cfg).model;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector2d q(u(rng), u(rng));
    const Eigen::Vector2d q_shifted = q + shift.transpose();
    // the two runs see almost identical kernels, so the boundaries agree to
    // the solver tolerance
    CHECK(base.gamma(q) == doctest::Approx(moved.gamma(q_shifted)).epsilon(1e-6));
  }
}

TEST_CASE("gamma far from all data approaches minus rho") {
  const Eigen::MatrixXd X = disk_data(150, 10.0, 3);
  TrainConfig cfg;
  cfg.nu = 0.1;
  cfg.sigma = 5.0;
  const OcsvmModel m = train_ocsvm(X, cfg).model;
  CHECK(m.rho > 0.0);
  Eigen::Vector2d far(4000.0, -4000.0);
  CHECK(m.gamma(far) == doctest::Approx(-m.rho).epsilon(1e-12));
  CHECK(m.classify(far) == Region::outside);
}

TEST_CASE("classify respects the boundary band") {
  Eigen::MatrixXd sv(1, 2);
  sv << 0.0, 0.0;
  Eigen::VectorXd alpha(1);
  alpha << 1.0;
  // rho = e^-1/2: the boundary circle has radius sigma
  const double sigma = 10.0;
  const OcsvmModel m = testutil::make_model(sv, alpha, sigma, std::exp(-0.5));
  CHECK(m.classify(Eigen::Vector2d(0.0, 0.0)) == Region::inside);
  CHECK(m.classify(Eigen::Vector2d(3.0 * sigma, 0.0)) == Region::outside);
  CHECK(m.classify(Eigen::Vector2d(sigma, 0.0), 1e-12) == Region::boundary);
  CHECK(m.contains(Eigen::Vector2d(0.5 * sigma, 0.0)));
  CHECK_THROWS_AS(m.classify(Eigen::Vector2d(0.0, 0.0), -1.0), std::invalid_argument);
}

TEST_CASE("analytic gradient matches the single support vector closed form") {
  Eigen::MatrixXd sv(1, 2);
  sv << 0.0, 0.0;
  Eigen::VectorXd alpha(1);
  alpha << 1.0;
  const double sigma = 11.0;
  const OcsvmModel m = testutil::make_model(sv, alpha, sigma, 0.2);
  const Eigen::VectorXd g = m.gamma_gradient(Eigen::Vector2d(sigma, 0.0));
  CHECK(g[0] == doctest::Approx(-std::exp(-0.5) / sigma).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.0));
}

TEST_CASE("analytic gradient agrees with central differences") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::uniform_real_distribution<double> us(4.0, 40.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int nsv = 1 + static_cast<int>(rng() % 20);
    Eigen::MatrixXd sv(nsv, 3);
    for (int i = 0; i < nsv; ++i) sv.row(i) << u(rng), u(rng), u(rng);
    Eigen::VectorXd alpha(nsv);
    for (int i = 0; i < nsv; ++i) alpha[i] = 0.05 + std::abs(u(rng));
    const OcsvmModel m = testutil::make_model(sv, alpha, us(rng), 0.3);
    const Eigen::VectorXd q = Eigen::Vector3d(u(rng), u(rng), u(rng));
    const Eigen::VectorXd a = m.gamma_gradient(q);
    const Eigen::VectorXd fd = testutil::fd_gradient(m, q, 1e-3);
    const double tol = std::max(1e-6, 1e-4 * a.norm());
    CHECK((a - fd).cwiseAbs().maxCoeff() <= tol);
  }
}

TEST_CASE("batch evaluation equals the scalar path") {
  const Eigen::MatrixXd X = disk_data(100, 12.0, 8);
  TrainConfig cfg;
  cfg.nu = 0.1;
  cfg.sigma = 6.0;
  const OcsvmModel m = train_ocsvm(X, cfg).model;
  const Eigen::VectorXd batch = m.gamma_rows(X);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    CHECK(batch[i] == m.gamma(X.row(i).transpose()));
  }
}

TEST_CASE("model json round-trips exactly") {
  const Eigen::MatrixXd X = disk_data(120, 18.0, 13);
  TrainConfig cfg;
  cfg.nu = 0.07;
  cfg.sigma = 7.5;
  OcsvmModel m = train_ocsvm(X, cfg).model;
  m.dofs = {"elbow_flex_ext", "elbow_sup_pron"};

  const OcsvmModel back = OcsvmModel::from_json(m.to_json());
  CHECK((back.support_vectors.array() == m.support_vectors.array()).all());
  CHECK((back.alphas.array() == m.alphas.array()).all());
  CHECK(back.rho == m.rho);
  CHECK(back.sigma == m.sigma);
  CHECK(back.nu == m.nu);
  CHECK(back.training_count == m.training_count);
  CHECK(back.dofs == m.dofs);

  // save/load goes through a file but must stay just as faithful
  testutil::TempDir tmp;
  m.save(tmp.file("model.json"));
  const OcsvmModel loaded = OcsvmModel::load(tmp.file("model.json"));
  CHECK(loaded.rho == m.rho);
  CHECK((loaded.alphas.array() == m.alphas.array()).all());
}

TEST_CASE("model json schema violations are rejected") {
  Eigen::MatrixXd sv(1, 2);
  sv << 1.0, 2.0;
  Eigen::VectorXd alpha(1);
  alpha << 1.0;
  const OcsvmModel m = testutil::make_model(sv, alpha, 5.0, 0.1);
  const std::string good = m.to_json();

  CHECK_THROWS_AS(OcsvmModel::from_json("{"), SchemaError);
  CHECK_THROWS_AS(OcsvmModel::from_json("{}"), SchemaError);

  // version mismatch
  {
    auto j = nlohmann::json::parse(good);
    j["version"] = "99.0.0";
    CHECK_THROWS_AS(OcsvmModel::from_json(j.dump()), SchemaError);
  }

  // missing field
  {
    auto j = nlohmann::json::parse(good);
    j.erase("rho");
    CHECK_THROWS_AS(OcsvmModel::from_json(j.dump()), SchemaError);
  }

  // weight count disagrees with the support vectors
  OcsvmModel broken = m;
  broken.alphas.resize(2);
  broken.alphas << 0.5, 0.5;
  CHECK_THROWS_AS(broken.validate(), SchemaError);

  OcsvmModel skewed = m;
  skewed.alphas[0] = 0.8;  // no longer sums to 1
  CHECK_THROWS_AS(skewed.validate(), SchemaError);
}

TEST_SUITE_END();
