#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "colcfg/features.hpp"
#include "colcfg/nnls.hpp"

using namespace colcfg;

namespace {

Eigen::MatrixXd scale_out_design(const std::vector<int>& scale_outs, double data_gb) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(scale_outs.size()), 4);
  for (std::size_t i = 0; i < scale_outs.size(); ++i) {
    const auto f = featurize(scale_outs[i], data_gb);
    for (int j = 0; j < 4; ++j) x(static_cast<Eigen::Index>(i), j) = f[static_cast<std::size_t>(j)];
  }
  return x;
}

std::vector<int> twenty_scale_outs() {
  std::vector<int> s;
  for (int i = 0; i < 20; ++i) s.push_back(4 + static_cast<int>(std::lround(i * 32.0 / 19.0)));
  return s;
}

// Brute force: the NNLS optimum is the unconstrained least-squares solution
// on some support with all entries >= 0. Try all 2^p supports.
Eigen::VectorXd exhaustive_nnls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto p = x.cols();
  Eigen::VectorXd best = Eigen::VectorXd::Zero(p);
  double best_f = 0.5 * y.squaredNorm();
  for (int mask = 1; mask < (1 << p); ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (mask & (1 << j)) cols.push_back(j);
    }
    Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = x.col(cols[k]);
    const Eigen::VectorXd beta = sub.colPivHouseholderQr().solve(y);
    if ((beta.array() < 0.0).any()) continue;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
    for (std::size_t k = 0; k < cols.size(); ++k) full(cols[k]) = beta(static_cast<Eigen::Index>(k));
    const double f = 0.5 * (x * full - y).squaredNorm();
    if (f < best_f) {
      best_f = f;
      best = full;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("nnls") {
  TEST_CASE("planted noiseless scale-out model is recovered within 1e-4") {
    const auto s = twenty_scale_outs();
    const auto x = scale_out_design(s, 50.0);
    Eigen::Vector4d truth(10.0, 100.0, 5.0, 0.0);
    const Eigen::VectorXd y = x * truth;
    const auto sol = solve_nnls(x, y);
    CHECK((sol.coefficients - truth).cwiseAbs().maxCoeff() < 1e-4);
    CHECK((sol.coefficients.array() >= 0.0).all());
    CHECK(sol.iterations <= NnlsOptions{}.max_iterations);
  }

  TEST_CASE("constant runtimes with no data give a pure intercept") {
    const auto x = scale_out_design(twenty_scale_outs(), 0.0);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(x.rows(), 42.0);
    const auto sol = solve_nnls(x, y);
    CHECK(sol.coefficients(0) == doctest::Approx(42.0).epsilon(1e-6));
    CHECK(std::abs(sol.coefficients(1)) < 1e-6);
    CHECK(std::abs(sol.coefficients(2)) < 1e-6);
    CHECK(std::abs(sol.coefficients(3)) < 1e-6);
  }

  TEST_CASE("a negative true coefficient is clamped and costs residual") {
    const auto x = scale_out_design(twenty_scale_outs(), 50.0);
    Eigen::Vector4d truth(10.0, 100.0, -3.0, 0.0);
    const Eigen::VectorXd y = x * truth;
    const auto sol = solve_nnls(x, y);
    CHECK((sol.coefficients.array() >= 0.0).all());
    CHECK(sol.coefficients(2) == doctest::Approx(0.0).epsilon(1e-8));
    // Unconstrained normal-equations oracle.
    const Eigen::VectorXd ls = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    CHECK((x * sol.coefficients - y).norm() >= (x * ls - y).norm() - 1e-9);
    CHECK(sol.objective == doctest::Approx(0.5 * (x * sol.coefficients - y).squaredNorm()).epsilon(1e-9));
  }

  TEST_CASE("matches the exhaustive-support oracle on random problems") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::MatrixXd x(12, 4);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = u(rng);
      }
      Eigen::VectorXd y(12);
      for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = 3.0 * u(rng);
      const auto oracle = exhaustive_nnls(x, y);
      const auto sol = solve_nnls(x, y);
      REQUIRE((sol.coefficients.array() >= 0.0).all());
      CHECK((sol.coefficients - oracle).cwiseAbs().maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("weighted NNLS") {
    const auto x = scale_out_design(twenty_scale_outs(), 50.0);
    Eigen::Vector4d truth(10.0, 100.0, 5.0, 0.0);
    Eigen::VectorXd y = x * truth;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(y.size());
    CHECK((solve_weighted_nnls(x, y, ones).coefficients - solve_nnls(x, y).coefficients).norm() < 1e-9);

    // Corrupt a row and give it zero weight: the clean fit comes back.
    y(3) += 500.0;
    Eigen::VectorXd w = ones;
    w(3) = 0.0;
    CHECK((solve_weighted_nnls(x, y, w).coefficients - truth).cwiseAbs().maxCoeff() < 1e-4);
  }
}
