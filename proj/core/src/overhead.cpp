#include "colcfg/overhead.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "colcfg/errors.hpp"

namespace colcfg {

double OverheadModel::operator()(int from, int to) const {
  if (from == to) return 0.0;
  return std::max(0.0, alpha + beta * std::abs(to - from));
}

OverheadModel learn_overhead(std::span<const OverheadObservation> history) {
  OverheadModel model;
  if (history.size() < OverheadModel::kMinObservations) return model;

  const auto n = static_cast<Eigen::Index>(history.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = history[static_cast<std::size_t>(i)];
    if (!std::isfinite(obs.overhead_s) || obs.overhead_s < 0.0) {
      throw ValidationError("rescale overhead observations must be finite and >= 0");
    }
    design(i, 0) = 1.0;
    design(i, 1) = std::abs(obs.to - obs.from);
    y(i) = obs.overhead_s;
  }
  const Eigen::Vector2d coef = design.completeOrthogonalDecomposition().solve(y);
  model.alpha = coef(0);
  model.beta = coef(1);
  model.from_prior = false;
  return model;
}

}  // namespace colcfg
