#include "colcfg/nnls.hpp"

#include <cmath>
#include <vector>

#include "colcfg/errors.hpp"

namespace colcfg {

NnlsSolution solve_nnls(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, const NnlsOptions& options) {
  if (design.rows() != target.size()) throw ValidationError("nnls: design/target row mismatch");
  const Eigen::Index n = design.cols();

  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double norm = design.col(j).norm();
    scale[j] = norm > 0.0 ? 1.0 / norm : 0.0;
  }
  const Eigen::MatrixXd x = design * scale.asDiagonal();
  const Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::VectorXd xty = x.transpose() * target;
  const double lipschitz = gram.norm();

  // Evaluated from the residual; the expanded Gram form cancels badly once
  // the fit is near exact.
  auto objective = [&](const Eigen::VectorXd& v) { return 0.5 * (x * v - target).squaredNorm(); };

  NnlsSolution solution;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  if (lipschitz <= 0.0) {
    solution.coefficients = theta;
    solution.objective = objective(theta);
    return solution;
  }

  Eigen::VectorXd momentum_point = theta;
  double t = 1.0;
  double f_prev = objective(theta);
  int iter = 0;
  while (iter < options.max_iterations) {
    ++iter;
    Eigen::VectorXd next = (momentum_point - (gram * momentum_point - xty) / lipschitz).cwiseMax(0.0);
    const double f_next = objective(next);
    if (f_next > f_prev) {
      // Momentum overshot: restart from theta with a plain projected step.
      t = 1.0;
      momentum_point = theta;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    momentum_point = next + ((t - 1.0) / t_next) * (next - theta);
    theta = std::move(next);
    t = t_next;
    const double change = f_prev - f_next;
    f_prev = f_next;
    if (change <= options.relative_tolerance * f_next) break;
  }

  // Polish: exact least squares on the support found above. Kept only when it
  // stays feasible and does not raise the objective, so it can only help.
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (theta[j] > 0.0) support.push_back(j);
  }
  if (!support.empty()) {
    Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = x.col(support[k]);
    const Eigen::VectorXd beta = sub.colPivHouseholderQr().solve(target);
    if (beta.allFinite() && (beta.array() >= 0.0).all()) {
      Eigen::VectorXd polished = Eigen::VectorXd::Zero(n);
      for (std::size_t k = 0; k < support.size(); ++k) polished[support[k]] = beta[static_cast<Eigen::Index>(k)];
      if (objective(polished) <= objective(theta)) theta = std::move(polished);
    }
  }

  // Exact recompute of the objective on the unscaled problem.
  solution.coefficients = scale.asDiagonal() * theta;
  solution.objective = 0.5 * (design * solution.coefficients - target).squaredNorm();
  solution.iterations = iter;
  return solution;
}

NnlsSolution solve_weighted_nnls(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                 const Eigen::VectorXd& weights, const NnlsOptions& options) {
  if (weights.size() != target.size()) throw ValidationError("nnls: weight/target size mismatch");
  if ((weights.array() < 0.0).any()) throw ValidationError("nnls: weights must be non-negative");
  const Eigen::VectorXd root = weights.cwiseSqrt();
  return solve_nnls(root.asDiagonal() * design, root.asDiagonal() * target, options);
}

}  // namespace colcfg
