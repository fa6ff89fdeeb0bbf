#pragma once

#include <Eigen/Dense>

namespace colcfg {

struct NnlsOptions {
  int max_iterations = 10000;
  double relative_tolerance = 1e-10;
};

struct NnlsSolution {
  Eigen::VectorXd coefficients;
  double objective = 0.0;  // 0.5 * ||X theta - y||^2
  int iterations = 0;
};

// min 0.5 * ||X theta - y||^2 subject to theta >= 0.
//
// Projected gradient with step 1/L, L = ||G||_F of the equilibrated Gram
// matrix G, accelerated with Nesterov momentum that restarts whenever the
// objective goes up. Columns are scaled to unit norm first (a positive
// diagonal change of variables, so the constraint set is unchanged); zero
// columns keep a zero coefficient. Stops after max_iterations or when the
// relative objective change falls below relative_tolerance. The result is
// then polished by an exact least-squares solve on its support, accepted only
// if it stays non-negative and does not raise the objective.
NnlsSolution solve_nnls(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, const NnlsOptions& options = {});

// Row i scaled by sqrt(weights[i]). Weights must be non-negative.
NnlsSolution solve_weighted_nnls(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                 const Eigen::VectorXd& weights, const NnlsOptions& options = {});

}  // namespace colcfg
