#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "colcfg/types.hpp"

namespace colcfg {

inline constexpr std::size_t kDefaultEncodingDim = 64;
inline constexpr std::size_t kDefaultLatentDim = 8;
inline constexpr std::size_t kDefaultHiddenDim = 16;

// Descriptive tokens of a context: algorithm, param keys with bucketed
// values, machine name/family/size, sys_config keys with buckets, origin.
// Sorted and unique.
std::vector<std::string> context_tokens(const ExecutionContext& context);

// Binary feature-hashed vector: bit fnv1a64(token) mod dim is set per token.
Eigen::VectorXd encode_context(const ExecutionContext& context, std::size_t dim = kDefaultEncodingDim);

// D -> L -> D, logistic activations on both layers.
struct AutoencoderParams {
  Eigen::MatrixXd enc_w;  // L x D
  Eigen::VectorXd enc_b;  // L
  Eigen::MatrixXd dec_w;  // D x L
  Eigen::VectorXd dec_b;  // D

  std::size_t input_dim() const { return static_cast<std::size_t>(enc_w.cols()); }
  std::size_t latent_dim() const { return static_cast<std::size_t>(enc_w.rows()); }

  // Column-wise: input D x N -> latent L x N.
  Eigen::MatrixXd encode(const Eigen::MatrixXd& inputs) const;
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& inputs) const;
};

AutoencoderParams init_autoencoder(std::size_t input_dim, std::size_t latent_dim, std::uint64_t seed);

// Mean over columns of the squared reconstruction error summed over rows.
double reconstruction_loss(const AutoencoderParams& params, const Eigen::MatrixXd& batch);

// Analytic gradient of reconstruction_loss, same layout as the params.
AutoencoderParams reconstruction_gradient(const AutoencoderParams& params, const Eigen::MatrixXd& batch);

struct AutoencoderOptions {
  std::size_t latent_dim = kDefaultLatentDim;
  int epochs = 2000;
  double learning_rate = 0.5;
  std::uint64_t seed = 42;
};

struct AutoencoderFit {
  AutoencoderParams params;
  std::vector<double> loss_history;  // loss before each epoch, then the final loss
  bool degenerate = false;           // all inputs identical; params only fit the one vector
  double initial_loss() const { return loss_history.front(); }
  double final_loss() const { return loss_history.back(); }
};

// Full-batch gradient descent. Needs >= 8 distinct vectors unless every
// vector is identical (then `degenerate` is set and a warning is logged).
AutoencoderFit train_autoencoder(const std::vector<Eigen::VectorXd>& vectors, const AutoencoderOptions& options);

// latent (L) ++ standardized scale-out features (4) -> hidden (logistic)
// -> linear output in standardized log-runtime space.
struct HeadParams {
  Eigen::MatrixXd w1;  // H x (L + 4)
  Eigen::VectorXd b1;  // H
  Eigen::VectorXd w2;  // H
  double b2 = 0.0;
};

HeadParams init_head(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed);

struct NeuralParams {
  std::uint64_t seed = 42;
  AutoencoderParams autoencoder;
  HeadParams head;
  Eigen::Vector4d feature_mean = Eigen::Vector4d::Zero();
  Eigen::Vector4d feature_scale = Eigen::Vector4d::Ones();
  double target_mean = 0.0;  // of log(runtime_s)
  double target_scale = 1.0;

  std::size_t hidden_dim() const { return static_cast<std::size_t>(head.w1.rows()); }
};

// One training batch in model space.
struct RegressionBatch {
  Eigen::MatrixXd encodings;  // D x N, binary
  Eigen::MatrixXd features;   // 4 x N, standardized
  Eigen::VectorXd targets;    // N, standardized log-runtime
};

// Standardized log-runtime prediction per column.
Eigen::VectorXd head_forward(const NeuralParams& params, const Eigen::MatrixXd& encodings,
                             const Eigen::MatrixXd& features);

// Mean squared error over the batch.
double regression_loss(const NeuralParams& params, const RegressionBatch& batch);

struct RegressionGradient {
  Eigen::MatrixXd enc_w;
  Eigen::VectorXd enc_b;
  HeadParams head;
};

RegressionGradient regression_gradient(const NeuralParams& params, const RegressionBatch& batch);

}  // namespace colcfg
