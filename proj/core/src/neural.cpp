#include "colcfg/neural.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <set>

#include "colcfg/errors.hpp"
#include "colcfg/hash.hpp"

namespace colcfg {

namespace {

std::string bucket(double value) {
  // Half-octave buckets, sign kept.
  const int b = static_cast<int>(std::floor(2.0 * std::log2(std::abs(value) + 1.0)));
  return (value < 0.0 ? "-" : "") + std::to_string(b);
}

Eigen::MatrixXd logistic(const Eigen::MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const double limit = 4.0 * std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

}  // namespace

std::vector<std::string> context_tokens(const ExecutionContext& context) {
  std::set<std::string> tokens;
  tokens.insert("alg=" + context.job.algorithm);
  if (context.job.plan_fingerprint) tokens.insert("plan=" + *context.job.plan_fingerprint);
  for (const auto& [key, value] : context.job.params) {
    if (const auto* number = std::get_if<double>(&value)) {
      tokens.insert("param:" + key + "=" + bucket(*number));
    } else {
      tokens.insert("param:" + key + "=" + std::get<std::string>(value));
    }
  }
  tokens.insert("machine=" + context.machine);
  if (auto dot = context.machine.find('.'); dot != std::string::npos) {
    tokens.insert("family=" + context.machine.substr(0, dot));
    tokens.insert("size=" + context.machine.substr(dot + 1));
  }
  for (const auto& [key, value] : context.sys_config) tokens.insert("sys:" + key + "=" + bucket(value));
  tokens.insert("origin=" + context.origin);
  return {tokens.begin(), tokens.end()};
}

Eigen::VectorXd encode_context(const ExecutionContext& context, std::size_t dim) {
  if (dim == 0) throw ValidationError("encoding dimension must be positive");
  Eigen::VectorXd bits = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& token : context_tokens(context)) bits[static_cast<Eigen::Index>(fnv1a64(token) % dim)] = 1.0;
  return bits;
}

Eigen::MatrixXd AutoencoderParams::encode(const Eigen::MatrixXd& inputs) const {
  return logistic((enc_w * inputs).colwise() + enc_b);
}

Eigen::MatrixXd AutoencoderParams::reconstruct(const Eigen::MatrixXd& inputs) const {
  return logistic((dec_w * encode(inputs)).colwise() + dec_b);
}

AutoencoderParams init_autoencoder(std::size_t input_dim, std::size_t latent_dim, std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(input_dim);
  const auto l = static_cast<Eigen::Index>(latent_dim);
  std::mt19937_64 rng(seed);
  AutoencoderParams p;
  p.enc_w = glorot(l, d, rng);
  p.enc_b = Eigen::VectorXd::Zero(l);
  p.dec_w = glorot(d, l, rng);
  p.dec_b = Eigen::VectorXd::Zero(d);
  return p;
}

double reconstruction_loss(const AutoencoderParams& params, const Eigen::MatrixXd& batch) {
  return (params.reconstruct(batch) - batch).squaredNorm() / static_cast<double>(batch.cols());
}

AutoencoderParams reconstruction_gradient(const AutoencoderParams& params, const Eigen::MatrixXd& batch) {
  const double n = static_cast<double>(batch.cols());
  const Eigen::MatrixXd hidden = params.encode(batch);
  const Eigen::MatrixXd out = logistic((params.dec_w * hidden).colwise() + params.dec_b);

  const Eigen::MatrixXd d_out = ((2.0 / n) * (out - batch)).cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix()));
  const Eigen::MatrixXd d_hidden =
      (params.dec_w.transpose() * d_out).cwiseProduct(hidden.cwiseProduct((1.0 - hidden.array()).matrix()));

  AutoencoderParams g;
  g.dec_w = d_out * hidden.transpose();
  g.dec_b = d_out.rowwise().sum();
  g.enc_w = d_hidden * batch.transpose();
  g.enc_b = d_hidden.rowwise().sum();
  return g;
}

AutoencoderFit train_autoencoder(const std::vector<Eigen::VectorXd>& vectors, const AutoencoderOptions& options) {
  if (vectors.empty()) throw UndertrainedError("autoencoder: no input vectors");
  const auto dim = vectors.front().size();
  std::vector<std::vector<double>> distinct;
  for (const auto& v : vectors) {
    if (v.size() != dim) throw ValidationError("autoencoder: input vectors differ in dimension");
    std::vector<double> key(v.data(), v.data() + v.size());
    if (std::find(distinct.begin(), distinct.end(), key) == distinct.end()) distinct.push_back(std::move(key));
  }
  AutoencoderFit fit;
  fit.degenerate = distinct.size() == 1;
  if (fit.degenerate) {
    std::cerr << "warning: autoencoder input vectors are all identical; fit is trivial\n";
  } else if (distinct.size() < 8) {
    throw UndertrainedError("autoencoder: needs at least 8 distinct vectors, got " + std::to_string(distinct.size()));
  }

  Eigen::MatrixXd batch(dim, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) batch.col(static_cast<Eigen::Index>(i)) = vectors[i];

  fit.params = init_autoencoder(static_cast<std::size_t>(dim), options.latent_dim, options.seed);
  const Eigen::VectorXd mean = batch.rowwise().mean().cwiseMax(1e-3).cwiseMin(1.0 - 1e-3);
  fit.params.dec_b = (mean.array() / (1.0 - mean.array())).log().matrix();

  fit.loss_history.reserve(static_cast<std::size_t>(options.epochs) + 1);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    fit.loss_history.push_back(reconstruction_loss(fit.params, batch));
    const auto g = reconstruction_gradient(fit.params, batch);
    fit.params.enc_w -= options.learning_rate * g.enc_w;
    fit.params.enc_b -= options.learning_rate * g.enc_b;
    fit.params.dec_w -= options.learning_rate * g.dec_w;
    fit.params.dec_b -= options.learning_rate * g.dec_b;
  }
  fit.loss_history.push_back(reconstruction_loss(fit.params, batch));
  return fit;
}

HeadParams init_head(std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const auto h = static_cast<Eigen::Index>(hidden_dim);
  HeadParams p;
  p.w1 = glorot(h, static_cast<Eigen::Index>(input_dim), rng) / 4.0;
  p.b1 = Eigen::VectorXd::Zero(h);
  p.w2 = glorot(h, 1, rng).col(0) / 4.0;
  p.b2 = 0.0;
  return p;
}

namespace {

struct HeadActivations {
  Eigen::MatrixXd latent;  // L x N
  Eigen::MatrixXd input;   // (L + 4) x N
  Eigen::MatrixXd hidden;  // H x N
  Eigen::VectorXd output;  // N
};

HeadActivations forward(const NeuralParams& params, const Eigen::MatrixXd& encodings, const Eigen::MatrixXd& features) {
  HeadActivations a;
  a.latent = params.autoencoder.encode(encodings);
  a.input.resize(a.latent.rows() + features.rows(), encodings.cols());
  a.input << a.latent, features;
  a.hidden = logistic((params.head.w1 * a.input).colwise() + params.head.b1);
  a.output = (params.head.w2.transpose() * a.hidden).transpose().array() + params.head.b2;
  return a;
}

}  // namespace

Eigen::VectorXd head_forward(const NeuralParams& params, const Eigen::MatrixXd& encodings,
                             const Eigen::MatrixXd& features) {
  return forward(params, encodings, features).output;
}

double regression_loss(const NeuralParams& params, const RegressionBatch& batch) {
  const auto out = head_forward(params, batch.encodings, batch.features);
  return (out - batch.targets).squaredNorm() / static_cast<double>(batch.targets.size());
}

RegressionGradient regression_gradient(const NeuralParams& params, const RegressionBatch& batch) {
  const double n = static_cast<double>(batch.targets.size());
  const auto a = forward(params, batch.encodings, batch.features);
  const Eigen::VectorXd d_out = (2.0 / n) * (a.output - batch.targets);

  RegressionGradient g;
  g.head.w2 = a.hidden * d_out;
  g.head.b2 = d_out.sum();
  const Eigen::MatrixXd d_hidden =
      (params.head.w2 * d_out.transpose()).cwiseProduct(a.hidden.cwiseProduct((1.0 - a.hidden.array()).matrix()));
  g.head.w1 = d_hidden * a.input.transpose();
  g.head.b1 = d_hidden.rowwise().sum();

  const auto l = a.latent.rows();
  const Eigen::MatrixXd d_latent = (params.head.w1.leftCols(l).transpose() * d_hidden)
                                       .cwiseProduct(a.latent.cwiseProduct((1.0 - a.latent.array()).matrix()));
  g.enc_w = d_latent * batch.encodings.transpose();
  g.enc_b = d_latent.rowwise().sum();
  return g;
}

}  // namespace colcfg
