#include "semsteer/encoder.hpp"

#include <cmath>
#include <random>
#include <string>

#include "semsteer/error.hpp"

namespace semsteer {

namespace {

void check_width(const FeatureMatrix& features, const EncoderParams& params) {
  if (static_cast<std::size_t>(features.cols()) != params.input_width()) {
    fail(ErrorCode::InvalidInput, "encoder: feature width " + std::to_string(features.cols()) +
                                      " does not match encoder width " +
                                      std::to_string(params.input_width()));
  }
}

Eigen::MatrixXd hidden_activations(const FeatureMatrix& features, const EncoderWeights& w) {
  Eigen::MatrixXd pre = features * w.w1.transpose();
  pre.rowwise() += w.b1.transpose();
  return pre.array().tanh().matrix();
}

}  // namespace

Eigen::VectorXd EncoderWeights::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index offset = 0;
  auto put = [&](const auto& block) {
    flat.segment(offset, block.size()) = Eigen::Map<const Eigen::VectorXd>(block.data(), block.size());
    offset += block.size();
  };
  put(w1);
  put(b1);
  put(w2);
  put(b2);
  return flat;
}

void EncoderWeights::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    fail(ErrorCode::InvalidInput, "encoder: flat parameter vector has wrong length");
  }
  Eigen::Index offset = 0;
  auto take = [&](auto& block) {
    Eigen::Map<Eigen::VectorXd>(block.data(), block.size()) = flat.segment(offset, block.size());
    offset += block.size();
  };
  take(w1);
  take(b1);
  take(w2);
  take(b2);
}

bool EncoderWeights::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

EncoderWeights EncoderWeights::zeros_like(const EncoderWeights& other) {
  EncoderWeights z;
  z.w1 = Eigen::MatrixXd::Zero(other.w1.rows(), other.w1.cols());
  z.b1 = Eigen::VectorXd::Zero(other.b1.size());
  z.w2 = Eigen::MatrixXd::Zero(other.w2.rows(), other.w2.cols());
  z.b2 = Eigen::VectorXd::Zero(other.b2.size());
  return z;
}

EncoderParams init_encoder(std::size_t input_width, std::size_t hidden_width, std::uint64_t seed) {
  if (input_width == 0 || hidden_width == 0) fail(ErrorCode::InvalidInput, "encoder: widths must be positive");
  const auto m = static_cast<Eigen::Index>(input_width);
  const auto h = static_cast<Eigen::Index>(hidden_width);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(input_width)));

  EncoderParams params;
  params.weights.w1.resize(h, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) params.weights.w1(r, c) = normal(rng);
  }
  params.weights.b1 = Eigen::VectorXd::Zero(h);
  params.weights.w2 = Eigen::MatrixXd::Zero(m, h);
  params.weights.b2 = Eigen::VectorXd::Zero(m);
  return params;
}

FeatureMatrix encode(const FeatureMatrix& features, const EncoderParams& params) {
  check_width(features, params);
  const auto& w = params.weights;
  Eigen::MatrixXd residual = hidden_activations(features, w) * w.w2.transpose();
  residual.rowwise() += w.b2.transpose();
  return features + residual;
}

EncoderWeights encode_gradients(const FeatureMatrix& features, const EncoderParams& params,
                                const Eigen::MatrixXd& upstream) {
  check_width(features, params);
  if (upstream.rows() != features.rows() || upstream.cols() != features.cols()) {
    fail(ErrorCode::InvalidInput, "encode_gradients: upstream gradient shape mismatch");
  }
  const auto& w = params.weights;
  const Eigen::MatrixXd hidden = hidden_activations(features, w);

  EncoderWeights grad;
  grad.w2 = upstream.transpose() * hidden;
  grad.b2 = upstream.colwise().sum().transpose();
  const Eigen::MatrixXd d_hidden = upstream * w.w2;
  const Eigen::MatrixXd d_pre = (d_hidden.array() * (1.0 - hidden.array().square())).matrix();
  grad.w1 = d_pre.transpose() * features;
  grad.b1 = d_pre.colwise().sum().transpose();
  return grad;
}

}  // namespace semsteer
