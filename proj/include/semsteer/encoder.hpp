#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace semsteer {

// One document per row; fixed pretrained features or tuned representations.
using FeatureMatrix = Eigen::MatrixXd;

// Weights of the residual head  out = x + W2 tanh(W1 x + b1) + b2.
// Also used as the container for gradients of the same shape.
struct EncoderWeights {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // input x hidden
  Eigen::VectorXd b2;  // input

  std::size_t input_width() const noexcept { return static_cast<std::size_t>(w1.cols()); }
  std::size_t hidden_width() const noexcept { return static_cast<std::size_t>(w1.rows()); }
  std::size_t parameter_count() const noexcept {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
  }

  // Concatenation w1 | b1 | w2 | b2, each in Eigen's column-major order.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

  bool all_finite() const;
  static EncoderWeights zeros_like(const EncoderWeights& other);
};

struct EncoderParams {
  EncoderWeights weights;
  // Number of optimizer steps applied since initialization.
  std::uint64_t version = 0;

  std::size_t input_width() const noexcept { return weights.input_width(); }
  std::size_t hidden_width() const noexcept { return weights.hidden_width(); }
};

inline constexpr std::size_t kDefaultHiddenWidth = 128;

// W1 ~ N(0, 1/input_width) drawn from `seed`; b1, W2, b2 zero, so the
// residual branch is exactly zero and encode() returns its input unchanged.
EncoderParams init_encoder(std::size_t input_width, std::size_t hidden_width, std::uint64_t seed);

FeatureMatrix encode(const FeatureMatrix& features, const EncoderParams& params);

// Parameter gradient of sum(upstream .* encode(features, params)).
EncoderWeights encode_gradients(const FeatureMatrix& features, const EncoderParams& params,
                                const Eigen::MatrixXd& upstream);

}  // namespace semsteer
