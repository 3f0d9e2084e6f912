#include <cmath>
#include <random>

#include "doctest.h"
#include "semsteer/encoder.hpp"
#include "semsteer/error.hpp"
#include "semsteer/optimizer.hpp"
#include "support.hpp"

using namespace semsteer;

namespace {

oracle::Head to_head(const EncoderWeights& w) {
  return {support::to_grid(w.w1), support::to_grid(w.w2), support::to_vector(w.b1), support::to_vector(w.b2)};
}

EncoderParams random_params(std::size_t width, std::size_t hidden, std::mt19937_64& rng, double scale = 0.5) {
  EncoderParams p = init_encoder(width, hidden, rng());
  std::normal_distribution<double> n(0.0, scale);
  for (Eigen::Index k = 0; k < p.weights.w1.size(); ++k) p.weights.w1.data()[k] = n(rng);
  for (Eigen::Index k = 0; k < p.weights.w2.size(); ++k) p.weights.w2.data()[k] = n(rng);
  for (Eigen::Index k = 0; k < p.weights.b1.size(); ++k) p.weights.b1[k] = n(rng);
  for (Eigen::Index k = 0; k < p.weights.b2.size(); ++k) p.weights.b2[k] = n(rng);
  return p;
}

}  // namespace

TEST_SUITE("encoder") {

TEST_CASE("fresh encoder is the identity") {
  std::mt19937_64 rng(1);
  for (int instance = 0; instance < 20; ++instance) {
    const std::size_t n = 1 + rng() % 30, m = 1 + rng() % 40;
    const FeatureMatrix x = support::to_eigen(oracle::random_grid(n, m, rng, -10.0, 10.0));
    const EncoderParams p = init_encoder(m, 1 + rng() % 64, rng());
    const FeatureMatrix out = encode(x, p);
    CHECK(out.rows() == x.rows());
    CHECK(out.cols() == x.cols());
    CHECK(out == x);
    CHECK(p.version == 0);
    CHECK(p.weights.w2.isZero(0.0));
  }
}

TEST_CASE("forward pass matches hand arithmetic") {
  EncoderParams p = init_encoder(2, 3, 0);
  p.weights.w1 << 0.1, -0.2, 0.3, 0.05, -0.4, 0.2;
  p.weights.b1 << 0.01, -0.02, 0.03;
  p.weights.w2 << 0.5, -0.1, 0.2, 0.3, 0.4, -0.6;
  p.weights.b2 << 0.07, -0.03;
  FeatureMatrix x(1, 2);
  x << 0.8, -1.2;

  const double h0 = std::tanh(0.1 * 0.8 - 0.2 * -1.2 + 0.01);
  const double h1 = std::tanh(0.3 * 0.8 + 0.05 * -1.2 - 0.02);
  const double h2 = std::tanh(-0.4 * 0.8 + 0.2 * -1.2 + 0.03);
  const FeatureMatrix out = encode(x, p);
  CHECK(std::abs(out(0, 0) - (0.8 + 0.5 * h0 - 0.1 * h1 + 0.2 * h2 + 0.07)) < 1e-12);
  CHECK(std::abs(out(0, 1) - (-1.2 + 0.3 * h0 + 0.4 * h1 - 0.6 * h2 - 0.03)) < 1e-12);
}

TEST_CASE("forward pass matches the row oracle") {
  std::mt19937_64 rng(2);
  for (int instance = 0; instance < 20; ++instance) {
    const EncoderParams p = random_params(5, 7, rng);
    const auto x = oracle::random_grid(6, 5, rng);
    const FeatureMatrix out = encode(support::to_eigen(x), p);
    const oracle::Head head = to_head(p.weights);
    for (std::size_t r = 0; r < x.size(); ++r) {
      const auto expected = oracle::head_forward(head, x[r]);
      for (std::size_t c = 0; c < 5; ++c) CHECK(std::abs(out(r, c) - expected[c]) < 1e-12);
    }
  }
}

TEST_CASE("width mismatch is rejected") {
  const EncoderParams p = init_encoder(4, 3, 0);
  CHECK_THROWS_AS(encode(FeatureMatrix::Zero(2, 5), p), Error);
  CHECK_THROWS_AS(encode_gradients(FeatureMatrix::Zero(2, 4), p, Eigen::MatrixXd::Zero(3, 4)), Error);
}

TEST_CASE("zero upstream gives zero gradient") {
  std::mt19937_64 rng(3);
  const EncoderParams p = random_params(4, 5, rng);
  const auto g = encode_gradients(support::to_eigen(oracle::random_grid(3, 4, rng)), p, Eigen::MatrixXd::Zero(3, 4));
  CHECK(g.flatten().isZero(0.0));
}

TEST_CASE("final bias gradient at identity init is the summed upstream") {
  std::mt19937_64 rng(4);
  const EncoderParams p = init_encoder(6, 8, 9);
  const Eigen::MatrixXd upstream = support::to_eigen(oracle::random_grid(5, 6, rng));
  const auto g = encode_gradients(support::to_eigen(oracle::random_grid(5, 6, rng)), p, upstream);
  CHECK((g.b2 - upstream.colwise().sum().transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("analytic gradients match central differences") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    const EncoderParams p = random_params(3, 5, rng);
    const FeatureMatrix x = support::to_eigen(oracle::random_grid(4, 3, rng));
    const Eigen::MatrixXd upstream = support::to_eigen(oracle::random_grid(4, 3, rng));
    const auto rows = support::to_grid(x);
    const auto up = support::to_grid(upstream);

    // scalar objective sum(upstream .* encode(x)), evaluated with the oracle
    const auto objective = [&](const std::vector<double>& flat) {
      EncoderWeights w = p.weights;
      w.assign(support::to_eigen(flat));
      const oracle::Head head = to_head(w);
      double total = 0.0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto out = oracle::head_forward(head, rows[r]);
        for (std::size_t c = 0; c < out.size(); ++c) total += up[r][c] * out[c];
      }
      return total;
    };
    const auto numeric = oracle::central_difference(objective, support::to_vector(p.weights.flatten()));
    const auto analytic = support::to_vector(encode_gradients(x, p, upstream).flatten());
    CHECK(oracle::max_relative_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("flatten and assign round-trip") {
  std::mt19937_64 rng(5);
  const EncoderParams p = random_params(4, 6, rng);
  EncoderWeights copy = EncoderWeights::zeros_like(p.weights);
  CHECK(copy.flatten().isZero(0.0));
  copy.assign(p.weights.flatten());
  CHECK(copy.flatten() == p.weights.flatten());
  CHECK(copy.parameter_count() == 6 * 4 + 6 + 4 * 6 + 4);
}

TEST_CASE("encoder init is deterministic in its seed") {
  CHECK(init_encoder(10, 16, 7).weights.flatten() == init_encoder(10, 16, 7).weights.flatten());
  CHECK(init_encoder(10, 16, 7).weights.flatten() != init_encoder(10, 16, 8).weights.flatten());
}

}  // TEST_SUITE

TEST_SUITE("optimizer") {

TEST_CASE("first adam step moves every coordinate by the learning rate") {
  Eigen::VectorXd params(3);
  params << 1.0, -2.0, 0.5;
  Eigen::VectorXd grad(3);
  grad << 0.3, -4.0, 1e-3;
  AdamState state;
  AdamOptions options;
  const Eigen::VectorXd before = params;
  adam_step(params, grad, state, options);
  CHECK(state.step == 1);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const double expected = options.learning_rate * grad[k] / (std::abs(grad[k]) + options.epsilon);
    CHECK(std::abs((before[k] - params[k]) - expected) < 1e-12);
  }
}

TEST_CASE("adam minimizes a quadratic") {
  Eigen::VectorXd params = Eigen::VectorXd::Constant(4, 3.0);
  AdamState state;
  AdamOptions options;
  options.learning_rate = 0.05;
  for (int t = 0; t < 2000; ++t) adam_step(params, 2.0 * params, state, options);
  CHECK(params.cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("zero gradient leaves fresh parameters unchanged") {
  Eigen::VectorXd params = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const Eigen::VectorXd before = params;
  AdamState state;
  adam_step(params, Eigen::VectorXd::Zero(5), state, {});
  CHECK(params == before);
}

}  // TEST_SUITE
