#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace semsteer {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment estimates and step count, threaded across calls so
// training can continue incrementally.
struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::uint64_t step = 0;

  bool empty() const noexcept { return first_moment.size() == 0; }
};

// Bias-corrected adaptive-moment update of `params` in place.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& gradient, AdamState& state,
               const AdamOptions& options);

}  // namespace semsteer
