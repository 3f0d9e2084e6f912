#include "semsteer/optimizer.hpp"

#include <cmath>

#include "semsteer/error.hpp"

namespace semsteer {

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& gradient, AdamState& state,
               const AdamOptions& options) {
  if (gradient.size() != params.size()) fail(ErrorCode::InvalidInput, "adam: gradient length mismatch");
  if (!(options.learning_rate > 0.0)) fail(ErrorCode::InvalidInput, "adam: learning rate must be positive");
  if (state.empty()) {
    state.first_moment = Eigen::VectorXd::Zero(params.size());
    state.second_moment = Eigen::VectorXd::Zero(params.size());
    state.step = 0;
  } else if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    fail(ErrorCode::InvalidInput, "adam: optimizer state does not match parameter count");
  }

  ++state.step;
  state.first_moment = options.beta1 * state.first_moment + (1.0 - options.beta1) * gradient;
  state.second_moment =
      options.beta2 * state.second_moment + (1.0 - options.beta2) * gradient.cwiseProduct(gradient);

  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  const double step_size = options.learning_rate / correction1;
  params.array() -= step_size * state.first_moment.array() /
                    ((state.second_moment.array() / correction2).sqrt() + options.epsilon);
}

}  // namespace semsteer
