#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "semsteer/encoder.hpp"
#include "semsteer/geometry.hpp"
#include "semsteer/optimizer.hpp"

namespace semsteer {

// Non-negative per-feature weights summing to the feature width M.
class DimensionWeights {
 public:
  DimensionWeights() = default;

  // w_m = 1 for every dimension.
  static DimensionWeights uniform(std::size_t width);
  // Validates non-negativity and sum == M (relative tolerance 1e-9).
  static DimensionWeights from_values(Eigen::VectorXd values);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::span<const double> span() const noexcept { return {values_.data(), size()}; }
  double operator[](std::size_t m) const { return values_[static_cast<Eigen::Index>(m)]; }

 private:
  explicit DimensionWeights(Eigen::VectorXd values) : values_(std::move(values)) {}
  Eigen::VectorXd values_;
};

// Analyst feedback: the moved documents (dataset row indices) and the target
// low-dimensional distances between every pair of them. Positions are kept
// when the targets were derived from an actual 2-D arrangement.
class InteractionSet {
 public:
  // Positions must lie in [0,1]^2; targets are their Euclidean distances.
  static InteractionSet from_positions(std::vector<std::size_t> documents, Coords2D positions);
  static InteractionSet from_targets(std::vector<std::size_t> documents, DistanceMatrix targets);

  std::size_t size() const noexcept { return documents_.size(); }
  const std::vector<std::size_t>& documents() const noexcept { return documents_; }
  const DistanceMatrix& targets() const noexcept { return targets_; }
  const std::optional<Coords2D>& positions() const noexcept { return positions_; }

 private:
  InteractionSet(std::vector<std::size_t> documents, DistanceMatrix targets,
                 std::optional<Coords2D> positions);

  std::vector<std::size_t> documents_;
  DistanceMatrix targets_;
  std::optional<Coords2D> positions_;
};

// Rows of `features` for the interaction's documents, in interaction order.
// Throws invalid-input when an index is out of range.
FeatureMatrix gather_rows(const FeatureMatrix& features, std::span<const std::size_t> rows);

// --- dimension-weight learner ----------------------------------------------

struct WmdsInverseOptions {
  std::size_t max_iter = 200;
  double tol = 1e-9;  // relative objective decrease that stops iteration
};

// sum_{i<j} (target_ij - weighted_distance(x_i, x_j, w))^2 over moved documents.
double wmds_objective(const InteractionSet& interaction, const FeatureMatrix& features,
                      const DimensionWeights& weights);
Eigen::VectorXd wmds_gradient(const InteractionSet& interaction, const FeatureMatrix& features,
                              const DimensionWeights& weights);

// Euclidean projection onto { w >= 0, sum w = total }.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v, double total);

// Projected gradient descent with backtracking from `initial`. The returned
// objective never exceeds the objective at `initial`.
DimensionWeights wmds_inverse(const InteractionSet& interaction, const FeatureMatrix& features,
                              const DimensionWeights& initial,
                              const WmdsInverseOptions& options = {});

// --- encoder fine-tuning ---------------------------------------------------

// sum_{i<j} (target_ij - ||e_i - e_j||)^2, row r of `moved` belonging to
// interaction document r.
double mdsinv_loss(const InteractionSet& interaction, const FeatureMatrix& moved);
// d loss / d moved, same shape as `moved`.
Eigen::MatrixXd mdsinv_loss_gradient(const InteractionSet& interaction, const FeatureMatrix& moved);

struct FinetuneOptions {
  std::size_t steps = 50;
  double learning_rate = 1e-3;
};

// Runs `options.steps` Adam steps on mdsinv_loss(encode(features[moved])).
// `state` carries the moment estimates between calls. Throws divergence if
// the loss becomes non-finite.
EncoderParams finetune_update(const InteractionSet& interaction, const FeatureMatrix& features,
                              const EncoderParams& params, AdamState& state,
                              const FinetuneOptions& options = {});

}  // namespace semsteer
