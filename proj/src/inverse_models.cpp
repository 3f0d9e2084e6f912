#include "semsteer/inverse_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "semsteer/error.hpp"

namespace semsteer {

namespace {

void validate_documents(const std::vector<std::size_t>& documents) {
  if (documents.size() < 2) {
    fail(ErrorCode::InsufficientInteraction,
         "an interaction needs at least 2 moved documents, got " + std::to_string(documents.size()));
  }
  std::unordered_set<std::size_t> seen;
  for (auto d : documents) {
    if (!seen.insert(d).second) fail(ErrorCode::InvalidInput, "document " + std::to_string(d) + " moved twice");
  }
}

void check_moved_rows(const InteractionSet& interaction, const FeatureMatrix& moved) {
  if (static_cast<std::size_t>(moved.rows()) != interaction.size()) {
    fail(ErrorCode::InvalidInput, "encoded rows (" + std::to_string(moved.rows()) +
                                      ") do not cover the " + std::to_string(interaction.size()) +
                                      " moved documents");
  }
}

// Loss during training; any non-finite value, including distances that
// overflow, is reported as divergence.
double training_loss(const InteractionSet& interaction, const FeatureMatrix& encoded) {
  if (!encoded.allFinite()) fail(ErrorCode::Divergence, "encoder output became non-finite");
  double loss = 0.0;
  try {
    loss = mdsinv_loss(interaction, encoded);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidInput) throw;
    fail(ErrorCode::Divergence, std::string("fine-tuning distances overflowed: ") + e.what());
  }
  if (!std::isfinite(loss)) fail(ErrorCode::Divergence, "fine-tuning loss became non-finite");
  return loss;
}

}  // namespace

DimensionWeights DimensionWeights::uniform(std::size_t width) {
  if (width == 0) fail(ErrorCode::InvalidInput, "dimension weights need a positive width");
  return DimensionWeights(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(width)));
}

DimensionWeights DimensionWeights::from_values(Eigen::VectorXd values) {
  if (values.size() == 0) fail(ErrorCode::InvalidInput, "dimension weights need a positive width");
  if (!values.allFinite() || values.minCoeff() < 0.0) {
    fail(ErrorCode::InvalidInput, "dimension weights must be finite and non-negative");
  }
  const double total = static_cast<double>(values.size());
  if (std::abs(values.sum() - total) > 1e-9 * total) {
    fail(ErrorCode::InvalidInput, "dimension weights must sum to the feature width");
  }
  return DimensionWeights(std::move(values));
}

InteractionSet::InteractionSet(std::vector<std::size_t> documents, DistanceMatrix targets,
                               std::optional<Coords2D> positions)
    : documents_(std::move(documents)), targets_(std::move(targets)), positions_(std::move(positions)) {}

InteractionSet InteractionSet::from_positions(std::vector<std::size_t> documents, Coords2D positions) {
  validate_documents(documents);
  if (static_cast<std::size_t>(positions.rows()) != documents.size()) {
    fail(ErrorCode::InvalidInput, "one position per moved document is required");
  }
  // Layout's constructor enforces the unit square.
  const Layout checked(positions);
  DistanceMatrix targets(documents.size());
  for (std::size_t i = 0; i < documents.size(); ++i) {
    for (std::size_t j = i + 1; j < documents.size(); ++j) {
      targets.set(i, j, std::hypot(checked.x(i) - checked.x(j), checked.y(i) - checked.y(j)));
    }
  }
  return InteractionSet(std::move(documents), std::move(targets), std::move(positions));
}

InteractionSet InteractionSet::from_targets(std::vector<std::size_t> documents, DistanceMatrix targets) {
  validate_documents(documents);
  if (targets.size() != documents.size()) fail(ErrorCode::InvalidInput, "target matrix size does not match moved documents");
  return InteractionSet(std::move(documents), std::move(targets), std::nullopt);
}

FeatureMatrix gather_rows(const FeatureMatrix& features, std::span<const std::size_t> rows) {
  FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= static_cast<std::size_t>(features.rows())) {
      fail(ErrorCode::InvalidInput, "document index " + std::to_string(rows[r]) + " is out of range");
    }
    out.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

// --- dimension-weight learner ----------------------------------------------

double wmds_objective(const InteractionSet& interaction, const FeatureMatrix& features,
                      const DimensionWeights& weights) {
  if (weights.size() != static_cast<std::size_t>(features.cols())) fail(ErrorCode::InvalidInput, "weight width mismatch");
  const FeatureMatrix x = gather_rows(features, interaction.documents());
  const DistanceMatrix high = weighted_pairwise_distances(x, weights.span());
  return stress(interaction.targets(), high);
}

Eigen::VectorXd wmds_gradient(const InteractionSet& interaction, const FeatureMatrix& features,
                              const DimensionWeights& weights) {
  if (weights.size() != static_cast<std::size_t>(features.cols())) fail(ErrorCode::InvalidInput, "weight width mismatch");
  const FeatureMatrix x = gather_rows(features, interaction.documents());
  const DistanceMatrix high = weighted_pairwise_distances(x, weights.span());
  const auto& target = interaction.targets();
  const std::size_t n = interaction.size();

  // d/dw_m (L - H)^2 = -(L - H) * diff_m^2 / H
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double h = high(i, j);
      if (h <= 0.0) continue;
      const double coeff = -(target(i, j) - h) / h;
      if (coeff == 0.0) continue;
      const auto diff = x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j));
      grad += coeff * diff.array().square().matrix().transpose();
    }
  }
  return grad;
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v, double total) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd w = (v.array() - theta).cwiseMax(0.0).matrix();
  // Remove the rounding residue so the sum constraint holds tightly.
  const double sum = w.sum();
  if (sum > 0.0) w *= total / sum;
  return w;
}

DimensionWeights wmds_inverse(const InteractionSet& interaction, const FeatureMatrix& features,
                              const DimensionWeights& initial, const WmdsInverseOptions& options) {
  if (interaction.size() < 2) fail(ErrorCode::InsufficientInteraction, "wmds_inverse needs at least 2 moved documents");
  const double total = static_cast<double>(initial.size());

  DimensionWeights current = initial;
  double objective = wmds_objective(interaction, features, current);
  double step = 0.0;

  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    const Eigen::VectorXd grad = wmds_gradient(interaction, features, current);
    const double grad_max = grad.cwiseAbs().maxCoeff();
    if (grad_max == 0.0) break;
    if (step == 0.0) step = 1.0 / grad_max;

    bool accepted = false;
    DimensionWeights candidate;
    double candidate_objective = objective;
    for (int halving = 0; halving < 60; ++halving) {
      const Eigen::VectorXd proposal = project_to_simplex(current.values() - step * grad, total);
      const double moved_sq = (proposal - current.values()).squaredNorm();
      if (moved_sq == 0.0) break;
      candidate = DimensionWeights::from_values(proposal);
      candidate_objective = wmds_objective(interaction, features, candidate);
      if (candidate_objective <= objective - 1e-4 / step * moved_sq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const double decrease = objective - candidate_objective;
    current = std::move(candidate);
    objective = candidate_objective;
    step *= 2.0;
    if (decrease <= options.tol * std::max(objective + decrease, 1e-300)) break;
  }
  return current;
}

// --- encoder fine-tuning ---------------------------------------------------

double mdsinv_loss(const InteractionSet& interaction, const FeatureMatrix& moved) {
  check_moved_rows(interaction, moved);
  return stress(interaction.targets(), pairwise_distances(moved));
}

Eigen::MatrixXd mdsinv_loss_gradient(const InteractionSet& interaction, const FeatureMatrix& moved) {
  check_moved_rows(interaction, moved);
  const DistanceMatrix high = pairwise_distances(moved);
  const auto& target = interaction.targets();
  const std::size_t n = interaction.size();

  // d/de_i (L - D)^2 = -2 (L - D) (e_i - e_j) / D
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(moved.rows(), moved.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = high(i, j);
      if (d <= 0.0) continue;
      const double coeff = -2.0 * (target(i, j) - d) / d;
      if (coeff == 0.0) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const Eigen::RowVectorXd g = coeff * (moved.row(ii) - moved.row(jj));
      grad.row(ii) += g;
      grad.row(jj) -= g;
    }
  }
  return grad;
}

EncoderParams finetune_update(const InteractionSet& interaction, const FeatureMatrix& features,
                              const EncoderParams& params, AdamState& state,
                              const FinetuneOptions& options) {
  if (interaction.size() < 2) fail(ErrorCode::InsufficientInteraction, "finetune_update needs at least 2 moved documents");
  if (options.steps < 1) fail(ErrorCode::InvalidInput, "finetune_update: steps must be at least 1");
  if (!(options.learning_rate > 0.0)) fail(ErrorCode::InvalidInput, "finetune_update: learning rate must be positive");

  const FeatureMatrix moved = gather_rows(features, interaction.documents());
  const AdamOptions adam{.learning_rate = options.learning_rate};

  EncoderParams updated = params;
  Eigen::VectorXd flat = updated.weights.flatten();
  for (std::size_t s = 0; s < options.steps; ++s) {
    const FeatureMatrix encoded = encode(moved, updated);
    training_loss(interaction, encoded);
    const Eigen::MatrixXd upstream = mdsinv_loss_gradient(interaction, encoded);
    const EncoderWeights grad = encode_gradients(moved, updated, upstream);
    adam_step(flat, grad.flatten(), state, adam);
    updated.weights.assign(flat);
    ++updated.version;
  }
  if (!updated.weights.all_finite()) fail(ErrorCode::Divergence, "encoder parameters became non-finite");
  training_loss(interaction, encode(moved, updated));
  return updated;
}

}  // namespace semsteer
