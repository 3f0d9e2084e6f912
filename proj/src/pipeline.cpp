#include "semsteer/pipeline.hpp"

#include <utility>

#include "semsteer/error.hpp"

namespace semsteer {

std::string_view to_string(Variant variant) noexcept {
  return variant == Variant::Vanilla ? "vanilla" : "finetune";
}

Variant parse_variant(std::string_view name) {
  if (name == "vanilla") return Variant::Vanilla;
  if (name == "finetune") return Variant::Finetune;
  fail(ErrorCode::InvalidInput, "unknown variant '" + std::string(name) + "' (expected vanilla or finetune)");
}

std::uint64_t encoder_seed(std::uint64_t session_seed) noexcept {
  return session_seed ^ 0x9e3779b97f4a7c15ULL;
}

namespace {

// Learner reset without touching dataset, variant, seed or options.
void init_learner(SessionState& state) {
  const std::size_t width = state.dataset->width();
  state.weights = DimensionWeights::uniform(width);
  state.encoder = init_encoder(width, state.options.hidden_width, encoder_seed(state.seed));
  state.optimizer = AdamState{};
  state.layout = Layout{};
  state.iteration = 0;
}

}  // namespace

SessionState create_session(std::shared_ptr<const Dataset> dataset, Variant variant,
                            std::uint64_t seed, const PipelineOptions& options) {
  if (!dataset) fail(ErrorCode::NotFound, "dataset not found");
  SessionState state;
  state.dataset = std::move(dataset);
  state.variant = variant;
  state.seed = seed;
  state.options = options;
  init_learner(state);
  state.layout = predict_layout(state);
  return state;
}

DistanceMatrix model_distances(const SessionState& state) {
  const FeatureMatrix& features = state.dataset->features();
  if (state.variant == Variant::Vanilla) return weighted_pairwise_distances(features, state.weights.span());
  return pairwise_distances(encode(features, state.encoder));
}

Layout predict_layout(const SessionState& state) {
  MdsOptions mds;
  mds.tol = state.options.mds_tol;
  mds.max_iter = state.options.mds_max_iter;
  mds.seed = state.seed;
  if (state.options.warm_start && state.layout.size() == state.dataset->size()) {
    mds.init = state.layout.coords();
  }
  return normalize_layout(mds_project(model_distances(state), mds).coords);
}

SessionState apply_interaction(const SessionState& state, const InteractionSet& interaction) {
  if (interaction.size() < 2) fail(ErrorCode::InsufficientInteraction, "an interaction needs at least 2 moved documents");
  SessionState next = state;
  const FeatureMatrix& features = state.dataset->features();
  if (state.variant == Variant::Vanilla) {
    next.weights = wmds_inverse(interaction, features, state.weights, state.options.wmds);
  } else {
    next.encoder = finetune_update(interaction, features, state.encoder, next.optimizer, state.options.finetune);
  }
  next.layout = predict_layout(next);
  ++next.iteration;
  return next;
}

SessionState reset_session(const SessionState& state) {
  SessionState fresh = state;
  init_learner(fresh);
  fresh.layout = predict_layout(fresh);
  return fresh;
}

SessionState Session::snapshot() const {
  std::shared_lock lock(state_mutex_);
  return state_;
}

template <typename Fn>
void Session::write(Fn&& transition) {
  std::unique_lock writer(writer_mutex_, std::try_to_lock);
  if (!writer.owns_lock()) fail(ErrorCode::ConcurrentUpdate, "an update is already running for this session");
  SessionState next = transition(snapshot());
  std::unique_lock lock(state_mutex_);
  state_ = std::move(next);
}

void Session::apply(const InteractionSet& interaction) {
  write([&](const SessionState& current) { return apply_interaction(current, interaction); });
}

void Session::reset() {
  write([](const SessionState& current) { return reset_session(current); });
}

}  // namespace semsteer
