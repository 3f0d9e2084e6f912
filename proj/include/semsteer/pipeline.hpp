#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string_view>

#include "semsteer/dataset.hpp"
#include "semsteer/encoder.hpp"
#include "semsteer/geometry.hpp"
#include "semsteer/inverse_models.hpp"
#include "semsteer/optimizer.hpp"

namespace semsteer {

enum class Variant {
  Vanilla,   // dimension weights over fixed pretrained features
  Finetune,  // trainable encoder head, unweighted projection
};

std::string_view to_string(Variant variant) noexcept;
// Accepts "vanilla" or "finetune"; throws invalid-input otherwise.
Variant parse_variant(std::string_view name);

struct PipelineOptions {
  double mds_tol = 1e-6;
  std::size_t mds_max_iter = 300;
  bool warm_start = true;
  std::size_t hidden_width = kDefaultHiddenWidth;
  FinetuneOptions finetune;
  WmdsInverseOptions wmds;
};

// Everything one semantic-interaction loop carries between iterations.
// Plain value: copying it snapshots the session.
struct SessionState {
  std::shared_ptr<const Dataset> dataset;
  Variant variant = Variant::Finetune;
  std::uint64_t seed = 0;
  PipelineOptions options;

  DimensionWeights weights;  // vanilla learner
  EncoderParams encoder;     // finetune learner
  AdamState optimizer;       // finetune optimizer state

  Layout layout;
  std::size_t iteration = 0;
};

// Seed used for the encoder's hidden-layer initialization.
std::uint64_t encoder_seed(std::uint64_t session_seed) noexcept;

// Fresh learner (uniform weights or identity encoder) and its initial layout.
// Both variants produce the same initial layout for the same seed.
SessionState create_session(std::shared_ptr<const Dataset> dataset, Variant variant,
                            std::uint64_t seed, const PipelineOptions& options = {});

// High-dimensional distances the current learner induces.
DistanceMatrix model_distances(const SessionState& state);

// Forward direction: project the current representation. Warm-starts from the
// state's layout when one exists and warm starting is enabled.
Layout predict_layout(const SessionState& state);

// Backward direction followed by a new projection; the input is untouched.
SessionState apply_interaction(const SessionState& state, const InteractionSet& interaction);

SessionState reset_session(const SessionState& state);

// Exclusive-writer wrapper around SessionState. Readers see the last
// committed state; a second writer arriving while one is running gets a
// concurrent-update error instead of waiting.
class Session {
 public:
  explicit Session(SessionState initial) : state_(std::move(initial)) {}

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  SessionState snapshot() const;

  void apply(const InteractionSet& interaction);
  void reset();

 private:
  template <typename Fn>
  void write(Fn&& transition);

  mutable std::shared_mutex state_mutex_;
  std::mutex writer_mutex_;
  SessionState state_;
};

}  // namespace semsteer
