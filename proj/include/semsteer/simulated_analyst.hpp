#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "semsteer/geometry.hpp"
#include "semsteer/inverse_models.hpp"
#include "semsteer/pipeline.hpp"

namespace semsteer {

inline constexpr double kFarthestDistance = 1.4142135623730951;  // diagonal of the unit square

// Draws `per_class` documents from every class without replacement and sets
// target distances 0 within a class and sqrt(2) across classes. With two
// classes the targets are realized by positions at opposite corners; with
// more classes no unit-square arrangement realizes them, so only the target
// matrix is carried.
InteractionSet simulate_interaction(std::span<const int> labels, std::size_t per_class,
                                    std::mt19937_64& rng);

// Leave-one-out kNN accuracy in the 2-D layout. Neighbor distance ties go to
// the lower document index, vote ties to the lower label index.
double knn_accuracy(const Layout& layout, std::span<const int> labels, std::size_t k = 5);

struct LearningCurve {
  // accuracy[0] is the initial layout, accuracy[t] the layout after update t
  std::vector<double> accuracy;

  std::size_t iterations() const noexcept { return accuracy.empty() ? 0 : accuracy.size() - 1; }
  double final_accuracy() const { return accuracy.back(); }
};

struct SimulationOptions {
  std::size_t iterations = 200;
  std::size_t per_class = 3;
  std::size_t k = 5;
  PipelineOptions pipeline;
};

// Seed for the interaction sampler, independent of the projection seed.
std::uint64_t sampler_seed(std::uint64_t seed) noexcept;

struct SimulationRun {
  LearningCurve curve;
  SessionState final_state;
};

// Replaces the analyst: sample, update, score, repeat.
SimulationRun simulate_session(std::shared_ptr<const Dataset> dataset, Variant variant,
                               std::uint64_t seed, const SimulationOptions& options = {});
LearningCurve run_simulation(std::shared_ptr<const Dataset> dataset, Variant variant,
                             std::uint64_t seed, const SimulationOptions& options = {});

// "iteration,accuracy" header followed by one row per entry.
void write_curve_csv(const LearningCurve& curve, std::ostream& out);
void write_curve_csv(const LearningCurve& curve, const std::filesystem::path& path);

}  // namespace semsteer
