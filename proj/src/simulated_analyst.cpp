#include "semsteer/simulated_analyst.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

#include "semsteer/error.hpp"

namespace semsteer {

InteractionSet simulate_interaction(std::span<const int> labels, std::size_t per_class,
                                    std::mt19937_64& rng) {
  if (per_class < 1) fail(ErrorCode::InvalidInput, "per_class must be at least 1");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  if (members.size() < 2) fail(ErrorCode::InvalidInput, "simulated interactions need at least 2 classes");

  std::vector<std::size_t> documents;
  std::vector<int> classes;
  for (auto& [label, pool] : members) {
    if (pool.size() < per_class) {
      fail(ErrorCode::InvalidInput, "class " + std::to_string(label) + " has " + std::to_string(pool.size()) +
                                        " members, fewer than " + std::to_string(per_class));
    }
    // partial Fisher-Yates
    for (std::size_t s = 0; s < per_class; ++s) {
      std::uniform_int_distribution<std::size_t> pick(s, pool.size() - 1);
      std::swap(pool[s], pool[pick(rng)]);
      documents.push_back(pool[s]);
      classes.push_back(label);
    }
  }

  const std::size_t n = documents.size();
  if (members.size() == 2) {
    const int first = members.begin()->first;
    Coords2D positions(static_cast<Eigen::Index>(n), 2);
    for (std::size_t r = 0; r < n; ++r) {
      const double corner = classes[r] == first ? 0.0 : 1.0;
      positions(static_cast<Eigen::Index>(r), 0) = corner;
      positions(static_cast<Eigen::Index>(r), 1) = corner;
    }
    return InteractionSet::from_positions(std::move(documents), std::move(positions));
  }

  DistanceMatrix targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) targets.set(i, j, classes[i] == classes[j] ? 0.0 : kFarthestDistance);
  }
  return InteractionSet::from_targets(std::move(documents), std::move(targets));
}

double knn_accuracy(const Layout& layout, std::span<const int> labels, std::size_t k) {
  const std::size_t n = layout.size();
  if (labels.size() != n) fail(ErrorCode::InvalidInput, "knn_accuracy: one label per document is required");
  if (k < 1) fail(ErrorCode::InvalidInput, "knn_accuracy: k must be at least 1");
  if (n <= k) fail(ErrorCode::InvalidInput, "knn_accuracy: need more than k documents");
  const int max_label = *std::max_element(labels.begin(), labels.end());
  if (*std::min_element(labels.begin(), labels.end()) < 0) fail(ErrorCode::InvalidInput, "knn_accuracy: negative label");

  std::vector<std::pair<double, std::size_t>> neighbors(n - 1);
  std::vector<std::size_t> votes(static_cast<std::size_t>(max_label) + 1);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t slot = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = layout.x(i) - layout.x(j);
      const double dy = layout.y(i) - layout.y(j);
      neighbors[slot++] = {dx * dx + dy * dy, j};
    }
    std::partial_sort(neighbors.begin(), neighbors.begin() + static_cast<std::ptrdiff_t>(k), neighbors.end());

    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t r = 0; r < k; ++r) ++votes[static_cast<std::size_t>(labels[neighbors[r].second])];
    // max_element returns the first maximum, i.e. the lowest label index
    const auto predicted = std::max_element(votes.begin(), votes.end()) - votes.begin();
    if (predicted == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

std::uint64_t sampler_seed(std::uint64_t seed) noexcept {
  return seed * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL;
}

SimulationRun simulate_session(std::shared_ptr<const Dataset> dataset, Variant variant,
                               std::uint64_t seed, const SimulationOptions& options) {
  if (!dataset) fail(ErrorCode::NotFound, "dataset not found");
  if (!dataset->has_labels()) fail(ErrorCode::InvalidInput, "simulation needs a fully labeled dataset");
  const std::vector<int>& labels = dataset->label_indices();

  SessionState state = create_session(dataset, variant, seed, options.pipeline);
  std::mt19937_64 rng(sampler_seed(seed));

  LearningCurve curve;
  curve.accuracy.reserve(options.iterations + 1);
  curve.accuracy.push_back(knn_accuracy(state.layout, labels, options.k));
  for (std::size_t t = 0; t < options.iterations; ++t) {
    const InteractionSet interaction = simulate_interaction(labels, options.per_class, rng);
    state = apply_interaction(state, interaction);
    curve.accuracy.push_back(knn_accuracy(state.layout, labels, options.k));
  }
  return {std::move(curve), std::move(state)};
}

LearningCurve run_simulation(std::shared_ptr<const Dataset> dataset, Variant variant,
                             std::uint64_t seed, const SimulationOptions& options) {
  return simulate_session(std::move(dataset), variant, seed, options).curve;
}

void write_curve_csv(const LearningCurve& curve, std::ostream& out) {
  out << "iteration,accuracy\n";
  char buffer[32];
  for (std::size_t t = 0; t < curve.accuracy.size(); ++t) {
    const auto end = std::to_chars(buffer, buffer + sizeof buffer, curve.accuracy[t]).ptr;
    out << t << ',' << std::string_view(buffer, static_cast<std::size_t>(end - buffer)) << '\n';
  }
}

void write_curve_csv(const LearningCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidInput, "cannot write " + path.string());
  write_curve_csv(curve, out);
}

}  // namespace semsteer
