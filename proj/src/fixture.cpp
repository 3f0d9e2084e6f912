#include "semsteer/fixture.hpp"

#include <random>

#include "semsteer/error.hpp"

namespace semsteer {

Dataset make_synthetic_fixture(const FixtureOptions& options) {
  if (options.clusters < 1 || options.per_cluster < 1 || options.informative + options.noise < 1) {
    fail(ErrorCode::InvalidInput, "fixture needs at least one cluster, member and dimension");
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  const std::size_t width = options.informative + options.noise;

  std::vector<std::vector<double>> centers(options.clusters, std::vector<double>(options.informative));
  for (auto& center : centers) {
    double mean = 0.0;
    for (double& c : center) mean += (c = options.center_spread * standard(rng));
    if (options.informative > 0) mean /= static_cast<double>(options.informative);
    for (double& c : center) c -= mean;
  }

  std::vector<Document> documents;
  documents.reserve(options.clusters * options.per_cluster);
  // interleave clusters so row order carries no label information
  for (std::size_t member = 0; member < options.per_cluster; ++member) {
    for (std::size_t cluster = 0; cluster < options.clusters; ++cluster) {
      Document doc;
      doc.id = "doc-" + std::to_string(documents.size());
      doc.label = "cluster-" + std::to_string(cluster);
      doc.vector.resize(width);
      const double offset = options.shared_factor * standard(rng);
      for (std::size_t m = 0; m < options.informative; ++m) {
        doc.vector[m] = centers[cluster][m] + offset + options.informative_noise * standard(rng);
      }
      for (std::size_t m = options.informative; m < width; ++m) doc.vector[m] = options.noise_scale * standard(rng);
      documents.push_back(std::move(doc));
    }
  }
  return Dataset(options.id, std::move(documents));
}

}  // namespace semsteer
