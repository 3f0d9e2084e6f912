#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "semsteer/error.hpp"
#include "semsteer/fixture.hpp"
#include "semsteer/simulated_analyst.hpp"
#include "support.hpp"

using namespace semsteer;

namespace {

std::vector<int> cycle_labels(std::size_t n, int classes) {
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i) % classes;
  return labels;
}

}  // namespace

TEST_SUITE("simulated_analyst") {

TEST_CASE("sampled interactions follow the label rule") {
  std::mt19937_64 rng(1);
  for (int classes = 2; classes <= 6; ++classes) {
    for (std::size_t per_class : {1u, 3u, 5u}) {
      const auto labels = cycle_labels(60, classes);
      const auto interaction = simulate_interaction(labels, per_class, rng);
      REQUIRE(interaction.size() == per_class * static_cast<std::size_t>(classes));

      std::map<int, std::size_t> counts;
      std::set<std::size_t> distinct(interaction.documents().begin(), interaction.documents().end());
      CHECK(distinct.size() == interaction.size());
      for (auto d : interaction.documents()) ++counts[labels[d]];
      for (const auto& [label, count] : counts) CHECK(count == per_class);

      const auto& docs = interaction.documents();
      for (std::size_t i = 0; i < docs.size(); ++i) {
        for (std::size_t j = i + 1; j < docs.size(); ++j) {
          const double target = interaction.targets()(i, j);
          if (labels[docs[i]] == labels[docs[j]]) {
            CHECK(target == 0.0);
          } else {
            CHECK(target == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
          }
        }
      }
      CHECK(interaction.positions().has_value() == (classes == 2));
    }
  }
}

TEST_CASE("two classes land on opposite corners") {
  std::mt19937_64 rng(2);
  const auto labels = cycle_labels(20, 2);
  const auto interaction = simulate_interaction(labels, 3, rng);
  const auto& pos = *interaction.positions();
  for (std::size_t r = 0; r < interaction.size(); ++r) {
    const double corner = labels[interaction.documents()[r]] == 0 ? 0.0 : 1.0;
    CHECK(pos(static_cast<Eigen::Index>(r), 0) == corner);
    CHECK(pos(static_cast<Eigen::Index>(r), 1) == corner);
  }
}

TEST_CASE("sampling rejects impossible requests") {
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(simulate_interaction(std::vector<int>(10, 0), 3, rng), Error);
  CHECK_THROWS_AS(simulate_interaction(std::vector<int>{0, 0, 0, 1, 1}, 3, rng), Error);
  CHECK_THROWS_AS(simulate_interaction(cycle_labels(10, 2), 0, rng), Error);
}

TEST_CASE("knn accuracy trivial cases") {
  Coords2D clusters(40, 2);
  std::vector<int> labels(40);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> jitter(0.0, 0.01);
  for (int i = 0; i < 40; ++i) {
    const int c = i / 10;
    labels[static_cast<std::size_t>(i)] = c;
    clusters(i, 0) = (c % 2) * 0.9 + jitter(rng);
    clusters(i, 1) = (c / 2) * 0.9 + jitter(rng);
  }
  CHECK(knn_accuracy(Layout(clusters), labels) == 1.0);
  CHECK(knn_accuracy(Layout(clusters), std::vector<int>(40, 2)) == 1.0);
  CHECK_THROWS_AS(knn_accuracy(Layout(clusters.topRows(5)), std::vector<int>(5, 0)), Error);
  CHECK_THROWS_AS(knn_accuracy(Layout(clusters), std::vector<int>(39, 0)), Error);
}

TEST_CASE("knn accuracy matches the brute-force oracle") {
  std::mt19937_64 rng(5);
  for (int instance = 0; instance < 80; ++instance) {
    const std::size_t n = 7 + rng() % 94;
    const std::size_t k = 1 + rng() % 6;
    const int classes = 1 + static_cast<int>(rng() % 5);
    auto xy = oracle::random_grid(n, 2, rng, 0.0, 1.0);
    if (instance % 2) {
      // coarse grid forces distance ties
      for (auto& p : xy)
        for (double& v : p) v = std::round(v * 4.0) / 4.0;
    }
    std::vector<int> labels(n);
    for (int& l : labels) l = static_cast<int>(rng() % static_cast<unsigned>(classes));
    CHECK(knn_accuracy(Layout(support::to_eigen(xy)), labels, k) == oracle::knn_loo(xy, labels, k));
  }
}

TEST_CASE("learning curves") {
  FixtureOptions fixture;
  fixture.per_cluster = 12;
  fixture.noise = 8;
  const auto dataset = std::make_shared<const Dataset>(make_synthetic_fixture(fixture));

  SimulationOptions options;
  options.iterations = 0;
  const auto empty = run_simulation(dataset, Variant::Finetune, 1, options);
  CHECK(empty.accuracy.size() == 1);
  CHECK(empty.iterations() == 0);

  options.iterations = 4;
  for (Variant variant : {Variant::Vanilla, Variant::Finetune}) {
    const auto a = run_simulation(dataset, variant, 7, options);
    const auto b = run_simulation(dataset, variant, 7, options);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.accuracy.size() == 5);
    for (double v : a.accuracy) CHECK((v >= 0.0 && v <= 1.0));
  }

  const auto run = simulate_session(dataset, Variant::Finetune, 7, options);
  CHECK(run.final_state.iteration == 4);
  CHECK(run.curve.final_accuracy() == knn_accuracy(run.final_state.layout, dataset->label_indices()));

  std::ostringstream csv;
  write_curve_csv(LearningCurve{{0.5, 0.75}}, csv);
  CHECK(csv.str() == "iteration,accuracy\n0,0.5\n1,0.75\n");
}

TEST_CASE("simulation needs labels") {
  std::vector<Document> docs{{"a", {0.0, 1.0}, std::nullopt, std::nullopt}, {"b", {1.0, 0.0}, "x", std::nullopt}};
  const auto dataset = std::make_shared<const Dataset>("partial", docs);
  CHECK_FALSE(dataset->has_labels());
  CHECK_THROWS_AS(run_simulation(dataset, Variant::Vanilla, 0, {}), Error);
}

}  // TEST_SUITE
