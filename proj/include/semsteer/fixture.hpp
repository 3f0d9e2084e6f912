#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "semsteer/dataset.hpp"

namespace semsteer {

// Gaussian clusters whose means differ only on the leading `informative`
// dimensions; the remaining `noise` dimensions are shared isotropic noise.
// Cluster means are centered across the informative dimensions, and every
// document adds one common offset (std `shared_factor`) to all informative
// dimensions. No per-dimension reweighting removes that offset; a linear
// map can.
struct FixtureOptions {
  std::string id = "synthetic4";
  std::size_t clusters = 4;
  std::size_t per_cluster = 50;
  std::size_t informative = 8;
  std::size_t noise = 56;
  double center_spread = 0.06;      // std of cluster means on informative dims
  double informative_noise = 0.02;  // within-cluster std on informative dims
  double noise_scale = 0.03;        // std on noise dims
  double shared_factor = 0.2;
  std::uint64_t seed = 20210611;
};

Dataset make_synthetic_fixture(const FixtureOptions& options = {});

}  // namespace semsteer
