#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace semsteer {

// Row-major-by-convention point sets: one row per document.
using PointMatrix = Eigen::MatrixXd;
using Coords2D = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Symmetric, non-negative, zero-diagonal matrix of pairwise distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t size) : entries_(Eigen::MatrixXd::Zero(size, size)) {}

  // Validates the invariants; throws invalid-input otherwise.
  static DistanceMatrix from_matrix(Eigen::MatrixXd entries);

  std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }

  // Sets both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double value);

 private:
  Eigen::MatrixXd entries_;
};

// Document coordinates normalized to the unit square.
class Layout {
 public:
  Layout() = default;
  // Throws invalid-input if any coordinate falls outside [0,1].
  explicit Layout(Coords2D coords);

  std::size_t size() const noexcept { return static_cast<std::size_t>(coords_.rows()); }
  const Coords2D& coords() const noexcept { return coords_; }
  double x(std::size_t i) const { return coords_(i, 0); }
  double y(std::size_t i) const { return coords_(i, 1); }

 private:
  Coords2D coords_;
};

struct PairDistance {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
};

DistanceMatrix pairwise_distances(const PointMatrix& points);

// sqrt(sum_m w_m (a_m - b_m)^2)
double weighted_distance(std::span<const double> a, std::span<const double> b,
                         std::span<const double> weights);

// Row-wise weighted distances. With unit weights the result is bitwise equal
// to pairwise_distances(points).
DistanceMatrix weighted_pairwise_distances(const PointMatrix& points,
                                           std::span<const double> weights);

// Sum over i<j of (low_ij - high_ij)^2.
double stress(const DistanceMatrix& low, const DistanceMatrix& high);
double stress(std::span<const PairDistance> low, std::span<const PairDistance> high);
double layout_stress(const Coords2D& coords, const DistanceMatrix& high);

struct MdsOptions {
  double tol = 1e-6;           // relative stress decrease that stops iteration
  std::size_t max_iter = 300;
  std::uint64_t seed = 0;      // used only when no init is supplied
  std::optional<Coords2D> init;
};

struct MdsResult {
  Coords2D coords;
  // stress of the starting configuration followed by one entry per iteration
  std::vector<double> stress_history;
  std::size_t iterations = 0;

  double final_stress() const { return stress_history.back(); }
};

// SMACOF majorization of unweighted raw stress. Rows of `high` whose target
// distance is exactly zero share their starting coordinates and therefore
// stay coincident.
MdsResult mds_project(const DistanceMatrix& high, const MdsOptions& options = {});

// Seeded uniform coordinates in [0,1]^2.
Coords2D random_coords(std::size_t count, std::uint64_t seed);

// Aspect-preserving affine map of the bounding box into the unit square,
// longer side spanning [0,1], shorter side centered. All-coincident input
// maps to (0.5, 0.5).
Layout normalize_layout(const Coords2D& raw);

}  // namespace semsteer
