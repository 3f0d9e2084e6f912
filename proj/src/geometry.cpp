#include "semsteer/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>

#include "semsteer/error.hpp"

namespace semsteer {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) fail(ErrorCode::InvalidInput, std::string(what) + " contains non-finite values");
}

// Pairwise distances of a 2-D configuration, written into `out`.
void coords_distances(const Coords2D& x, Eigen::MatrixXd& out) {
  const Eigen::Index n = x.rows();
  out.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = x(i, 0) - x(j, 0);
      const double dy = x(i, 1) - x(j, 1);
      const double d = std::sqrt(dx * dx + dy * dy);
      out(i, j) = d;
      out(j, i) = d;
    }
  }
}

double raw_stress(const Eigen::MatrixXd& low, const Eigen::MatrixXd& high) {
  double sum = 0.0;
  const Eigen::Index n = low.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = low(i, j) - high(i, j);
      sum += r * r;
    }
  }
  return sum;
}

// Points with identical target rows start from identical coordinates.
void tie_duplicate_rows(const DistanceMatrix& high, Coords2D& x) {
  const std::size_t n = high.size();
  const auto& h = high.matrix();
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (h(i, j) != 0.0) continue;
      bool same = true;
      for (std::size_t k = 0; k < n && same; ++k) {
        if (k != i && k != j && h(i, k) != h(j, k)) same = false;
      }
      if (same) {
        x.row(j) = x.row(i);
        break;
      }
    }
  }
}

}  // namespace

DistanceMatrix DistanceMatrix::from_matrix(Eigen::MatrixXd entries) {
  if (entries.rows() != entries.cols()) fail(ErrorCode::InvalidInput, "distance matrix must be square");
  require_finite(entries, "distance matrix");
  const Eigen::Index n = entries.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (entries(i, i) != 0.0) fail(ErrorCode::InvalidInput, "distance matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (entries(i, j) != entries(j, i)) fail(ErrorCode::InvalidInput, "distance matrix must be symmetric");
      if (entries(i, j) < 0.0) fail(ErrorCode::InvalidInput, "distance matrix entries must be non-negative");
    }
  }
  DistanceMatrix out;
  out.entries_ = std::move(entries);
  return out;
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i == j) {
    if (value != 0.0) fail(ErrorCode::InvalidInput, "self-distance must be zero");
    return;
  }
  if (!(value >= 0.0) || !std::isfinite(value)) fail(ErrorCode::InvalidInput, "distance must be finite and non-negative");
  entries_(i, j) = value;
  entries_(j, i) = value;
}

Layout::Layout(Coords2D coords) : coords_(std::move(coords)) {
  for (Eigen::Index i = 0; i < coords_.rows(); ++i) {
    for (int c = 0; c < 2; ++c) {
      const double v = coords_(i, c);
      if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::InvalidInput, "layout coordinate outside the unit square");
    }
  }
}

DistanceMatrix pairwise_distances(const PointMatrix& points) {
  if (points.rows() < 1 || points.cols() < 1) fail(ErrorCode::InvalidInput, "pairwise_distances needs at least one point and one dimension");
  require_finite(points, "points");
  const Eigen::Index n = points.rows();
  const Eigen::Index dims = points.cols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (Eigen::Index m = 0; m < dims; ++m) {
        const double diff = points(i, m) - points(j, m);
        sum += diff * diff;
      }
      d(i, j) = std::sqrt(sum);
      d(j, i) = d(i, j);
    }
  }
  return DistanceMatrix::from_matrix(std::move(d));
}

double weighted_distance(std::span<const double> a, std::span<const double> b,
                         std::span<const double> weights) {
  if (a.size() != b.size() || a.size() != weights.size()) {
    fail(ErrorCode::InvalidInput, "weighted_distance: length mismatch");
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (weights[m] < 0.0) fail(ErrorCode::InvalidInput, "weighted_distance: negative weight");
    const double diff = a[m] - b[m];
    sum += weights[m] * (diff * diff);
  }
  return std::sqrt(sum);
}

DistanceMatrix weighted_pairwise_distances(const PointMatrix& points,
                                           std::span<const double> weights) {
  if (points.rows() < 1 || points.cols() < 1) fail(ErrorCode::InvalidInput, "weighted_pairwise_distances: empty input");
  if (static_cast<Eigen::Index>(weights.size()) != points.cols()) {
    fail(ErrorCode::InvalidInput, "weighted_pairwise_distances: weight length mismatch");
  }
  require_finite(points, "points");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidInput, "weights must be finite and non-negative");
  }
  const Eigen::Index n = points.rows();
  const Eigen::Index dims = points.cols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (Eigen::Index m = 0; m < dims; ++m) {
        const double diff = points(i, m) - points(j, m);
        sum += weights[m] * (diff * diff);
      }
      d(i, j) = std::sqrt(sum);
      d(j, i) = d(i, j);
    }
  }
  return DistanceMatrix::from_matrix(std::move(d));
}

double stress(const DistanceMatrix& low, const DistanceMatrix& high) {
  if (low.size() != high.size()) fail(ErrorCode::InvalidInput, "stress: distance matrices differ in size");
  return raw_stress(low.matrix(), high.matrix());
}

double stress(std::span<const PairDistance> low, std::span<const PairDistance> high) {
  auto key = [](const PairDistance& p) { return std::minmax(p.i, p.j); };
  std::map<std::pair<std::size_t, std::size_t>, double> targets;
  for (const auto& p : high) {
    if (!targets.emplace(key(p), p.distance).second) fail(ErrorCode::InvalidInput, "stress: duplicate pair");
  }
  if (low.size() != high.size()) fail(ErrorCode::InvalidInput, "stress: mismatched index sets");
  double sum = 0.0;
  for (const auto& p : low) {
    auto it = targets.find(key(p));
    if (it == targets.end()) fail(ErrorCode::InvalidInput, "stress: mismatched index sets");
    const double r = p.distance - it->second;
    sum += r * r;
    targets.erase(it);
  }
  return sum;
}

double layout_stress(const Coords2D& coords, const DistanceMatrix& high) {
  if (static_cast<std::size_t>(coords.rows()) != high.size()) fail(ErrorCode::InvalidInput, "layout_stress: size mismatch");
  Eigen::MatrixXd low;
  coords_distances(coords, low);
  return raw_stress(low, high.matrix());
}

Coords2D random_coords(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Coords2D out(static_cast<Eigen::Index>(count), 2);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out(i, 0) = unit(rng);
    out(i, 1) = unit(rng);
  }
  return out;
}

MdsResult mds_project(const DistanceMatrix& high, const MdsOptions& options) {
  if (!(options.tol > 0.0)) fail(ErrorCode::InvalidInput, "mds_project: tol must be positive");
  if (options.max_iter < 1) fail(ErrorCode::InvalidInput, "mds_project: max_iter must be at least 1");
  const std::size_t n = high.size();
  const auto& target = high.matrix();

  Coords2D x;
  if (options.init) {
    if (static_cast<std::size_t>(options.init->rows()) != n) fail(ErrorCode::InvalidInput, "mds_project: init has wrong size");
    if (!options.init->allFinite()) fail(ErrorCode::InvalidInput, "mds_project: init is not finite");
    x = *options.init;
  } else {
    x = random_coords(n, options.seed);
  }
  tie_duplicate_rows(high, x);

  MdsResult result;
  Eigen::MatrixXd dist;
  coords_distances(x, dist);
  double sigma = raw_stress(dist, target);
  result.stress_history.push_back(sigma);

  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  Coords2D next(static_cast<Eigen::Index>(n), 2);
  for (std::size_t iter = 0; iter < options.max_iter && sigma > 0.0; ++iter) {
    // Guttman transform: x_i <- (1/n) sum_{k != i} (delta_ik / d_ik) (x_i - x_k)
    for (std::size_t i = 0; i < n; ++i) {
      double sx = 0.0;
      double sy = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        const double d = dist(i, k);
        if (d <= 0.0) continue;
        const double ratio = target(i, k) / d;
        sx += ratio * (x(i, 0) - x(k, 0));
        sy += ratio * (x(i, 1) - x(k, 1));
      }
      next(i, 0) = sx * inv_n;
      next(i, 1) = sy * inv_n;
    }
    x.swap(next);
    coords_distances(x, dist);
    const double updated = raw_stress(dist, target);
    result.stress_history.push_back(updated);
    ++result.iterations;
    const bool converged = (sigma - updated) < options.tol * sigma;
    sigma = updated;
    if (converged) break;
  }
  result.coords = std::move(x);
  return result;
}

Layout normalize_layout(const Coords2D& raw) {
  if (!raw.allFinite()) fail(ErrorCode::InvalidInput, "normalize_layout: non-finite coordinates");
  const Eigen::Index n = raw.rows();
  Coords2D out(n, 2);
  if (n == 0) return Layout(out);

  const double min_x = raw.col(0).minCoeff();
  const double min_y = raw.col(1).minCoeff();
  const double width = raw.col(0).maxCoeff() - min_x;
  const double height = raw.col(1).maxCoeff() - min_y;
  const double span = std::max(width, height);
  if (!(span > 0.0)) {
    out.setConstant(0.5);
    return Layout(out);
  }
  const double offset_x = (1.0 - width / span) / 2.0;
  const double offset_y = (1.0 - height / span) / 2.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, 0) = std::clamp((raw(i, 0) - min_x) / span + offset_x, 0.0, 1.0);
    out(i, 1) = std::clamp((raw(i, 1) - min_y) / span + offset_y, 0.0, 1.0);
  }
  return Layout(out);
}

}  // namespace semsteer
