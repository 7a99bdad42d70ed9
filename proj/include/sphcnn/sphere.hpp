#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sphcnn {

/// A point on the unit sphere S^{d-1} in R^d, d >= 3.
///
/// The constructor validates the invariant (unit norm within 1e-12); use
/// SpherePoint::normalize to project an arbitrary nonzero vector.
class SpherePoint {
 public:
  static constexpr double kNormTolerance = 1e-12;

  explicit SpherePoint(std::vector<double> coords);

  static SpherePoint normalize(std::vector<double> v);

  int dim() const { return static_cast<int>(coords_.size()); }
  std::span<const double> coords() const { return coords_; }
  double operator[](int i) const { return coords_[static_cast<size_t>(i)]; }

  double dot(const SpherePoint& other) const;
  double dot(std::span<const double> v) const;

 private:
  std::vector<double> coords_;
};

enum class GridKind { Fibonacci, Random };

/// Finite point set used as a surrogate for the sup norm on the sphere.
struct EvalGrid {
  std::vector<SpherePoint> points;
  GridKind kind;
  int dim;

  size_t size() const { return points.size(); }
};

/// m points drawn from the normalized surface measure by normalizing
/// standard Gaussian vectors. Deterministic in (d, m, seed).
std::vector<SpherePoint> sample_uniform(int d, int m, std::uint64_t seed);

/// Fibonacci spiral (d == 3 only) or seeded uniform random grid of G points.
EvalGrid build_grid(int d, int G, GridKind kind, std::uint64_t seed = 0);

/// max_{x in grid} |f(x)|. This is a lower bound for the true sup norm.
double sup_norm_on_grid(const std::function<double(const SpherePoint&)>& f,
                        const EvalGrid& grid);

}  // namespace sphcnn
