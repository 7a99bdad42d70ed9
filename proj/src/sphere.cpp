#include "sphcnn/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sphcnn/rng.hpp"

namespace sphcnn {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

SpherePoint::SpherePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 3) {
    throw std::invalid_argument("SpherePoint: dimension must be >= 3, got " +
                                std::to_string(coords_.size()));
  }
  const double n = norm2(coords_);
  if (!(std::abs(n - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("SpherePoint: coordinates are not unit norm");
  }
}

SpherePoint SpherePoint::normalize(std::vector<double> v) {
  const double n = norm2(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("SpherePoint::normalize: zero or non-finite vector");
  }
  for (double& x : v) x /= n;
  return SpherePoint(std::move(v));
}

double SpherePoint::dot(const SpherePoint& other) const {
  return dot(other.coords());
}

double SpherePoint::dot(std::span<const double> v) const {
  if (v.size() != coords_.size()) {
    throw std::invalid_argument("SpherePoint::dot: dimension mismatch");
  }
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) s += coords_[i] * v[i];
  return s;
}

std::vector<SpherePoint> sample_uniform(int d, int m, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("sample_uniform: d must be >= 3");
  if (m < 1) throw std::invalid_argument("sample_uniform: m must be >= 1");
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SpherePoint> out;
  out.reserve(static_cast<size_t>(m));
  std::vector<double> v(static_cast<size_t>(d));
  while (static_cast<int>(out.size()) < m) {
    for (double& x : v) x = gauss(rng);
    // A Gaussian vector of norm ~0 is astronomically unlikely; redraw anyway.
    if (norm2(v) < 1e-150) continue;
    out.push_back(SpherePoint::normalize(v));
  }
  return out;
}

EvalGrid build_grid(int d, int G, GridKind kind, std::uint64_t seed) {
  if (d < 3) throw std::invalid_argument("build_grid: d must be >= 3");
  if (G < 1) throw std::invalid_argument("build_grid: G must be >= 1");
  if (kind == GridKind::Random) {
    return EvalGrid{sample_uniform(d, G, seed), kind, d};
  }
  if (d != 3) {
    throw std::invalid_argument("build_grid: fibonacci grid requires d == 3");
  }
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  EvalGrid grid{{}, kind, d};
  grid.points.reserve(static_cast<size_t>(G));
  for (int i = 0; i < G; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / G;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * i;
    grid.points.push_back(
        SpherePoint::normalize({rho * std::cos(phi), rho * std::sin(phi), z}));
  }
  return grid;
}

double sup_norm_on_grid(const std::function<double(const SpherePoint&)>& f,
                        const EvalGrid& grid) {
  if (grid.points.empty()) throw std::invalid_argument("sup_norm_on_grid: empty grid");
  double best = 0.0;
  for (const auto& x : grid.points) {
    const double v = std::abs(f(x));
    if (std::isnan(v)) throw std::domain_error("sup_norm_on_grid: f returned NaN");
    best = std::max(best, v);
  }
  return best;
}

}  // namespace sphcnn
