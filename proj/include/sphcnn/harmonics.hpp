#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sphcnn/sphere.hpp"

namespace sphcnn {

// Degree cap for band-limited expansions; keeps the recurrences in their
// well-conditioned range.
inline constexpr int kMaxZonalDegree = 200;

struct GegenbauerParams {
  int n;
  double lambda;
};

/// Gegenbauer parameter (d-2)/2 associated with S^{d-1}.
double gegenbauer_lambda(int d);

/// C_n^lambda(t) by the forward three-term recurrence.
double gegenbauer_eval(GegenbauerParams params, double t);

/// C_0^lambda(t), ..., C_nmax^lambda(t) in one recurrence sweep.
std::vector<double> gegenbauer_all(int nmax, double lambda, double t);

/// Dimension N(n, d) of the degree-n spherical harmonics on S^{d-1}.
std::int64_t harmonic_dim(int n, int d);

/// Laplace-Beltrami eigenvalue n(n + d - 2).
std::int64_t laplace_eigenvalue(int n, int d);

/// Reproducing kernel Z_n(x, y) as a function of t = <x, y>.
double zonal_kernel(int n, int d, double t);

/// Z_0(t), ..., Z_nmax(t) in one sweep.
std::vector<double> zonal_kernel_all(int nmax, int d, double t);

/// f(x) = sum_k coeffs[k] Z_k(pole, x).
class BandLimitedZonal {
 public:
  BandLimitedZonal(SpherePoint pole, std::vector<double> coeffs);

  const SpherePoint& pole() const { return pole_; }
  std::span<const double> coeffs() const { return coeffs_; }
  int dim() const { return pole_.dim(); }
  /// Largest k with a nonzero coefficient (0 for the zero function).
  int degree() const;

  BandLimitedZonal with_coeffs(std::vector<double> coeffs) const;

 private:
  SpherePoint pole_;
  std::vector<double> coeffs_;
};

/// Value of f at x; throws on dimension mismatch.
double zonal_eval(const BandLimitedZonal& f, const SpherePoint& x);

/// Value of f at a point with <pole, x> = t.
double zonal_eval_at(const BandLimitedZonal& f, double t);

/// (-Delta_0 + I)^exponent applied coefficient-wise: a_k -> (1 + lambda_k)^exponent a_k.
BandLimitedZonal apply_fractional_power(const BandLimitedZonal& f, double exponent);

/// Exact W_2^r norm: sqrt(sum_k (1 + lambda_k)^r a_k^2 N(k, d)).
double sobolev_norm_2(const BandLimitedZonal& f, double r);

}  // namespace sphcnn
