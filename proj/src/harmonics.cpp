#include "sphcnn/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sphcnn {

namespace {

// binom(n, k) with exact integer steps; throws on int64 overflow.
std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    std::int64_t scaled = 0;
    if (__builtin_mul_overflow(result, n - k + i, &scaled)) {
      throw std::overflow_error("binomial coefficient overflows int64");
    }
    result = scaled / i;
  }
  return result;
}

void check_dim(int d, const char* who) {
  if (d < 3) throw std::invalid_argument(std::string(who) + ": d must be >= 3");
}

void check_degree(int n, const char* who) {
  if (n < 0) throw std::invalid_argument(std::string(who) + ": degree must be >= 0");
}

}  // namespace

double gegenbauer_lambda(int d) {
  check_dim(d, "gegenbauer_lambda");
  return (d - 2) / 2.0;
}

std::vector<double> gegenbauer_all(int nmax, double lambda, double t) {
  check_degree(nmax, "gegenbauer_all");
  if (!(lambda > -0.5)) throw std::invalid_argument("gegenbauer: lambda must exceed -1/2");
  std::vector<double> c(static_cast<size_t>(nmax) + 1);
  c[0] = 1.0;
  if (nmax >= 1) c[1] = 2.0 * lambda * t;
  for (int n = 2; n <= nmax; ++n) {
    c[n] = (2.0 * (n + lambda - 1.0) * t * c[n - 1] - (n + 2.0 * lambda - 2.0) * c[n - 2]) / n;
  }
  return c;
}

double gegenbauer_eval(GegenbauerParams params, double t) {
  return gegenbauer_all(params.n, params.lambda, t).back();
}

std::int64_t harmonic_dim(int n, int d) {
  check_degree(n, "harmonic_dim");
  check_dim(d, "harmonic_dim");
  if (n == 0) return 1;
  const std::int64_t second = n >= 2 ? binomial(n + d - 3, n - 2) : 0;
  return binomial(n + d - 1, n) - second;
}

std::int64_t laplace_eigenvalue(int n, int d) {
  check_degree(n, "laplace_eigenvalue");
  check_dim(d, "laplace_eigenvalue");
  return static_cast<std::int64_t>(n) * (n + d - 2);
}

std::vector<double> zonal_kernel_all(int nmax, int d, double t) {
  const double lambda = gegenbauer_lambda(d);
  auto c = gegenbauer_all(nmax, lambda, t);
  for (int n = 0; n <= nmax; ++n) c[n] *= (n + lambda) / lambda;
  return c;
}

double zonal_kernel(int n, int d, double t) {
  check_degree(n, "zonal_kernel");
  return zonal_kernel_all(n, d, t).back();
}

BandLimitedZonal::BandLimitedZonal(SpherePoint pole, std::vector<double> coeffs)
    : pole_(std::move(pole)), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) {
    throw std::invalid_argument("BandLimitedZonal: at least one coefficient required");
  }
  if (static_cast<int>(coeffs_.size()) - 1 > kMaxZonalDegree) {
    throw std::invalid_argument("BandLimitedZonal: degree exceeds cap of " +
                                std::to_string(kMaxZonalDegree));
  }
  for (double a : coeffs_) {
    if (!std::isfinite(a)) throw std::invalid_argument("BandLimitedZonal: non-finite coefficient");
  }
}

int BandLimitedZonal::degree() const {
  for (int k = static_cast<int>(coeffs_.size()) - 1; k > 0; --k) {
    if (coeffs_[k] != 0.0) return k;
  }
  return 0;
}

BandLimitedZonal BandLimitedZonal::with_coeffs(std::vector<double> coeffs) const {
  return BandLimitedZonal(pole_, std::move(coeffs));
}

double zonal_eval_at(const BandLimitedZonal& f, double t) {
  const auto a = f.coeffs();
  const int K = static_cast<int>(a.size()) - 1;
  const auto z = zonal_kernel_all(K, f.dim(), t);
  double s = 0.0;
  for (int k = 0; k <= K; ++k) s += a[k] * z[k];
  return s;
}

double zonal_eval(const BandLimitedZonal& f, const SpherePoint& x) {
  if (x.dim() != f.dim()) throw std::invalid_argument("zonal_eval: dimension mismatch");
  return zonal_eval_at(f, f.pole().dot(x));
}

BandLimitedZonal apply_fractional_power(const BandLimitedZonal& f, double exponent) {
  std::vector<double> a(f.coeffs().begin(), f.coeffs().end());
  for (size_t k = 0; k < a.size(); ++k) {
    a[k] *= std::pow(1.0 + static_cast<double>(laplace_eigenvalue(static_cast<int>(k), f.dim())),
                     exponent);
  }
  return f.with_coeffs(std::move(a));
}

double sobolev_norm_2(const BandLimitedZonal& f, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("sobolev_norm_2: r must be >= 0");
  const auto a = f.coeffs();
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    const int kk = static_cast<int>(k);
    s += std::pow(1.0 + static_cast<double>(laplace_eigenvalue(kk, f.dim())), r) * a[k] * a[k] *
         static_cast<double>(harmonic_dim(kk, f.dim()));
  }
  return std::sqrt(s);
}

}  // namespace sphcnn
