#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "sphcnn/harmonics.hpp"

using namespace sphcnn;

namespace {

// Bonnet recurrence for Legendre polynomials; independent of the library.
double legendre(int n, double t) {
  double p0 = 1.0, p1 = t;
  if (n == 0) return p0;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

SpherePoint e3() { return SpherePoint({0.0, 0.0, 1.0}); }

}  // namespace

TEST_SUITE("harmonics") {

TEST_CASE("gegenbauer: low degrees") {
  CHECK(gegenbauer_eval({0, 0.5}, 0.3) == 1.0);
  CHECK(gegenbauer_eval({1, 0.5}, 0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(gegenbauer_eval({2, 0.5}, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // C_2^lambda(t) = 2 lambda (lambda + 1) t^2 - lambda
  for (double lam : {0.5, 1.0, 2.5}) {
    for (double t : {-0.9, -0.2, 0.0, 0.4, 1.0}) {
      CHECK(gegenbauer_eval({2, lam}, t) ==
            doctest::Approx(2.0 * lam * (lam + 1.0) * t * t - lam).epsilon(1e-14));
    }
  }
}

TEST_CASE("gegenbauer: frozen high-precision values") {
  // Reference values from 40-digit evaluation of the hypergeometric form.
  CHECK(gegenbauer_eval({5, 1.5}, 0.37) == doctest::Approx(1.4680182775125000493).epsilon(1e-13));
  CHECK(gegenbauer_eval({10, 0.5}, -0.81) ==
        doctest::Approx(0.28094870395461012038).epsilon(1e-13));
  CHECK(gegenbauer_eval({7, 3.0}, 0.9) == doctest::Approx(146.23787520000007702).epsilon(1e-13));
}

TEST_CASE("gegenbauer: lambda = 1 is the Chebyshev U family") {
  for (int n = 0; n <= 30; ++n) {
    for (double theta : {0.3, 1.1, 2.0, 2.9}) {
      const double expected = std::sin((n + 1) * theta) / std::sin(theta);
      CHECK(gegenbauer_eval({n, 1.0}, std::cos(theta)) == doctest::Approx(expected).epsilon(1e-11));
    }
  }
}

TEST_CASE("gegenbauer_all agrees with pointwise evaluation") {
  const auto all = gegenbauer_all(40, 1.5, 0.61);
  REQUIRE(all.size() == 41);
  for (int n = 0; n <= 40; ++n) CHECK(all[n] == doctest::Approx(gegenbauer_eval({n, 1.5}, 0.61)));
}

TEST_CASE("property: |C_n(t)| <= C_n(1) for lambda >= 1/2") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen::integer(rng, 0, 60);
    const double lam = gen::real(rng, 0.5, 4.0);
    const double top = gegenbauer_eval({n, lam}, 1.0);
    for (int i = 0; i <= 400; ++i) {
      const double t = -1.0 + i / 200.0;
      CHECK(std::abs(gegenbauer_eval({n, lam}, t)) <= top * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("harmonic_dim") {
  for (int d = 3; d <= 8; ++d) CHECK(harmonic_dim(0, d) == 1);
  CHECK(harmonic_dim(1, 3) == 3);
  CHECK(harmonic_dim(2, 3) == 5);
  for (int n = 0; n <= 50; ++n) {
    CHECK(harmonic_dim(n, 3) == 2 * n + 1);
    CHECK(harmonic_dim(n, 4) == static_cast<std::int64_t>(n + 1) * (n + 1));
  }
  // d = 5: (n+1)(n+2)(2n+3)/6
  for (int n = 0; n <= 50; ++n) {
    CHECK(harmonic_dim(n, 5) == static_cast<std::int64_t>(n + 1) * (n + 2) * (2 * n + 3) / 6);
  }
}

TEST_CASE("laplace_eigenvalue") {
  for (int d = 3; d <= 8; ++d) CHECK(laplace_eigenvalue(0, d) == 0);
  CHECK(laplace_eigenvalue(1, 3) == 2);
  CHECK(laplace_eigenvalue(2, 3) == 6);
  CHECK(laplace_eigenvalue(7, 6) == 7 * 11);
}

TEST_CASE("zonal_kernel: examples") {
  CHECK(zonal_kernel(0, 5, -0.3) == 1.0);
  for (double t : {-1.0, -0.4, 0.0, 0.25, 1.0}) CHECK(zonal_kernel(1, 3, t) == doctest::Approx(3.0 * t));
  CHECK(zonal_kernel(4, 5, 0.2) == doctest::Approx(3.2559999999999994924).epsilon(1e-13));
}

TEST_CASE("property: Z_n(1) = N(n, d) for n <= 50, d in 3..8") {
  for (int d = 3; d <= 8; ++d) {
    for (int n = 0; n <= 50; ++n) {
      const double expected = static_cast<double>(harmonic_dim(n, d));
      CHECK(std::abs(zonal_kernel(n, d, 1.0) - expected) <= 1e-8 * expected);
    }
  }
}

TEST_CASE("property: d = 3 addition theorem Z_n = (2n+1) P_n") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen::integer(rng, 0, 80);
    const double t = gen::real(rng, -1.0, 1.0);
    CHECK(std::abs(zonal_kernel(n, 3, t) - (2.0 * n + 1.0) * legendre(n, t)) <= 1e-10);
  }
}

TEST_CASE("zonal_kernel_all matches zonal_kernel") {
  const auto all = zonal_kernel_all(25, 6, -0.37);
  REQUIRE(all.size() == 26);
  for (int n = 0; n <= 25; ++n) CHECK(all[n] == doctest::Approx(zonal_kernel(n, 6, -0.37)));
}

TEST_CASE("BandLimitedZonal validation") {
  CHECK_THROWS_AS(BandLimitedZonal(e3(), {}), std::invalid_argument);
  CHECK_THROWS_AS(BandLimitedZonal(e3(), std::vector<double>(kMaxZonalDegree + 2, 1.0)),
                  std::invalid_argument);
  CHECK_NOTHROW(BandLimitedZonal(e3(), std::vector<double>(kMaxZonalDegree + 1, 1.0)));
  CHECK_THROWS_AS(BandLimitedZonal(e3(), {1.0, std::nan("")}), std::invalid_argument);
  CHECK(BandLimitedZonal(e3(), {1.0, 0.0, 2.0, 0.0}).degree() == 2);
}

TEST_CASE("zonal_eval") {
  Rng rng(3);
  const BandLimitedZonal one(e3(), {1.0});
  const BandLimitedZonal z1(e3(), {0.0, 1.0});
  for (int i = 0; i < 10; ++i) CHECK(zonal_eval(one, gen::point(rng, 3)) == doctest::Approx(1.0));
  CHECK(zonal_eval(z1, e3()) == doctest::Approx(3.0));
  CHECK(std::abs(zonal_eval(z1, SpherePoint({1.0, 0.0, 0.0}))) <= 1e-15);
  CHECK_THROWS_AS(zonal_eval(z1, SpherePoint({0.0, 0.0, 0.0, 1.0})), std::invalid_argument);
}

TEST_CASE("apply_fractional_power") {
  const BandLimitedZonal f(e3(), {0.5, 0.3, 0.2, 0.1});
  const auto same = apply_fractional_power(f, 0.0);
  for (size_t k = 0; k < 4; ++k) CHECK(same.coeffs()[k] == f.coeffs()[k]);
  const auto g = apply_fractional_power(BandLimitedZonal(e3(), {0.0, 1.0}), 1.0);
  CHECK(g.coeffs()[0] == 0.0);
  CHECK(g.coeffs()[1] == doctest::Approx(3.0));
  CHECK(g.degree() == 1);
}

TEST_CASE("property: fractional powers invert") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = gen::integer(rng, 3, 8);
    const int K = gen::integer(rng, 0, 60);
    const BandLimitedZonal f(gen::point(rng, d), gen::vec(rng, K + 1));
    const double alpha = gen::real(rng, -3.0, 3.0);
    const auto back = apply_fractional_power(apply_fractional_power(f, alpha), -alpha);
    for (int k = 0; k <= K; ++k) {
      CHECK(std::abs(back.coeffs()[k] - f.coeffs()[k]) <= 1e-12 * std::max(1.0, std::abs(f.coeffs()[k])));
    }
  }
}

TEST_CASE("sobolev_norm_2") {
  for (double r : {0.0, 1.0, 3.5}) CHECK(sobolev_norm_2(BandLimitedZonal(e3(), {1.0}), r) == 1.0);
  CHECK(sobolev_norm_2(BandLimitedZonal(e3(), {0.0, 1.0}), 1.0) == doctest::Approx(3.0));
  CHECK(sobolev_norm_2(BandLimitedZonal(e3(), {0.5, 0.3, 0.2, 0.1}), 1.5) ==
        doctest::Approx(2.939058463231626326).epsilon(1e-13));
  CHECK_THROWS_AS(sobolev_norm_2(BandLimitedZonal(e3(), {1.0}), -1.0), std::invalid_argument);
}

TEST_CASE("r = 0 gives the L2 norm of the expansion") {
  // ||f||_2^2 = sum_k a_k^2 N(k, d) under the normalized measure; check by
  // Monte-Carlo with a tolerance of 4 standard errors.
  const BandLimitedZonal f(e3(), {0.4, 0.3, -0.2});
  const double exact = sobolev_norm_2(f, 0.0);
  CHECK(exact * exact == doctest::Approx(0.16 + 0.09 * 3 + 0.04 * 5));
  const auto pts = sample_uniform(3, 200000, 4);
  double s = 0.0, s2 = 0.0;
  for (const auto& x : pts) {
    const double v = zonal_eval(f, x);
    s += v * v;
    s2 += v * v * v * v;
  }
  const double n = static_cast<double>(pts.size());
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - exact * exact) <= 4.0 * se);
}

}  // TEST_SUITE
