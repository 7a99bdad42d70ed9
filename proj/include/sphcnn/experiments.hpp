#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sphcnn/filter.hpp"
#include "sphcnn/harmonics.hpp"
#include "sphcnn/rng.hpp"
#include "sphcnn/sphere.hpp"

namespace sphcnn {

/// Univariate test function on [-1, 1] with analytic regularity data.
struct UnivariateFunction {
  std::string name;
  std::function<double(double)> value;
  /// Upper bound for the modulus of continuity omega(g, mu) on [-1, 1].
  std::function<double(double)> modulus;
  /// Hoelder exponent alpha in (0, 1] and seminorm |g|_{W^alpha_inf}.
  double alpha;
  double seminorm;
  /// Points in [-1, 1] where g is not differentiable.
  std::vector<double> kinks;
};

/// Built-in catalog used by the spline and ridge studies:
///   "abs"      |u - c|                 alpha = 1, seminorm 1
///   "abspower" |u - c|^alpha           alpha given, seminorm 1
///   "cos"      cos(pi (u - c)) / pi    alpha = 1, seminorm 1 (alias "cosscaled")
///   "square"   u^2                     omega(mu) = 2 mu
///   "cospi"    cos(pi u)               omega(mu) = pi mu
///   "linear"   u                       exactly reproduced by splines
///   "zero"     0
/// Throws std::invalid_argument for unknown names.
UnivariateFunction make_univariate(const std::string& name, double shift = 0.0,
                                   double alpha = 1.0);

/// Kink locations for ridge j. (c + 1) is a multiple of 1/3, so for every
/// power-of-two N the kink sits a third of a mesh cell away from a node.
double ridge_shift(int j);

/// Zonal test functions (pole = last coordinate axis):
///   "constant"  f = 1
///   "decay"     a_k = (1 + lambda_k)^{-(r+d)/2}, k = 0..K
///   "lowdeg"    a = (0.5, 0.3, 0.2, 0.1)
BandLimitedZonal make_zonal(const std::string& name, double r, int d, int K = 64);

struct RateRow {
  long long control;
  double sup_error;
  long long param_count;
  std::uint64_t seed;
  int grid_size;
};

struct RateStudyReport {
  std::string study;
  std::vector<RateRow> rows;
  double fitted_slope = 0.0;
  /// Parameters, norm conventions and tolerances in effect.
  std::vector<std::pair<std::string, std::string>> metadata;
  /// Hard failures of asserted bounds; empty on success.
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// CSV: '#'-prefixed metadata lines, a header row, one row per control value;
/// 17 significant digits, '\n' line endings.
void write_csv(std::ostream& os, const RateStudyReport& report);

struct Theorem2Config {
  int m = 2;
  int d = 3;
  int S = 2;
  std::string ridge = "abs";
  double alpha = 1.0;
  std::vector<int> Nlist{8, 16, 32, 64, 128, 256};
  int grid_size = 32768;
  std::uint64_t seed = 1;
  bool check_slope = true;
};

/// Additive ridge study: builds the one-FC network for each N, measures the
/// sup of f - network over the grid plus points on the kink sets
/// {<y_j, x> = c_j} and their pairwise intersections, asserts the bound sum_j |g_j| N^{-alpha} and the
/// parameter bound, and fits the slope in N.
RateStudyReport run_theorem2_rate(const Theorem2Config& cfg);

struct Theorem1Config {
  std::string f = "decay";
  double r = 1.0;
  int d = 3;
  int S = 2;
  std::vector<int> Jlist{8, 16, 32, 64};
  double tau = 0.1;
  int seeds = 10;
  int grid_size = 2000;
  std::uint64_t seed = 1;
};

/// Sample size, degree and mesh size the depth-J recipe prescribes.
struct Theorem1Recipe {
  int m;
  int n;
  int N;
};
Theorem1Recipe theorem1_recipe(int J, int d, int S, double r, double tau);

/// Smooth-target study: per J derives (m, n, N), builds the two-FC network on
/// random samples, and averages the grid sup error over seeds. Asserts the
/// parameter bound (3S+5)J+4 and the monotone trend.
RateStudyReport run_theorem1_rate(const Theorem1Config& cfg);

struct DiscretizationConfig {
  std::string f = "decay";
  double r = 1.0;
  int n = 4;
  int d = 3;
  std::vector<int> mlist{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  int seeds = 20;
  int grid_size = 400;
  std::uint64_t seed = 1;
  bool check_slope = true;
};

/// Seed-averaged grid sup of the empirical operator minus L_n(f) for each m.
RateStudyReport run_discretization_study(const DiscretizationConfig& cfg);

struct NearBestConfig {
  double r = 1.0;
  int d = 3;
  int K = 200;
  std::vector<int> nlist{4, 8, 16, 32, 64};
  int grid_size = 4000;
};

/// Grid sup of f - L_n f for the decay family a_k = (1+lambda_k)^{-(r+d)/2}.
RateStudyReport run_near_best_study(const NearBestConfig& cfg);

struct FactorizationBenchRow {
  int M;
  int S;
  int trials;
  double max_rel_error;
  int max_factor_count;
  int factor_bound;
};

struct FactorizationBench {
  std::vector<FactorizationBenchRow> rows;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Random filters with taps uniform on [-1, 1] (leading tap |w_M| >= 1e-3).
Filter random_filter(int M, Rng& rng);

FactorizationBench run_factorization_bench(const std::vector<int>& Mlist,
                                           const std::vector<int>& Slist, int trials,
                                           std::uint64_t seed);
void write_csv(std::ostream& os, const FactorizationBench& bench);

}  // namespace sphcnn
