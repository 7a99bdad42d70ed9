#include "sphcnn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sphcnn/approx.hpp"
#include "sphcnn/network.hpp"
#include "sphcnn/stats.hpp"
#include "sphcnn/tolerances.hpp"

namespace sphcnn {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join(const std::vector<int>& v) {
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
  return os.str();
}

EvalGrid study_grid(int d, int G, std::uint64_t seed) {
  return d == 3 ? build_grid(d, G, GridKind::Fibonacci)
                : build_grid(d, G, GridKind::Random, derive_seed(seed, 0xC0FFEE));
}

std::string grid_label(int d) { return d == 3 ? "fibonacci" : "random"; }

SpherePoint north_pole(int d) {
  std::vector<double> p(static_cast<size_t>(d), 0.0);
  p.back() = 1.0;
  return SpherePoint(std::move(p));
}

// Least-squares slope when every error is positive; NaN otherwise.
double slope_of(const std::vector<RateRow>& rows) {
  std::vector<double> x, y;
  for (const auto& row : rows) {
    if (!(row.sup_error > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    x.push_back(static_cast<double>(row.control));
    y.push_back(row.sup_error);
  }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return loglog_slope(x, y);
}

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Orthonormal basis of the complement of span(basis), basis orthonormal.
std::vector<Vec> complement(const std::vector<Vec>& basis, int d) {
  std::vector<Vec> all = basis;
  std::vector<Vec> out;
  for (int axis = 0; axis < d && static_cast<int>(all.size()) < d; ++axis) {
    Vec v(static_cast<size_t>(d), 0.0);
    v[axis] = 1.0;
    for (const auto& b : all) {
      const double c = dot(v, b);
      for (int i = 0; i < d; ++i) v[i] -= c * b[i];
    }
    const double len = std::sqrt(dot(v, v));
    if (len < 1e-6) continue;
    for (double& x : v) x /= len;
    all.push_back(v);
    out.push_back(v);
  }
  return out;
}

// Points where ridge errors peak: samples of each kink set {<y_j, x> = c}
// and the pairwise intersections of kink sets.
std::vector<SpherePoint> kink_points(const std::vector<SpherePoint>& ys,
                                     const std::vector<UnivariateFunction>& ridges) {
  constexpr int kCurveSamples = 256;
  std::vector<SpherePoint> out;
  if (ys.empty()) return out;
  const int d = ys.front().dim();
  auto push = [&](Vec v) {
    if (std::sqrt(dot(v, v)) > 0.5) out.push_back(SpherePoint::normalize(std::move(v)));
  };
  for (size_t j = 0; j < ys.size(); ++j) {
    const Vec y(ys[j].coords().begin(), ys[j].coords().end());
    const auto perp = complement({y}, d);
    for (double c : ridges[j].kinks) {
      const double rad = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int s = 0; s < kCurveSamples; ++s) {
        const double th = 2.0 * std::numbers::pi * s / kCurveSamples;
        Vec x(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) {
          x[i] = c * y[i] + rad * (std::cos(th) * perp[0][i] + std::sin(th) * perp[1][i]);
        }
        push(std::move(x));
      }
    }
    for (size_t k = j + 1; k < ys.size(); ++k) {
      const Vec z(ys[k].coords().begin(), ys[k].coords().end());
      const double g = dot(y, z);
      Vec u(static_cast<size_t>(d));
      for (int i = 0; i < d; ++i) u[i] = z[i] - g * y[i];
      const double len = std::sqrt(dot(u, u));
      if (len < 1e-9) continue;
      for (double& x : u) x /= len;
      const auto rest = complement({y, u}, d);
      for (double cj : ridges[j].kinks) {
        for (double ck : ridges[k].kinks) {
          const double a = cj;
          const double b = (ck - g * cj) / len;
          const double rem = 1.0 - a * a - b * b;
          if (rem < 0.0) continue;
          for (const auto& e : rest) {
            for (double sgn : {-1.0, 1.0}) {
              Vec x(static_cast<size_t>(d));
              for (int i = 0; i < d; ++i) x[i] = a * y[i] + b * u[i] + sgn * std::sqrt(rem) * e[i];
              push(std::move(x));
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

UnivariateFunction make_univariate(const std::string& name, double shift, double alpha) {
  using std::numbers::pi;
  if (name == "abs") {
    return {name, [shift](double u) { return std::abs(u - shift); },
            [](double mu) { return mu; }, 1.0, 1.0, {shift}};
  }
  if (name == "abspower") {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw std::invalid_argument("abspower: alpha must lie in (0, 1]");
    }
    return {name, [shift, alpha](double u) { return std::pow(std::abs(u - shift), alpha); },
            [alpha](double mu) { return std::pow(mu, alpha); }, alpha, 1.0, {shift}};
  }
  if (name == "cos" || name == "cosscaled") {
    return {name, [shift](double u) { return std::cos(pi * (u - shift)) / pi; },
            [](double mu) { return mu; }, 1.0, 1.0, {}};
  }
  if (name == "square") {
    return {name, [](double u) { return u * u; }, [](double mu) { return 2.0 * mu; }, 1.0, 2.0, {}};
  }
  if (name == "cospi") {
    return {name, [](double u) { return std::cos(pi * u); }, [](double mu) { return pi * mu; },
            1.0, pi, {}};
  }
  if (name == "linear") {
    return {name, [](double u) { return u; }, [](double mu) { return mu; }, 1.0, 1.0, {}};
  }
  if (name == "zero") {
    return {name, [](double) { return 0.0; }, [](double) { return 0.0; }, 1.0, 0.0, {}};
  }
  throw std::invalid_argument("unknown univariate function '" + name + "'");
}

double ridge_shift(int j) {
  static constexpr double kShifts[] = {1.0 / 3.0, -2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0};
  return kShifts[static_cast<size_t>(j) % 4];
}

BandLimitedZonal make_zonal(const std::string& name, double r, int d, int K) {
  if (name == "constant") return BandLimitedZonal(north_pole(d), {1.0});
  if (name == "lowdeg") return BandLimitedZonal(north_pole(d), {0.5, 0.3, 0.2, 0.1});
  if (name == "decay") {
    if (K < 0) throw std::invalid_argument("make_zonal: K must be >= 0");
    std::vector<double> a(static_cast<size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
      a[k] = std::pow(1.0 + static_cast<double>(laplace_eigenvalue(k, d)), -(r + d) / 2.0);
    }
    return BandLimitedZonal(north_pole(d), std::move(a));
  }
  throw std::invalid_argument("unknown zonal test function '" + name + "'");
}

void write_csv(std::ostream& os, const RateStudyReport& report) {
  os << "# study=" << report.study << '\n';
  for (const auto& [k, v] : report.metadata) os << "# " << k << '=' << v << '\n';
  os << "# fitted_slope=" << fmt(report.fitted_slope) << '\n';
  os << "# status=" << (report.ok() ? "ok" : "violated") << '\n';
  for (const auto& v : report.violations) os << "# violation: " << v << '\n';
  os << "control_param,sup_error,param_count,seed,grid_size\n";
  for (const auto& row : report.rows) {
    os << row.control << ',' << fmt(row.sup_error) << ',' << row.param_count << ',' << row.seed
       << ',' << row.grid_size << '\n';
  }
}

RateStudyReport run_theorem2_rate(const Theorem2Config& cfg) {
  if (cfg.m < 1) throw std::invalid_argument("thm2-rate: m must be >= 1");
  if (cfg.Nlist.empty()) throw std::invalid_argument("thm2-rate: empty N list");

  std::vector<UnivariateFunction> ridges;
  for (int j = 0; j < cfg.m; ++j) ridges.push_back(make_univariate(cfg.ridge, ridge_shift(j), cfg.alpha));
  const double alpha = ridges.front().alpha;
  double seminorm_sum = 0.0;
  for (const auto& g : ridges) seminorm_sum += g.seminorm;

  const auto points = sample_uniform(cfg.d, cfg.m, cfg.seed);
  auto grid = study_grid(cfg.d, cfg.grid_size, cfg.seed);
  const auto extra = kink_points(points, ridges);
  grid.points.insert(grid.points.end(), extra.begin(), extra.end());

  RateStudyReport report;
  report.study = "thm2-rate";
  report.metadata = {{"d", std::to_string(cfg.d)},
                     {"S", std::to_string(cfg.S)},
                     {"m", std::to_string(cfg.m)},
                     {"ridge", cfg.ridge},
                     {"alpha", fmt(alpha)},
                     {"seminorm_sum", fmt(seminorm_sum)},
                     {"norm", "grid sup of f - c.h^(J+1) (lower bound of L_inf)"},
                     {"grid", grid_label(cfg.d) + "+kink-points"},
                     {"grid_size", std::to_string(grid.size())},
                     {"kink_points", std::to_string(extra.size())},
                     {"seed", std::to_string(cfg.seed)},
                     {"bound", "sum_j |g_j|_{W^alpha_inf} N^-alpha"}};

  for (int N : sorted_unique(cfg.Nlist)) {
    const SplineMesh mesh(N);
    std::vector<std::vector<double>> gValues;
    for (const auto& g : ridges) {
      std::vector<double> row;
      for (double t : mesh.interior_nodes()) row.push_back(g.value(t));
      gValues.push_back(std::move(row));
    }
    const auto net = build_theorem2_net(points, gValues, cfg.S, N);
    const double err = sup_norm_on_grid(
        [&](const SpherePoint& x) {
          double f = 0.0;
          for (int j = 0; j < cfg.m; ++j) f += ridges[j].value(points[j].dot(x));
          return f - evaluate(net, x);
        },
        grid);
    const auto params = count_free_parameters(net);
    report.rows.push_back({N, err, params, cfg.seed, static_cast<int>(grid.size())});

    const double bound = seminorm_sum * std::pow(static_cast<double>(N), -alpha);
    if (err > bound + tol::kBoundRoundingSlack) {
      report.violations.push_back("N=" + std::to_string(N) + ": sup error " + fmt(err) +
                                  " exceeds bound " + fmt(bound));
    }
    const long long pbound =
        static_cast<long long>(3 * cfg.S + 2) * minimal_depth(cfg.m, cfg.d, cfg.S) +
        static_cast<long long>(cfg.m) * (2 * N + 2);
    if (params > pbound) {
      report.violations.push_back("N=" + std::to_string(N) + ": parameter count " +
                                  std::to_string(params) + " exceeds " + std::to_string(pbound));
    }
  }
  report.fitted_slope = slope_of(report.rows);
  if (cfg.check_slope && !std::isnan(report.fitted_slope) &&
      std::abs(report.fitted_slope + alpha) > tol::kRidgeSlopeWindow) {
    report.violations.push_back("fitted slope " + fmt(report.fitted_slope) + " outside -" +
                                fmt(alpha) + " +/- " + fmt(tol::kRidgeSlopeWindow));
  }
  report.metadata.emplace_back("slope_window", "-alpha +/- " + fmt(tol::kRidgeSlopeWindow));
  return report;
}

Theorem1Recipe theorem1_recipe(int J, int d, int S, double r, double tau) {
  if (d < 3 || S < 2 || S > d) throw std::invalid_argument("thm1 recipe: need d >= 3, 2 <= S <= d");
  if (!(r > 0.0) || r == d - 1) throw std::invalid_argument("thm1 recipe: need r > 0, r != d-1");
  if (!(tau > 0.0)) throw std::invalid_argument("thm1 recipe: tau must be > 0");
  if (r > d - 1 && !(tau < r - (d - 1))) {
    throw std::invalid_argument("thm1 recipe: tau must be below r - (d-1) when r > d-1");
  }
  if (static_cast<long long>(J) * (S - 1) < d - 1) {
    throw std::invalid_argument("thm1 recipe: J must be >= (d-1)/(S-1)");
  }
  Theorem1Recipe recipe{};
  recipe.m = ((S - 1) * J + 1) / d;
  // Guard floor() against pow landing a hair below an exact integer.
  constexpr double kFloorGuard = 1e-12;
  if (r < d - 1) {
    recipe.n = static_cast<int>(std::floor(std::pow(recipe.m, 1.0 / (2.0 * (d - 1 + tau))) + kFloorGuard));
    recipe.N = static_cast<int>(std::lround(std::pow(recipe.n, d + 1)));
  } else {
    recipe.n = static_cast<int>(std::floor(std::pow(recipe.m, 1.0 / (2.0 * r)) + kFloorGuard));
    recipe.N = static_cast<int>(std::floor(std::pow(recipe.n, 2.0 + r) + kFloorGuard));
  }
  return recipe;
}

RateStudyReport run_theorem1_rate(const Theorem1Config& cfg) {
  if (cfg.seeds < 1) throw std::invalid_argument("thm1-rate: seeds must be >= 1");
  if (cfg.Jlist.empty()) throw std::invalid_argument("thm1-rate: empty J list");
  const auto f = make_zonal(cfg.f, cfg.r, cfg.d);
  const auto grid = study_grid(cfg.d, cfg.grid_size, cfg.seed);
  std::vector<double> target;
  target.reserve(grid.size());
  for (const auto& x : grid.points) target.push_back(zonal_eval(f, x));

  RateStudyReport report;
  report.study = "thm1-rate";
  report.metadata = {{"d", std::to_string(cfg.d)},
                     {"S", std::to_string(cfg.S)},
                     {"r", fmt(cfg.r)},
                     {"tau", fmt(cfg.tau)},
                     {"f", cfg.f},
                     {"f_sobolev_W2r", fmt(sobolev_norm_2(f, cfg.r))},
                     {"norm", "W_2^r proxy reported; W_inf^r not computed"},
                     {"error", "seed mean of grid sup |f - net| (lower bound of L_inf)"},
                     {"grid", grid_label(cfg.d)},
                     {"grid_size", std::to_string(grid.size())},
                     {"seeds", std::to_string(cfg.seeds)},
                     {"seed", std::to_string(cfg.seed)},
                     {"B_J2", "grid max of |zeta| over " + std::to_string(kKernelSupGrid) +
                                  " points, margin " + fmt(kKernelSupMargin)}};

  const auto Jlist = sorted_unique(cfg.Jlist);
  std::vector<std::string> recipes;
  double best_so_far = std::numeric_limits<double>::infinity();
  for (size_t row = 0; row < Jlist.size(); ++row) {
    const int J = Jlist[row];
    const auto recipe = theorem1_recipe(J, cfg.d, cfg.S, cfg.r, cfg.tau);
    recipes.push_back("J" + std::to_string(J) + ":m" + std::to_string(recipe.m) + ":n" +
                      std::to_string(recipe.n) + ":N" + std::to_string(recipe.N));
    std::vector<double> errors;
    long long params = 0;
    for (int s = 0; s < cfg.seeds; ++s) {
      const auto samples = sample_uniform(cfg.d, recipe.m, derive_seed(cfg.seed, row, s));
      const auto net = build_theorem1_net(f, cfg.r, recipe.n, samples, recipe.N, cfg.S, J);
      params = std::max<long long>(params, count_free_parameters(net));
      double err = 0.0;
      for (size_t g = 0; g < grid.size(); ++g) {
        err = std::max(err, std::abs(target[g] - evaluate(net, grid.points[g])));
      }
      errors.push_back(err);
    }
    const double avg = mean(errors);
    report.rows.push_back({J, avg, params, cfg.seed, static_cast<int>(grid.size())});

    const long long pbound = static_cast<long long>(3 * cfg.S + 5) * J + 4;
    if (params > pbound) {
      report.violations.push_back("J=" + std::to_string(J) + ": parameter count " +
                                  std::to_string(params) + " exceeds (3S+5)J+4 = " +
                                  std::to_string(pbound));
    }
    if (avg > tol::kMonotoneFactor * best_so_far) {
      report.violations.push_back("J=" + std::to_string(J) + ": error " + fmt(avg) + " exceeds " +
                                  fmt(tol::kMonotoneFactor) + " x earlier minimum " +
                                  fmt(best_so_far));
    }
    best_so_far = std::min(best_so_far, avg);
  }
  std::string joined;
  for (size_t i = 0; i < recipes.size(); ++i) joined += (i ? ";" : "") + recipes[i];
  report.metadata.emplace_back("recipe", joined);
  report.fitted_slope = slope_of(report.rows);
  return report;
}

RateStudyReport run_discretization_study(const DiscretizationConfig& cfg) {
  if (cfg.seeds < 1) throw std::invalid_argument("discretize: seeds must be >= 1");
  if (cfg.mlist.empty()) throw std::invalid_argument("discretize: empty m list");
  const auto f = make_zonal(cfg.f, cfg.r, cfg.d);
  const auto Lnf = apply_Ln(f, cfg.n);
  const auto grid = study_grid(cfg.d, cfg.grid_size, cfg.seed);
  std::vector<double> target;
  for (const auto& x : grid.points) target.push_back(zonal_eval(Lnf, x));

  RateStudyReport report;
  report.study = "discretize";
  report.metadata = {{"d", std::to_string(cfg.d)},
                     {"r", fmt(cfg.r)},
                     {"n", std::to_string(cfg.n)},
                     {"f", cfg.f},
                     {"error", "seed mean of grid sup |empirical L_n f - L_n f|"},
                     {"param_count", "0 (not applicable)"},
                     {"grid", grid_label(cfg.d)},
                     {"grid_size", std::to_string(grid.size())},
                     {"seeds", std::to_string(cfg.seeds)},
                     {"seed", std::to_string(cfg.seed)},
                     {"m_list", join(cfg.mlist)}};

  const auto mlist = sorted_unique(cfg.mlist);
  for (size_t row = 0; row < mlist.size(); ++row) {
    const int m = mlist[row];
    std::vector<double> errors;
    for (int s = 0; s < cfg.seeds; ++s) {
      const DiscretizedLn op(f, cfg.r, cfg.n,
                             sample_uniform(cfg.d, m, derive_seed(cfg.seed, row, s)));
      double err = 0.0;
      for (size_t g = 0; g < grid.size(); ++g) {
        err = std::max(err, std::abs(op(grid.points[g]) - target[g]));
      }
      errors.push_back(err);
    }
    report.rows.push_back({m, mean(errors), 0, cfg.seed, static_cast<int>(grid.size())});
  }
  report.fitted_slope = slope_of(report.rows);
  const double lo = tol::kDiscretizationSlopeCenter - tol::kDiscretizationSlopeWindow;
  const double hi = tol::kDiscretizationSlopeCenter + tol::kDiscretizationSlopeWindow;
  report.metadata.emplace_back("slope_window", "[" + fmt(lo) + ", " + fmt(hi) + "]");
  if (cfg.check_slope && !(report.fitted_slope >= lo && report.fitted_slope <= hi)) {
    report.violations.push_back("fitted slope " + fmt(report.fitted_slope) + " outside [" +
                                fmt(lo) + ", " + fmt(hi) + "]");
  }
  return report;
}

RateStudyReport run_near_best_study(const NearBestConfig& cfg) {
  const auto f = make_zonal("decay", cfg.r, cfg.d, cfg.K);
  const auto grid = study_grid(cfg.d, cfg.grid_size, 1);
  RateStudyReport report;
  report.study = "near-best";
  report.metadata = {{"d", std::to_string(cfg.d)},
                     {"r", fmt(cfg.r)},
                     {"K", std::to_string(cfg.K)},
                     {"f", "decay"},
                     {"grid_size", std::to_string(grid.size())}};
  for (int n : sorted_unique(cfg.nlist)) {
    const auto Lnf = apply_Ln(f, n);
    std::vector<double> diff(f.coeffs().size());
    for (size_t k = 0; k < diff.size(); ++k) diff[k] = f.coeffs()[k] - Lnf.coeffs()[k];
    const auto residual = f.with_coeffs(std::move(diff));
    const double err =
        sup_norm_on_grid([&](const SpherePoint& x) { return zonal_eval(residual, x); }, grid);
    report.rows.push_back({n, err, 0, 0, static_cast<int>(grid.size())});
  }
  report.fitted_slope = slope_of(report.rows);
  if (!(report.fitted_slope <= -cfg.r + tol::kNearBestSlopeSlack)) {
    report.violations.push_back("fitted slope " + fmt(report.fitted_slope) + " above -r + " +
                                fmt(tol::kNearBestSlopeSlack));
  }
  return report;
}

Filter random_filter(int M, Rng& rng) {
  if (M < 0) throw std::invalid_argument("random_filter: M must be >= 0");
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> taps(static_cast<size_t>(M) + 1);
  do {
    for (double& w : taps) w = unif(rng);
  } while (std::abs(taps.back()) < 1e-3);
  return Filter(std::move(taps));
}

FactorizationBench run_factorization_bench(const std::vector<int>& Mlist,
                                           const std::vector<int>& Slist, int trials,
                                           std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("bench-factor: trials must be >= 1");
  FactorizationBench bench;
  for (int M : sorted_unique(Mlist)) {
    if (M < 1) throw std::invalid_argument("bench-factor: M must be >= 1");
    for (int S : sorted_unique(Slist)) {
      if (S < 2) throw std::invalid_argument("bench-factor: S must be >= 2");
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(S)));
      FactorizationBenchRow row{M, S, trials, 0.0, 0, (M + S - 2) / (S - 1)};
      for (int t = 0; t < trials; ++t) {
        const auto fz = factorize_filter(random_filter(M, rng), S);
        row.max_rel_error = std::max(row.max_rel_error, fz.relative_error);
        row.max_factor_count = std::max(row.max_factor_count, static_cast<int>(fz.factors.size()));
        for (const auto& w : fz.factors) {
          if (w.support_length() > S) {
            bench.violations.push_back("M=" + std::to_string(M) + " S=" + std::to_string(S) +
                                       ": factor support exceeds S");
          }
        }
      }
      if (row.max_rel_error > tol::kFactorizationRelError) {
        bench.violations.push_back("M=" + std::to_string(M) + " S=" + std::to_string(S) +
                                   ": relative error " + fmt(row.max_rel_error));
      }
      if (row.max_factor_count > row.factor_bound) {
        bench.violations.push_back("M=" + std::to_string(M) + " S=" + std::to_string(S) +
                                   ": factor count " + std::to_string(row.max_factor_count) +
                                   " exceeds " + std::to_string(row.factor_bound));
      }
      bench.rows.push_back(row);
    }
  }
  return bench;
}

void write_csv(std::ostream& os, const FactorizationBench& bench) {
  os << "# study=bench-factor\n";
  os << "# status=" << (bench.ok() ? "ok" : "violated") << '\n';
  for (const auto& v : bench.violations) os << "# violation: " << v << '\n';
  os << "M,S,trials,max_rel_err,max_factor_count,factor_bound\n";
  for (const auto& r : bench.rows) {
    os << r.M << ',' << r.S << ',' << r.trials << ',' << fmt(r.max_rel_error) << ','
       << r.max_factor_count << ',' << r.factor_bound << '\n';
  }
}

}  // namespace sphcnn
