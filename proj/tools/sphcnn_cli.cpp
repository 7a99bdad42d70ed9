// sphcnn: command-line driver for the rate studies, the factorization bench
// and network export.
//
// Exit status: 0 success, 1 an asserted bound was violated, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphcnn/approx.hpp"
#include "sphcnn/experiments.hpp"
#include "sphcnn/filter.hpp"
#include "sphcnn/network.hpp"

namespace {

using namespace sphcnn;

constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

long long parse_int(const std::string& s) {
  size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

// "8,16,32", "1:63" (inclusive) or "8:256:x2" (geometric).
std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  for (const auto& item : split(spec, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(static_cast<int>(parse_int(parts[0])));
      continue;
    }
    if (parts.size() > 3) throw UsageError("bad range '" + item + "'");
    const long long a = parse_int(parts[0]);
    const long long b = parse_int(parts[1]);
    if (b < a) throw UsageError("empty range '" + item + "'");
    if (parts.size() == 2) {
      for (long long v = a; v <= b; ++v) out.push_back(static_cast<int>(v));
    } else {
      if (parts[2].size() < 2 || parts[2][0] != 'x') throw UsageError("bad step '" + item + "'");
      const long long k = parse_int(parts[2].substr(1));
      if (k < 2 || a < 1) throw UsageError("geometric range needs factor >= 2 and start >= 1");
      for (long long v = a; v <= b; v *= k) out.push_back(static_cast<int>(v));
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  for (const auto& item : split(spec, ',')) {
    size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
    if (pos != item.size()) throw UsageError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// Writes to --out when given, else standard output.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open '" + path + "' for writing");
  write(os);
  if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

int report_status(const std::vector<std::string>& violations) {
  for (const auto& v : violations) std::cerr << "violation: " << v << '\n';
  return violations.empty() ? 0 : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical CNN constructions: rate studies, factorization bench, network export"};
  app.require_subcommand(1);

  std::string out;
  std::uint64_t seed = 1;
  int d = 3, S = 2, J = 0, N = 0, m = 0, n = 0, grid = 0, seeds = 0, trials = 100, K = 200;
  double r = 1.0, alpha = 1.0, tau = 0.1;
  std::string taps, ridge = "abs", fname = "decay", flavor = "two-fc";
  std::string Nlist = "8:256:x2", Jlist = "8,16,32,64", mlist = "16:4096:x2", nlist = "4:64:x2";
  std::string Mlist = "1:63", Slist = "2:8";

  auto add_out = [&](CLI::App* sc) {
    sc->add_option("--out", out, "CSV/output path (default: standard output)");
  };

  auto* fac = app.add_subcommand("factorize", "Factor one filter into filters of length <= S");
  fac->add_option("--taps", taps, "Comma-separated taps w_0,...,w_M")->required();
  fac->add_option("--S", S, "Maximal factor length")->check(CLI::Range(2, 1 << 20));
  add_out(fac);

  auto* t2 = app.add_subcommand("thm2-rate", "Additive ridge study over a range of N");
  t2->add_option("--m", m = 2, "Number of ridge directions")->check(CLI::PositiveNumber);
  t2->add_option("--d", d, "Ambient dimension");
  t2->add_option("--S", S, "Filter length");
  t2->add_option("--ridge", ridge, "abs | abspower | cos | square | cospi | linear | zero");
  t2->add_option("--alpha", alpha, "Hoelder exponent for abspower");
  t2->add_option("--N", Nlist, "Mesh sizes (list or range)");
  t2->add_option("--grid-size", grid, "Evaluation grid size");
  t2->add_option("--seed", seed, "Seed");
  add_out(t2);

  auto* t1 = app.add_subcommand("thm1-rate", "Smooth zonal target study over a range of depths J");
  t1->add_option("--f", fname, "constant | decay | lowdeg");
  t1->add_option("--r", r, "Smoothness index");
  t1->add_option("--d", d, "Ambient dimension");
  t1->add_option("--S", S, "Filter length");
  t1->add_option("--J", Jlist, "Depths (list or range)");
  t1->add_option("--tau", tau, "Recipe parameter tau > 0");
  t1->add_option("--seeds", seeds, "Seeds averaged per depth");
  t1->add_option("--grid-size", grid, "Evaluation grid size");
  t1->add_option("--seed", seed, "Base seed");
  add_out(t1);

  auto* disc = app.add_subcommand("discretize", "Monte-Carlo discretization of L_n over sample sizes m");
  disc->add_option("--f", fname, "constant | decay | lowdeg");
  disc->add_option("--r", r, "Smoothness index");
  disc->add_option("--n", n = 4, "Operator degree");
  disc->add_option("--d", d, "Ambient dimension");
  disc->add_option("--m", mlist, "Sample sizes (list or range)");
  disc->add_option("--seeds", seeds, "Seeds averaged per m");
  disc->add_option("--grid-size", grid, "Evaluation grid size");
  disc->add_option("--seed", seed, "Base seed");
  add_out(disc);

  auto* nb = app.add_subcommand("near-best", "Error of L_n on the coefficient-decay family");
  nb->add_option("--r", r, "Smoothness index");
  nb->add_option("--d", d, "Ambient dimension");
  nb->add_option("--n", nlist, "Degrees (list or range)");
  nb->add_option("--K", K, "Truncation degree of the test function");
  nb->add_option("--grid-size", grid, "Evaluation grid size");
  add_out(nb);

  auto* bench = app.add_subcommand("bench-factor", "Random-filter factorization bench");
  bench->add_option("--M", Mlist, "Filter degrees (list or range)");
  bench->add_option("--S", Slist, "Factor lengths (list or range)");
  bench->add_option("--trials", trials, "Filters per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "Seed");
  add_out(bench);

  auto* exp = app.add_subcommand("export-net", "Build one network and write it in text form");
  exp->add_option("--flavor", flavor, "two-fc (smooth target) | one-fc (additive ridge)")
      ->check(CLI::IsMember({"two-fc", "one-fc"}));
  exp->add_option("--d", d, "Ambient dimension");
  exp->add_option("--S", S, "Filter length");
  exp->add_option("--J", J, "Depth (two-fc; default from --m)");
  exp->add_option("--m", m, "Number of samples / ridge directions");
  exp->add_option("--N", N, "Mesh size (two-fc default from the depth recipe)");
  exp->add_option("--n", n, "Operator degree (two-fc)");
  exp->add_option("--r", r, "Smoothness index (two-fc)");
  exp->add_option("--f", fname, "Zonal target (two-fc)");
  exp->add_option("--ridge", ridge, "Ridge function (one-fc)");
  exp->add_option("--alpha", alpha, "Hoelder exponent for abspower (one-fc)");
  exp->add_option("--seed", seed, "Seed for the sample points");
  add_out(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fac) {
      const Filter w(parse_double_list(taps));
      const auto fz = factorize_filter(w, S);
      emit(out, [&](std::ostream& os) {
        os << std::setprecision(17);
        os << "# relative_error=" << fz.relative_error << '\n';
        os << "factor,taps\n";
        for (size_t p = 0; p < fz.factors.size(); ++p) {
          os << p + 1;
          for (double t : fz.factors[p].taps()) os << ',' << t;
          os << '\n';
        }
      });
      std::vector<std::string> violations;
      if (fz.relative_error > 1e-6) violations.push_back("relative reconvolution error above 1e-6");
      const int bound = (w.support_length() - 1 + S - 2) / (S - 1);
      if (static_cast<int>(fz.factors.size()) > std::max(bound, 1)) {
        violations.push_back("factor count above ceil(M/(S-1))");
      }
      return report_status(violations);
    }
    if (*t2) {
      Theorem2Config cfg;
      cfg.m = m;
      cfg.d = d;
      cfg.S = S;
      cfg.ridge = ridge;
      cfg.alpha = alpha;
      cfg.Nlist = parse_int_list(Nlist);
      if (grid > 0) cfg.grid_size = grid;
      cfg.seed = seed;
      const auto report = run_theorem2_rate(cfg);
      emit(out, [&](std::ostream& os) { write_csv(os, report); });
      return report_status(report.violations);
    }
    if (*t1) {
      Theorem1Config cfg;
      cfg.f = fname;
      cfg.r = r;
      cfg.d = d;
      cfg.S = S;
      cfg.Jlist = parse_int_list(Jlist);
      cfg.tau = tau;
      if (seeds > 0) cfg.seeds = seeds;
      if (grid > 0) cfg.grid_size = grid;
      cfg.seed = seed;
      const auto report = run_theorem1_rate(cfg);
      emit(out, [&](std::ostream& os) { write_csv(os, report); });
      return report_status(report.violations);
    }
    if (*disc) {
      DiscretizationConfig cfg;
      cfg.f = fname;
      cfg.r = r;
      cfg.n = n;
      cfg.d = d;
      cfg.mlist = parse_int_list(mlist);
      if (seeds > 0) cfg.seeds = seeds;
      if (grid > 0) cfg.grid_size = grid;
      cfg.seed = seed;
      const auto report = run_discretization_study(cfg);
      emit(out, [&](std::ostream& os) { write_csv(os, report); });
      return report_status(report.violations);
    }
    if (*nb) {
      NearBestConfig cfg;
      cfg.r = r;
      cfg.d = d;
      cfg.K = K;
      cfg.nlist = parse_int_list(nlist);
      if (grid > 0) cfg.grid_size = grid;
      const auto report = run_near_best_study(cfg);
      emit(out, [&](std::ostream& os) { write_csv(os, report); });
      return report_status(report.violations);
    }
    if (*bench) {
      const auto result =
          run_factorization_bench(parse_int_list(Mlist), parse_int_list(Slist), trials, seed);
      emit(out, [&](std::ostream& os) { write_csv(os, result); });
      return report_status(result.violations);
    }
    if (*exp) {
      SphericalNetwork net = [&] {
        if (flavor == "one-fc") {
          const int mm = m > 0 ? m : 2;
          const int NN = N > 0 ? N : 16;
          const auto points = sample_uniform(d, mm, seed);
          const SplineMesh mesh(NN);
          std::vector<std::vector<double>> gValues;
          for (int j = 0; j < mm; ++j) {
            const auto g = make_univariate(ridge, ridge_shift(j), alpha);
            std::vector<double> row;
            for (double t : mesh.interior_nodes()) row.push_back(g.value(t));
            gValues.push_back(std::move(row));
          }
          return build_theorem2_net(points, gValues, S, NN);
        }
        const auto f = make_zonal(fname, r, d);
        int JJ = J;
        int mm = m;
        if (JJ <= 0) JJ = minimal_depth(mm > 0 ? mm : 4, d, S);
        if (mm <= 0) mm = ((S - 1) * JJ + 1) / d;
        int nn = n, NN = N;
        if (nn <= 0 || NN <= 0) {
          const auto recipe = theorem1_recipe(JJ, d, S, r, tau);
          if (nn <= 0) nn = recipe.n;
          if (NN <= 0) NN = recipe.N;
        }
        const auto samples = sample_uniform(d, mm, seed);
        return build_theorem1_net(f, r, nn, samples, NN, S, JJ);
      }();
      emit(out, [&](std::ostream& os) { write_network(os, net); });
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitViolation;
  }
  return kExitUsage;
}
