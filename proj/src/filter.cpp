#include "sphcnn/filter.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace sphcnn {

Filter::Filter(std::vector<Real> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) throw std::invalid_argument("Filter: no taps");
  for (Real w : taps_) {
    if (!std::isfinite(w)) throw std::invalid_argument("Filter: non-finite tap");
  }
  if (!(l1_norm() > 0.0L)) throw std::invalid_argument("Filter: all taps are zero");
}

Filter::Filter(std::span<const double> taps) : Filter(std::vector<Real>(taps.begin(), taps.end())) {}

Real Filter::operator[](int k) const {
  if (k < 0 || k >= static_cast<int>(taps_.size())) return 0.0L;
  return taps_[static_cast<size_t>(k)];
}

Real Filter::l1_norm() const {
  Real s = 0.0L;
  for (Real w : taps_) s += std::abs(w);
  return s;
}

Real Filter::sum() const {
  Real s = 0.0L;
  for (Real w : taps_) s += w;
  return s;
}

Filter Filter::padded_to(int S) const {
  if (S < support_length()) {
    throw std::invalid_argument("Filter::padded_to: support exceeds requested length");
  }
  auto t = taps_;
  t.resize(static_cast<size_t>(S) + 1, 0.0L);
  return Filter(std::move(t));
}

Filter Filter::trimmed() const {
  auto t = taps_;
  while (t.size() > 1 && t.back() == 0.0L) t.pop_back();
  return Filter(std::move(t));
}

std::vector<Real> convolve(const Filter& w, std::span<const Real> v) {
  if (v.empty()) throw std::invalid_argument("convolve: empty input vector");
  const int D = static_cast<int>(v.size());
  const int M = w.support_length();
  const auto taps = w.taps();
  std::vector<Real> out(static_cast<size_t>(D + M), 0.0L);
  for (int i = 1; i <= D + M; ++i) {
    Real s = 0.0L;
    for (int k = std::max(1, i - M); k <= std::min(D, i); ++k) s += taps[i - k] * v[k - 1];
    out[i - 1] = s;
  }
  return out;
}

Filter convolve(const Filter& w, const Filter& u) {
  const int Mw = w.support_length();
  const int Mu = u.support_length();
  std::vector<Real> out(static_cast<size_t>(Mw + Mu) + 1, 0.0L);
  for (int a = 0; a <= Mw; ++a)
    for (int b = 0; b <= Mu; ++b) out[a + b] += w[a] * u[b];
  // A product of nonzero polynomials is nonzero, but the taps may underflow.
  return Filter(std::move(out));
}

Filter convolve_all(std::span<const Filter> filters) {
  if (filters.empty()) throw std::invalid_argument("convolve_all: no filters");
  Filter acc = filters[0];
  for (size_t j = 1; j < filters.size(); ++j) acc = convolve(filters[j], acc);
  return acc;
}

ToeplitzMatrix::ToeplitzMatrix(Filter filter, int D) : filter_(std::move(filter)), D_(D) {
  if (D < 1) throw std::invalid_argument("ToeplitzMatrix: D must be >= 1");
}

Real ToeplitzMatrix::entry(int i, int k) const {
  if (i < 1 || i > rows() || k < 1 || k > cols()) {
    throw std::out_of_range("ToeplitzMatrix::entry: index out of range");
  }
  return filter_[i - k];
}

std::vector<Real> ToeplitzMatrix::dense() const {
  std::vector<Real> out(static_cast<size_t>(rows()) * cols());
  for (int i = 1; i <= rows(); ++i)
    for (int k = 1; k <= cols(); ++k) out[static_cast<size_t>(i - 1) * cols() + (k - 1)] = entry(i, k);
  return out;
}

std::vector<Real> toeplitz_apply(const ToeplitzMatrix& T, std::span<const Real> v) {
  if (static_cast<int>(v.size()) != T.cols()) {
    throw std::invalid_argument("toeplitz_apply: vector length does not match D");
  }
  std::vector<Real> out(static_cast<size_t>(T.rows()), 0.0L);
  for (int i = 1; i <= T.rows(); ++i) {
    Real s = 0.0L;
    for (int k = 1; k <= T.cols(); ++k) {
      const Real e = T.entry(i, k);
      if (e != 0.0L) s += e * v[k - 1];
    }
    out[i - 1] = s;
  }
  return out;
}

ToeplitzChain toeplitz_chain(std::span<const Filter> filters, int d) {
  if (filters.empty()) throw std::invalid_argument("toeplitz_chain: no filters");
  if (d < 1) throw std::invalid_argument("toeplitz_chain: d must be >= 1");

  using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  MatrixR product = MatrixR::Identity(d, d);
  int width = d;
  for (const auto& w : filters) {
    const ToeplitzMatrix T(w, width);
    MatrixR dense(T.rows(), T.cols());
    for (int i = 1; i <= T.rows(); ++i)
      for (int k = 1; k <= T.cols(); ++k) dense(i - 1, k - 1) = T.entry(i, k);
    product = dense * product;
    width = T.rows();
  }

  ToeplitzMatrix direct(convolve_all(filters), d);
  Real diff = 0.0L;
  for (int i = 1; i <= direct.rows(); ++i)
    for (int k = 1; k <= d; ++k)
      diff = std::max(diff, std::abs(product(i - 1, k - 1) - direct.entry(i, k)));
  return {std::move(direct), static_cast<double>(diff)};
}

namespace {

using Complex = std::complex<double>;
using ComplexR = std::complex<Real>;

// Parlett-Reinsch balancing restricted to powers of two (exact scaling).
void balance(Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  const double gamma = 0.95;
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      double col = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        row += std::abs(A(i, j));
        col += std::abs(A(j, i));
      }
      if (row == 0.0 || col == 0.0) continue;
      int exponent = 0;
      std::frexp(row / col, &exponent);
      exponent /= 2;
      if (exponent == 0) continue;
      const double new_col = std::ldexp(col, exponent);
      const double new_row = std::ldexp(row, -exponent);
      if (new_col + new_row < gamma * (col + row)) {
        changed = true;
        A.row(i) *= std::ldexp(1.0, -exponent);
        A.col(i) *= std::ldexp(1.0, exponent);
      }
    }
  }
}

std::string describe(std::span<const Real> coeffs) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (size_t k = 0; k < coeffs.size(); ++k) os << (k ? ", " : "") << static_cast<double>(coeffs[k]);
  os << "]";
  return os.str();
}

// Roots of sum_k c_k z^k with c.back() != 0 and c.front() != 0.
std::vector<Complex> polynomial_roots(std::span<const Real> c) {
  const int degree = static_cast<int>(c.size()) - 1;
  if (degree <= 0) return {};
  if (degree == 1) return {Complex(static_cast<double>(-c[0] / c[1]), 0.0)};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  companion.diagonal(-1).setOnes();
  for (int k = 0; k < degree; ++k) companion(k, degree - 1) = static_cast<double>(-c[k] / c[degree]);
  balance(companion);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw FactorizationError("factorize_filter: eigenvalue iteration did not converge for " +
                             describe(c));
  }
  std::vector<Complex> roots(solver.eigenvalues().begin(), solver.eigenvalues().end());
  for (const auto& z : roots) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw FactorizationError("factorize_filter: non-finite root for " + describe(c));
    }
  }
  return roots;
}

// A real root (degree 1) or a conjugate pair (degree 2).
struct RootAtom {
  ComplexR root;
  bool pair;
  int degree() const { return pair ? 2 : 1; }
};

std::vector<RootAtom> group_conjugates(std::vector<Complex> roots) {
  constexpr double kTol = 1e-8;
  std::vector<RootAtom> atoms;
  std::vector<Complex> upper;
  std::vector<Complex> lower;
  for (const auto& z : roots) {
    if (std::abs(z.imag()) <= kTol * std::max(1.0, std::abs(z))) {
      atoms.push_back({ComplexR(z.real(), 0.0L), false});
    } else if (z.imag() > 0) {
      upper.push_back(z);
    } else {
      lower.push_back(z);
    }
  }
  if (upper.size() != lower.size()) {
    throw FactorizationError("factorize_filter: unmatched complex roots");
  }
  std::vector<bool> used(lower.size(), false);
  for (const auto& z : upper) {
    size_t best = lower.size();
    double best_dist = 0.0;
    for (size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(std::conj(z) - lower[j]);
      if (best == lower.size() || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best == lower.size() || best_dist > kTol * std::max(1.0, std::abs(z))) {
      throw FactorizationError("factorize_filter: no conjugate partner within tolerance");
    }
    used[best] = true;
    // Average the two so the rebuilt quadratic is exactly real.
    const Complex avg = 0.5 * (z + std::conj(lower[best]));
    atoms.push_back({ComplexR(avg.real(), avg.imag()), true});
  }
  return atoms;
}

ComplexR horner(std::span<const Real> c, ComplexR z, ComplexR* deriv) {
  ComplexR p = c.back();
  ComplexR dp = 0.0L;
  for (size_t k = c.size() - 1; k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  if (deriv) *deriv = dp;
  return p;
}

// Newton refinement of a double-precision root in working precision. Steps
// are capped so a root inside a cluster cannot jump to a neighbour, and a step
// is kept only if it lowers the residual.
void polish(RootAtom& atom, std::span<const Real> c) {
  constexpr int kSteps = 4;
  constexpr Real kMaxRelStep = 1e-6L;
  ComplexR z = atom.root;
  ComplexR dp;
  Real residual = std::abs(horner(c, z, &dp));
  for (int it = 0; it < kSteps && residual > 0.0L; ++it) {
    if (dp == ComplexR(0.0L, 0.0L)) break;
    ComplexR step = horner(c, z, &dp) / dp;
    if (!atom.pair) step.imag(0.0L);
    if (std::abs(step) > kMaxRelStep * std::max<Real>(1.0L, std::abs(z))) break;
    const ComplexR next = z - step;
    ComplexR dnext;
    const Real r = std::abs(horner(c, next, &dnext));
    if (!(r < residual)) break;
    z = next;
    dp = dnext;
    residual = r;
  }
  // A pair must stay off the real axis.
  if (atom.pair && z.imag() == 0.0L) return;
  atom.root = z;
}

// Monic polynomial (ascending coefficients) whose roots are the given atoms.
std::vector<Real> monic_from_atoms(std::span<const RootAtom> atoms) {
  std::vector<Real> p{1.0L};
  for (const auto& a : atoms) {
    std::vector<Real> q;
    if (a.pair) {
      q = {std::norm(a.root), -2.0L * a.root.real(), 1.0L};
    } else {
      q = {-a.root.real(), 1.0L};
    }
    std::vector<Real> r(p.size() + q.size() - 1, 0.0L);
    for (size_t i = 0; i < p.size(); ++i)
      for (size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    p = std::move(r);
  }
  return p;
}

}  // namespace

Factorization factorize_filter(const Filter& W, int S) {
  if (S < 2) throw std::invalid_argument("factorize_filter: S must be >= 2");
  const auto taps = W.taps();

  int top = static_cast<int>(taps.size()) - 1;
  while (top > 0 && taps[top] == 0.0L) --top;
  int zeros = 0;
  while (taps[zeros] == 0.0L) ++zeros;

  std::vector<Real> core(taps.begin() + zeros, taps.begin() + top + 1);
  const Real lead = core.back();

  std::vector<RootAtom> atoms(static_cast<size_t>(zeros), RootAtom{ComplexR(0.0L, 0.0L), false});
  auto rest = group_conjugates(polynomial_roots(core));
  for (auto& a : rest) polish(a, core);
  atoms.insert(atoms.end(), rest.begin(), rest.end());

  std::stable_sort(atoms.begin(), atoms.end(), [](const RootAtom& a, const RootAtom& b) {
    return std::abs(a.root) < std::abs(b.root);
  });
  std::vector<RootAtom> order;
  order.reserve(atoms.size());
  for (size_t lo = 0, hi = atoms.size(); lo < hi;) {
    order.push_back(atoms[lo++]);
    if (lo < hi) order.push_back(atoms[--hi]);
  }

  // Next-fit packing: every closed bin holds >= S-1, hence p <= ceil(M/(S-1)).
  std::vector<std::vector<RootAtom>> bins;
  int fill = S;
  for (const auto& a : order) {
    if (fill + a.degree() > S) {
      bins.emplace_back();
      fill = 0;
    }
    bins.back().push_back(a);
    fill += a.degree();
  }
  if (bins.empty()) bins.emplace_back();

  const Real p = static_cast<Real>(bins.size());
  const Real scale = std::pow(std::abs(lead), 1.0L / p);
  Factorization result;
  result.factors.reserve(bins.size());
  for (size_t j = 0; j < bins.size(); ++j) {
    auto poly = monic_from_atoms(bins[j]);
    const Real s = (j == 0 && lead < 0.0L) ? -scale : scale;
    for (Real& c : poly) c *= s;
    result.factors.emplace_back(std::move(poly));
  }

  const Filter rebuilt = convolve_all(result.factors);
  Real diff = 0.0L;
  Real ref = 0.0L;
  const int len = std::max(rebuilt.support_length(), W.support_length());
  for (int k = 0; k <= len; ++k) {
    diff = std::max(diff, std::abs(rebuilt[k] - W[k]));
    ref = std::max(ref, std::abs(W[k]));
  }
  result.relative_error = static_cast<double>(diff / ref);
  if (!std::isfinite(result.relative_error)) {
    throw FactorizationError("factorize_filter: reconvolution is not finite for " +
                             describe(taps));
  }
  return result;
}

Filter feature_filter(std::span<const SpherePoint> points, int d) {
  if (points.empty()) throw std::invalid_argument("feature_filter: no points");
  const int m = static_cast<int>(points.size());
  std::vector<Real> taps(static_cast<size_t>(m) * d, 0.0L);
  for (int j = 1; j <= m; ++j) {
    const auto& y = points[j - 1];
    if (y.dim() != d) throw std::invalid_argument("feature_filter: dimension mismatch");
    for (int i = 1; i <= d; ++i) taps[static_cast<size_t>((j - 1) * d + (d - i))] = y[i - 1];
  }
  return Filter(std::move(taps));
}

std::vector<Filter> pad_with_deltas(std::vector<Filter> filters, int J) {
  if (J < static_cast<int>(filters.size())) {
    throw std::invalid_argument("pad_with_deltas: J is smaller than the number of filters");
  }
  while (static_cast<int>(filters.size()) < J) filters.push_back(Filter::delta());
  return filters;
}

}  // namespace sphcnn
