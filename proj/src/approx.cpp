#include "sphcnn/approx.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sphcnn {

namespace {

double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

// sum_k c_k Z_k(t) with the Gegenbauer recurrence run inline (no allocation).
double zonal_series(std::span<const double> c, double lambda, double t) {
  if (c.empty()) return 0.0;
  double prev = 1.0;  // C_0
  double sum = c[0];
  if (c.size() == 1) return sum;
  double cur = 2.0 * lambda * t;  // C_1
  sum += c[1] * cur * (1.0 + lambda) / lambda;
  for (size_t k = 2; k < c.size(); ++k) {
    const double n = static_cast<double>(k);
    const double next =
        (2.0 * (n + lambda - 1.0) * t * cur - (n + 2.0 * lambda - 2.0) * prev) / n;
    prev = cur;
    cur = next;
    if (c[k] != 0.0) sum += c[k] * cur * (n + lambda) / lambda;
  }
  return sum;
}

}  // namespace

double eta_eval(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("eta_eval: t must be >= 0");
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double a = bump(2.0 - t);
  const double b = bump(t - 1.0);
  return a / (a + b);
}

SmoothedKernel::SmoothedKernel(int n, double r, int d) : n_(n), r_(r), d_(d) {
  if (n < 1) throw std::invalid_argument("SmoothedKernel: n must be >= 1");
  if (!(r >= 0.0)) throw std::invalid_argument("SmoothedKernel: r must be >= 0");
  if (d < 3) throw std::invalid_argument("SmoothedKernel: d must be >= 3");
  coeffs_.resize(static_cast<size_t>(2 * n) + 1);
  for (int k = 0; k <= 2 * n; ++k) {
    const double eig = static_cast<double>(laplace_eigenvalue(k, d));
    coeffs_[k] = std::pow(1.0 + eig, -r / 2.0) * eta_eval(static_cast<double>(k) / n);
  }
}

double SmoothedKernel::operator()(double t) const {
  return zonal_series(coeffs_, gegenbauer_lambda(d_), t);
}

BandLimitedZonal apply_Ln(const BandLimitedZonal& f, int n) {
  if (n < 1) throw std::invalid_argument("apply_Ln: n must be >= 1");
  std::vector<double> a(f.coeffs().begin(), f.coeffs().end());
  for (size_t k = 0; k < a.size(); ++k) a[k] *= eta_eval(static_cast<double>(k) / n);
  return f.with_coeffs(std::move(a));
}

DiscretizedLn::DiscretizedLn(const BandLimitedZonal& f, double r, int n,
                             std::vector<SpherePoint> samples)
    : kernel_(n, r, f.dim()), samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("discretized_Ln: empty sample list");
  const auto Fr = apply_fractional_power(f, r / 2.0);
  weights_.reserve(samples_.size());
  for (const auto& y : samples_) {
    if (y.dim() != f.dim()) throw std::invalid_argument("discretized_Ln: dimension mismatch");
    weights_.push_back(zonal_eval(Fr, y));
  }
}

double DiscretizedLn::operator()(const SpherePoint& x) const {
  double s = 0.0;
  for (size_t i = 0; i < samples_.size(); ++i) s += weights_[i] * kernel_(x.dot(samples_[i]));
  return s / static_cast<double>(samples_.size());
}

double discretized_Ln(const BandLimitedZonal& f, double r, int n,
                      std::span<const SpherePoint> samples, const SpherePoint& x) {
  DiscretizedLn op(f, r, n, std::vector<SpherePoint>(samples.begin(), samples.end()));
  return op(x);
}

SplineMesh::SplineMesh(int N) : N_(N) {
  if (N < 1) throw std::invalid_argument("SplineMesh: N must be >= 1");
}

double SplineMesh::node(int i) const {
  if (i < 1 || i > node_count()) {
    throw std::out_of_range("SplineMesh::node: label " + std::to_string(i) + " out of range");
  }
  return -1.0 + static_cast<double>(i - 2) / N_;
}

std::vector<double> SplineMesh::interior_nodes() const {
  std::vector<double> t;
  t.reserve(static_cast<size_t>(2 * N_ + 1));
  for (int i = 2; i <= 2 * N_ + 2; ++i) t.push_back(node(i));
  return t;
}

double delta_i_eval(const SplineMesh& mesh, int i, double u) {
  if (i < 2 || i > 2 * mesh.N() + 2) {
    throw std::out_of_range("delta_i_eval: index " + std::to_string(i) + " outside [2, 2N+2]");
  }
  return mesh.N() *
         (relu(u - mesh.node(i - 1)) - 2.0 * relu(u - mesh.node(i)) + relu(u - mesh.node(i + 1)));
}

double apply_Lt_values(std::span<const double> node_values, const SplineMesh& mesh, double u) {
  if (static_cast<int>(node_values.size()) != 2 * mesh.N() + 1) {
    throw std::invalid_argument("apply_Lt: expected 2N+1 node values");
  }
  double s = 0.0;
  for (int i = 2; i <= 2 * mesh.N() + 2; ++i) {
    s += node_values[static_cast<size_t>(i - 2)] * delta_i_eval(mesh, i, u);
  }
  return s;
}

double apply_Lt(const std::function<double(double)>& g, const SplineMesh& mesh, double u) {
  std::vector<double> v;
  v.reserve(static_cast<size_t>(2 * mesh.N() + 1));
  for (double t : mesh.interior_nodes()) v.push_back(g(t));
  return apply_Lt_values(v, mesh, u);
}

std::vector<double> apply_LN(std::span<const double> values) {
  if (values.size() < 3 || values.size() % 2 == 0) {
    throw std::invalid_argument("apply_LN: expected 2N+1 values with N >= 1, got " +
                                std::to_string(values.size()));
  }
  const int N = static_cast<int>(values.size() - 1) / 2;
  // v(i) is the value at node t_i, i = 2..2N+2.
  auto v = [&](int i) { return values[static_cast<size_t>(i - 2)]; };
  std::vector<double> out(static_cast<size_t>(2 * N + 3));
  out[0] = v(2);
  out[1] = v(3) - 2.0 * v(2);
  for (int i = 3; i <= 2 * N + 1; ++i) out[i - 1] = v(i - 1) - 2.0 * v(i) + v(i + 1);
  out[2 * N + 1] = v(2 * N + 1) - 2.0 * v(2 * N + 2);
  out[2 * N + 2] = v(2 * N + 2);
  return out;
}

double relu_expansion(std::span<const double> coeffs, const SplineMesh& mesh, double u) {
  if (static_cast<int>(coeffs.size()) != mesh.node_count()) {
    throw std::invalid_argument("relu_expansion: expected 2N+3 coefficients");
  }
  double s = 0.0;
  for (int i = 1; i <= mesh.node_count(); ++i) {
    s += coeffs[static_cast<size_t>(i - 1)] * relu(u - mesh.node(i));
  }
  return mesh.N() * s;
}

}  // namespace sphcnn
