#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sphcnn/harmonics.hpp"
#include "sphcnn/sphere.hpp"

namespace sphcnn {

/// Smooth cutoff: 1 on [0, 1], 0 on [2, inf), and on (1, 2) the exp-bump
/// blend h(2-t) / (h(2-t) + h(t-1)) with h(s) = exp(-1/s).
double eta_eval(double t);

/// zeta_{n,r}(t) = sum_{k=0}^{2n} (1 + lambda_k)^{-r/2} eta(k/n) Z_k(t).
/// With r = 0 this is the kernel l_n of the near-best operator.
class SmoothedKernel {
 public:
  SmoothedKernel(int n, double r, int d);

  int n() const { return n_; }
  double r() const { return r_; }
  int dim() const { return d_; }
  /// c_k = (1 + lambda_k)^{-r/2} eta(k/n), k = 0..2n.
  std::span<const double> coeffs() const { return coeffs_; }

  double operator()(double t) const;

 private:
  int n_;
  double r_;
  int d_;
  std::vector<double> coeffs_;
};

inline double smoothed_kernel_eval(const SmoothedKernel& kernel, double t) { return kernel(t); }

/// L_n on a band-limited zonal function: a_k -> eta(k/n) a_k. Exact, no quadrature.
BandLimitedZonal apply_Ln(const BandLimitedZonal& f, int n);

/// Empirical version of L_n built from samples y_1..y_m:
///   x -> (1/m) sum_i F_r(y_i) zeta_{n,r}(<x, y_i>),  F_r = (-Delta_0 + I)^{r/2} f.
/// The sample weights F_r(y_i) are computed once at construction.
class DiscretizedLn {
 public:
  DiscretizedLn(const BandLimitedZonal& f, double r, int n, std::vector<SpherePoint> samples);

  const SmoothedKernel& kernel() const { return kernel_; }
  std::span<const SpherePoint> samples() const { return samples_; }
  std::span<const double> weights() const { return weights_; }

  double operator()(const SpherePoint& x) const;

 private:
  SmoothedKernel kernel_;
  std::vector<SpherePoint> samples_;
  std::vector<double> weights_;
};

double discretized_Ln(const BandLimitedZonal& f, double r, int n,
                      std::span<const SpherePoint> samples, const SpherePoint& x);

/// Uniform nodes t_i = -1 + (i - 2)/N, i = 1..2N+3, on [-1 - 1/N, 1 + 1/N].
class SplineMesh {
 public:
  explicit SplineMesh(int N);

  int N() const { return N_; }
  int node_count() const { return 2 * N_ + 3; }
  /// Node t_i with the 1-based label i.
  double node(int i) const;
  /// Interior nodes t_2..t_{2N+2} (those inside [-1, 1]).
  std::vector<double> interior_nodes() const;

 private:
  int N_;
};

inline double relu(double u) { return u > 0.0 ? u : 0.0; }

/// delta_i(u) = N (relu(u - t_{i-1}) - 2 relu(u - t_i) + relu(u - t_{i+1})), 2 <= i <= 2N+2.
double delta_i_eval(const SplineMesh& mesh, int i, double u);

/// Quasi-interpolant L_t(g)(u) = sum_{i=2}^{2N+2} g(t_i) delta_i(u).
double apply_Lt(const std::function<double(double)>& g, const SplineMesh& mesh, double u);

/// Same operator driven by precomputed node values g(t_2)..g(t_{2N+2}).
double apply_Lt_values(std::span<const double> node_values, const SplineMesh& mesh, double u);

/// Second-difference extension R^{2N+1} -> R^{2N+3}.
///
/// values[p] holds v(t_{p+2}), i.e. the input is labelled by the interior
/// nodes t_2..t_{2N+2}. Output position q holds entry i = q+1. With this
/// labelling L_t(g)(u) = N sum_i out_i relu(u - t_i) holds exactly.
std::vector<double> apply_LN(std::span<const double> values);

/// N sum_i coeffs_i relu(u - t_i): the ReLU-sum side of the identity above.
double relu_expansion(std::span<const double> coeffs, const SplineMesh& mesh, double u);

}  // namespace sphcnn
