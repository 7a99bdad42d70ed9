#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphcnn/real.hpp"
#include "sphcnn/sphere.hpp"

namespace sphcnn {

/// Finitely supported real sequence (w_0, ..., w_M) with support offset 0.
///
/// Trailing zero taps are kept: they record the declared support {0..M},
/// which fixes the shape of the Toeplitz matrix (a CNN layer with filter
/// length S always widens its input by S, whatever the actual taps are).
class Filter {
 public:
  explicit Filter(std::vector<Real> taps);
  explicit Filter(std::span<const double> taps);

  static Filter delta() { return Filter(std::vector<Real>{1.0L}); }

  std::span<const Real> taps() const { return taps_; }
  Real operator[](int k) const;  // 0 outside the support
  /// M, the last index of the declared support.
  int support_length() const { return static_cast<int>(taps_.size()) - 1; }
  Real l1_norm() const;
  Real sum() const;

  /// Declared support extended to {0..S} with zero taps; throws if S < M.
  Filter padded_to(int S) const;
  /// Trailing zero taps removed (keeps at least one tap).
  Filter trimmed() const;

  bool operator==(const Filter&) const = default;

 private:
  std::vector<Real> taps_;
};

/// (w * v)_i = sum_k w_{i-k} v_k, i = 1..D+M (1-based), returned 0-based.
std::vector<Real> convolve(const Filter& w, std::span<const Real> v);

/// w * u of two filters; support {0..M_w + M_u}.
Filter convolve(const Filter& w, const Filter& u);

/// w^{(p)} * ... * w^{(1)} for filters listed as w^{(1)}, ..., w^{(p)}.
Filter convolve_all(std::span<const Filter> filters);

/// (D + M) x D matrix T^w with entries w_{i-k}. Stored implicitly.
class ToeplitzMatrix {
 public:
  ToeplitzMatrix(Filter filter, int D);

  const Filter& filter() const { return filter_; }
  int rows() const { return D_ + filter_.support_length(); }
  int cols() const { return D_; }
  /// Entry (i, k) with 1-based indices.
  Real entry(int i, int k) const;
  /// Row-major dense copy.
  std::vector<Real> dense() const;

 private:
  Filter filter_;
  int D_;
};

/// Matrix-vector product through the entries of T; agrees exactly with convolve.
std::vector<Real> toeplitz_apply(const ToeplitzMatrix& T, std::span<const Real> v);

struct ToeplitzChain {
  /// Toeplitz matrix of the convolved filter, shape (d + sum M_j) x d.
  ToeplitzMatrix matrix;
  /// Max entrywise difference between T^{(J)}...T^{(1)} (dense products) and `matrix`.
  double route_discrepancy;
};

/// Product T^{(J)} ... T^{(1)} for filters w^{(1)}, ..., w^{(J)} acting on R^d,
/// computed by both dense matrix products and the convolved filter.
ToeplitzChain toeplitz_chain(std::span<const Filter> filters, int d);

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Factorization {
  /// w^{(1)}, ..., w^{(p)}; each has declared support within {0..S}.
  std::vector<Filter> factors;
  /// max_k |(w^{(p)} * ... * w^{(1)})_k - W_k| / max_k |W_k|.
  double relative_error;
};

/// Writes W as a convolution of at most ceil(M/(S-1)) filters of length S.
///
/// The generating polynomial sum_k W_k z^k is split into its roots (zeros at
/// the origin are stripped first, the rest come from the balanced companion
/// matrix, then refined by Newton steps in working precision). Real roots and
/// conjugate pairs are packed next-fit into factors
/// of degree <= S, visiting roots in small/large modulus alternation, and the
/// leading coefficient is spread as |a|^{1/p} per factor with its sign on the
/// first. The achieved reconvolution error is measured and returned.
Factorization factorize_filter(const Filter& W, int S);

/// W with W_{(j-1)d + (d-i)} = (y_j)_i, so (T^W x)_{kd} = <y_k, x>.
Filter feature_filter(std::span<const SpherePoint> points, int d);

/// Appends delta filters until the list has exactly J entries.
std::vector<Filter> pad_with_deltas(std::vector<Filter> filters, int J);

}  // namespace sphcnn
