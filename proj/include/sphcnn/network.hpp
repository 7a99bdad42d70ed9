#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sphcnn/approx.hpp"
#include "sphcnn/filter.hpp"
#include "sphcnn/harmonics.hpp"
#include "sphcnn/sphere.hpp"

namespace sphcnn {

/// One convolutional layer h -> relu(T^w h - b).
struct CnnLayer {
  Filter filter;            // declared support {0..S}
  std::vector<Real> bias;   // length input_width + S
  int input_width;

  int filter_length() const { return filter.support_length(); }
  int output_width() const { return input_width + filter_length(); }
};

struct CnnStack {
  std::vector<CnnLayer> layers;
  /// B_J = prod_p ||w^{(p)}||_1.
  Real output_offset;
  /// Reconvolution error reported by the filter factorization.
  double factorization_error;
  /// Number of non-delta factors before padding.
  int factor_count;
};

/// Smallest admissible depth ceil((m d - 1)/(S - 1)).
int minimal_depth(int m, int d, int S);

/// CNN layers whose output satisfies (h^{(J)}(x))_{kd} = <y_k, x> + B_J.
///
/// Filters come from factorizing the feature filter of `points` and padding
/// with deltas to J layers. Layer 1 has bias -||w^{(1)}||_1 1 (length d + S);
/// layer j >= 2 has bias B_{j-1} T^{(j)} 1 - B_j 1 with B_j = prod_{p<=j} ||w^{(p)}||_1.
CnnStack build_cnn_stack(std::span<const SpherePoint> points, int S, int J);

struct CnnTrace {
  /// h^{(0)} = x, h^{(1)}, ..., h^{(J)}.
  std::vector<std::vector<Real>> activations;
  /// Smallest pre-activation seen across all layers (+inf with no layers).
  double min_preactivation;
};

CnnTrace forward_cnn_trace(std::span<const CnnLayer> layers, std::span<const Real> x);
CnnTrace forward_cnn_trace(std::span<const CnnLayer> layers, std::span<const double> x);
std::vector<Real> forward_cnn(std::span<const CnnLayer> layers, const SpherePoint& x);

/// (v_{id})_{i=1..floor(D/d)}.
std::vector<Real> downsample(std::span<const Real> v, int d);

/// Xi_{count, u}: block-diagonal (len(u) * count) x count matrix with u in every column block.
/// Never materialized.
struct BlockMatrix {
  std::vector<Real> block;
  int block_count;

  int rows() const { return static_cast<int>(block.size()) * block_count; }
  int cols() const { return block_count; }
  /// Xi v.
  std::vector<Real> apply(std::span<const Real> v) const;
  /// Xi^T h.
  std::vector<Real> apply_transpose(std::span<const Real> h) const;
};

enum class NetworkFlavor { TwoFullyConnected, OneFullyConnected };

struct FullyConnectedLayer {
  BlockMatrix matrix;
  bool transposed;  // F = Xi^T when true
  std::vector<Real> bias;
};

/// CNN stack + downsampling + one or two fully connected layers + linear readout.
///
/// TwoFullyConnected (smooth targets): output = c . h^{(J+2)} - A.
/// OneFullyConnected (additive ridge targets): output = c . h^{(J+1)}.
struct SphericalNetwork {
  NetworkFlavor flavor;
  int d;
  int S;
  int J;
  int m;
  int N;
  std::vector<CnnLayer> cnn;
  Real B_J;
  /// Bound on ||zeta_{n,r}||_C[-1,1] used in the second FC bias (two-layer flavor).
  std::optional<double> B_J2;
  /// Grid used to estimate B_J2 and the safety factor applied.
  int B_J2_grid = 0;
  double B_J2_margin = 0.0;
  std::vector<FullyConnectedLayer> fc;
  std::vector<Real> output_coeffs;
  Real output_shift = 0.0L;

  SplineMesh mesh() const { return SplineMesh(N); }
  int D2() const { return (d + J * S) / d; }
  int D1() const { return (2 * N + 3) * D2(); }
};

struct NetworkTrace {
  std::vector<Real> downsampled;
  std::vector<std::vector<Real>> fc_activations;
  double min_cnn_preactivation;
  double output;
};

NetworkTrace evaluate_trace(const SphericalNetwork& net, const SpherePoint& x);
double evaluate(const SphericalNetwork& net, const SpherePoint& x);

/// Grid points and relative margin used for B_{J+2}.
inline constexpr int kKernelSupGrid = 10000;
inline constexpr double kKernelSupMargin = 0.01;

/// Network realizing x -> (1/m) sum_j F_r(y_j) L_t(zeta_{n,r})(<y_j, x>) for the
/// sample set y (two fully connected layers).
SphericalNetwork build_theorem1_net(const BandLimitedZonal& f, double r, int n,
                                    std::span<const SpherePoint> samples, int N, int S, int J);

/// Network realizing x -> sum_j L_t(g_j)(<y_j, x>) with depth ceil((md-1)/(S-1))
/// (one fully connected layer). gValues[j][p] = g_j(t_{p+2}).
SphericalNetwork build_theorem2_net(std::span<const SpherePoint> points,
                                    const std::vector<std::vector<double>>& gValues, int S,
                                    int N);

/// Free-parameter count: J(S+1) taps + J(2S+1) bias degrees of freedom, plus
/// (2N+1) + 2 + (m+1) for the two-layer flavor or 1 + m(2N+1) for the one-layer flavor.
std::int64_t count_free_parameters(const SphericalNetwork& net);

/// Plain-text serialization (format "sphcnn-network 1"). See README for the layout.
void write_network(std::ostream& os, const SphericalNetwork& net);
SphericalNetwork read_network(std::istream& is);

}  // namespace sphcnn
