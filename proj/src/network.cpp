#include "sphcnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sphcnn {

int minimal_depth(int m, int d, int S) {
  if (m < 1 || d < 1 || S < 2) throw std::invalid_argument("minimal_depth: bad arguments");
  const int M = m * d - 1;
  return (M + S - 2) / (S - 1);
}

CnnStack build_cnn_stack(std::span<const SpherePoint> points, int S, int J) {
  if (points.empty()) throw std::invalid_argument("build_cnn_stack: no points");
  if (S < 2) throw std::invalid_argument("build_cnn_stack: S must be >= 2");
  const int d = points[0].dim();
  const int m = static_cast<int>(points.size());
  const int Jmin = minimal_depth(m, d, S);
  if (J < Jmin) {
    throw std::invalid_argument("build_cnn_stack: J = " + std::to_string(J) +
                                " is below ceil((md-1)/(S-1)) = " + std::to_string(Jmin));
  }

  const auto factorization = factorize_filter(feature_filter(points, d), S);
  if (static_cast<int>(factorization.factors.size()) > J) {
    throw FactorizationError("build_cnn_stack: factorization needs more than J filters");
  }
  auto filters = pad_with_deltas(factorization.factors, J);

  CnnStack stack;
  stack.factorization_error = factorization.relative_error;
  stack.factor_count = static_cast<int>(factorization.factors.size());
  stack.layers.reserve(static_cast<size_t>(J));

  int width = d;
  Real prev_offset = 1.0L;  // B_0
  for (int j = 1; j <= J; ++j) {
    Filter w = filters[j - 1].padded_to(S);
    const Real offset = prev_offset * w.l1_norm();
    const int out_width = width + S;
    std::vector<Real> bias(static_cast<size_t>(out_width));
    if (j == 1) {
      std::fill(bias.begin(), bias.end(), -offset);
    } else {
      const std::vector<Real> ones(static_cast<size_t>(width), 1.0L);
      const auto row_sums = convolve(w, ones);
      for (int i = 0; i < out_width; ++i) bias[i] = prev_offset * row_sums[i] - offset;
    }
    stack.layers.push_back(CnnLayer{std::move(w), std::move(bias), width});
    width = out_width;
    prev_offset = offset;
  }
  stack.output_offset = prev_offset;
  return stack;
}

CnnTrace forward_cnn_trace(std::span<const CnnLayer> layers, std::span<const Real> x) {
  CnnTrace trace;
  Real min_pre = std::numeric_limits<Real>::infinity();
  trace.activations.emplace_back(x.begin(), x.end());
  for (const auto& layer : layers) {
    const auto& h = trace.activations.back();
    if (static_cast<int>(h.size()) != layer.input_width) {
      throw std::invalid_argument("forward_cnn: width mismatch");
    }
    auto next = convolve(layer.filter, h);
    for (size_t i = 0; i < next.size(); ++i) {
      const Real pre = next[i] - layer.bias[i];
      min_pre = std::min(min_pre, pre);
      next[i] = pre > 0.0L ? pre : 0.0L;
    }
    trace.activations.push_back(std::move(next));
  }
  trace.min_preactivation = static_cast<double>(min_pre);
  return trace;
}

CnnTrace forward_cnn_trace(std::span<const CnnLayer> layers, std::span<const double> x) {
  const std::vector<Real> xr(x.begin(), x.end());
  return forward_cnn_trace(layers, std::span<const Real>(xr));
}

std::vector<Real> forward_cnn(std::span<const CnnLayer> layers, const SpherePoint& x) {
  return std::move(forward_cnn_trace(layers, x.coords()).activations.back());
}

std::vector<Real> downsample(std::span<const Real> v, int d) {
  if (d < 1) throw std::invalid_argument("downsample: d must be >= 1");
  if (static_cast<size_t>(d) > v.size()) throw std::invalid_argument("downsample: d > D");
  const size_t count = v.size() / static_cast<size_t>(d);
  std::vector<Real> out(count);
  for (size_t i = 1; i <= count; ++i) out[i - 1] = v[i * d - 1];
  return out;
}

std::vector<Real> BlockMatrix::apply(std::span<const Real> v) const {
  if (static_cast<int>(v.size()) != block_count) {
    throw std::invalid_argument("BlockMatrix::apply: length mismatch");
  }
  std::vector<Real> out;
  out.reserve(static_cast<size_t>(rows()));
  for (Real vj : v)
    for (Real u : block) out.push_back(u * vj);
  return out;
}

std::vector<Real> BlockMatrix::apply_transpose(std::span<const Real> h) const {
  if (static_cast<int>(h.size()) != rows()) {
    throw std::invalid_argument("BlockMatrix::apply_transpose: length mismatch");
  }
  std::vector<Real> out(static_cast<size_t>(block_count), 0.0L);
  const size_t len = block.size();
  for (size_t j = 0; j < out.size(); ++j) {
    Real s = 0.0L;
    for (size_t i = 0; i < len; ++i) s += block[i] * h[j * len + i];
    out[j] = s;
  }
  return out;
}

NetworkTrace evaluate_trace(const SphericalNetwork& net, const SpherePoint& x) {
  if (x.dim() != net.d) throw std::invalid_argument("evaluate: dimension mismatch");
  NetworkTrace trace;
  auto cnn = forward_cnn_trace(net.cnn, x.coords());
  trace.min_cnn_preactivation = cnn.min_preactivation;
  trace.downsampled = downsample(cnn.activations.back(), net.d);

  std::vector<Real> h = trace.downsampled;
  for (const auto& layer : net.fc) {
    auto pre = layer.transposed ? layer.matrix.apply_transpose(h) : layer.matrix.apply(h);
    if (pre.size() != layer.bias.size()) throw std::logic_error("evaluate: bias length mismatch");
    for (size_t i = 0; i < pre.size(); ++i) {
      const Real u = pre[i] - layer.bias[i];
      pre[i] = u > 0.0L ? u : 0.0L;
    }
    h = pre;
    trace.fc_activations.push_back(std::move(pre));
  }
  if (h.size() != net.output_coeffs.size()) {
    throw std::logic_error("evaluate: output coefficient length mismatch");
  }
  Real s = 0.0L;
  for (size_t i = 0; i < h.size(); ++i) s += net.output_coeffs[i] * h[i];
  trace.output = static_cast<double>(s - net.output_shift);
  return trace;
}

double evaluate(const SphericalNetwork& net, const SpherePoint& x) {
  return evaluate_trace(net, x).output;
}

namespace {

void check_theorem_ranges(int d, int S, int N) {
  if (d < 3) throw std::invalid_argument("network: d must be >= 3");
  if (S < 2 || S > d) throw std::invalid_argument("network: filter length must satisfy 2 <= S <= d");
  if (N < 1) throw std::invalid_argument("network: N must be >= 1");
}

// First fully connected layer: Xi_{D2, 1_{2N+3}} with bias B_J + t_i on the
// first m blocks and B_J + 1 on the rest.
FullyConnectedLayer spline_feature_layer(const SplineMesh& mesh, int D2, int m, Real B_J) {
  const int len = mesh.node_count();
  FullyConnectedLayer layer{BlockMatrix{std::vector<Real>(static_cast<size_t>(len), 1.0L), D2},
                            false,
                            {}};
  layer.bias.reserve(static_cast<size_t>(len) * D2);
  for (int j = 1; j <= D2; ++j)
    for (int i = 1; i <= len; ++i) layer.bias.push_back(j <= m ? B_J + mesh.node(i) : B_J + 1.0);
  return layer;
}

}  // namespace

SphericalNetwork build_theorem1_net(const BandLimitedZonal& f, double r, int n,
                                    std::span<const SpherePoint> samples, int N, int S, int J) {
  const int d = f.dim();
  check_theorem_ranges(d, S, N);
  if (samples.empty()) throw std::invalid_argument("build_theorem1_net: no samples");
  const int m = static_cast<int>(samples.size());

  auto stack = build_cnn_stack(samples, S, J);
  SphericalNetwork net{NetworkFlavor::TwoFullyConnected, d, S, J, m, N, std::move(stack.layers),
                       stack.output_offset, std::nullopt, 0, 0.0, {}, {}, 0.0};
  const SplineMesh mesh(N);
  const int D2 = net.D2();
  if (D2 < m) throw std::logic_error("build_theorem1_net: downsampled width below m");

  net.fc.push_back(spline_feature_layer(mesh, D2, m, net.B_J));

  const SmoothedKernel zeta(n, r, d);
  std::vector<double> node_values;
  for (double t : mesh.interior_nodes()) node_values.push_back(zeta(t));
  double sup = 0.0;
  for (int k = 0; k < kKernelSupGrid; ++k) {
    sup = std::max(sup, std::abs(zeta(-1.0 + 2.0 * k / (kKernelSupGrid - 1))));
  }
  for (double v : node_values) sup = std::max(sup, std::abs(v));
  const double B_J2 = (1.0 + kKernelSupMargin) * sup;
  net.B_J2 = B_J2;
  net.B_J2_grid = kKernelSupGrid;
  net.B_J2_margin = kKernelSupMargin;

  const auto theta = apply_LN(node_values);
  FullyConnectedLayer second{BlockMatrix{std::vector<Real>(theta.begin(), theta.end()), D2}, true,
                             std::vector<Real>(static_cast<size_t>(D2), 0.0L)};
  for (int j = 0; j < m; ++j) second.bias[j] = -B_J2 / N;
  net.fc.push_back(std::move(second));

  const auto Fr = apply_fractional_power(f, r / 2.0);
  net.output_coeffs.assign(static_cast<size_t>(D2), 0.0L);
  Real mean = 0.0L;
  for (int j = 0; j < m; ++j) {
    const Real v = zonal_eval(Fr, samples[j]);
    net.output_coeffs[j] = static_cast<Real>(N) / m * v;
    mean += v;
  }
  net.output_shift = B_J2 * mean / m;
  return net;
}

SphericalNetwork build_theorem2_net(std::span<const SpherePoint> points,
                                    const std::vector<std::vector<double>>& gValues, int S,
                                    int N) {
  if (points.empty()) throw std::invalid_argument("build_theorem2_net: no points");
  const int d = points[0].dim();
  check_theorem_ranges(d, S, N);
  const int m = static_cast<int>(points.size());
  if (static_cast<int>(gValues.size()) != m) {
    throw std::invalid_argument("build_theorem2_net: gValues must have one row per point");
  }
  for (const auto& row : gValues) {
    if (static_cast<int>(row.size()) != 2 * N + 1) {
      throw std::invalid_argument("build_theorem2_net: each gValues row needs 2N+1 entries");
    }
  }
  const int J = minimal_depth(m, d, S);
  auto stack = build_cnn_stack(points, S, J);
  SphericalNetwork net{NetworkFlavor::OneFullyConnected, d, S, J, m, N, std::move(stack.layers),
                       stack.output_offset, std::nullopt, 0, 0.0, {}, {}, 0.0};
  const SplineMesh mesh(N);
  const int D2 = net.D2();
  if (D2 < m) throw std::logic_error("build_theorem2_net: downsampled width below m");
  net.fc.push_back(spline_feature_layer(mesh, D2, m, net.B_J));

  net.output_coeffs.assign(static_cast<size_t>(net.D1()), 0.0L);
  const size_t len = static_cast<size_t>(mesh.node_count());
  for (int j = 0; j < m; ++j) {
    const auto block = apply_LN(gValues[j]);
    for (size_t i = 0; i < len; ++i) net.output_coeffs[j * len + i] = static_cast<Real>(N) * block[i];
  }
  return net;
}

std::int64_t count_free_parameters(const SphericalNetwork& net) {
  const std::int64_t J = net.J;
  const std::int64_t S = net.S;
  const std::int64_t N = net.N;
  const std::int64_t m = net.m;
  const std::int64_t cnn = J * (S + 1) + J * (2 * S + 1);
  switch (net.flavor) {
    case NetworkFlavor::TwoFullyConnected:
      // node samples of zeta, B_J and B_{J+2}, then c^{(J+2)} and A
      return cnn + (2 * N + 1) + 2 + (m + 1);
    case NetworkFlavor::OneFullyConnected:
      // B_J, then node samples of every g_j
      return cnn + 1 + m * (2 * N + 1);
  }
  throw std::logic_error("count_free_parameters: unknown flavor");
}

}  // namespace sphcnn
