#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "generators.hpp"
#include "sphcnn/network.hpp"

using namespace sphcnn;

namespace {

std::vector<std::vector<double>> node_values(const std::vector<std::function<double(double)>>& gs,
                                             int N) {
  const SplineMesh mesh(N);
  std::vector<std::vector<double>> out;
  for (const auto& g : gs) {
    std::vector<double> row;
    for (double t : mesh.interior_nodes()) row.push_back(g(t));
    out.push_back(std::move(row));
  }
  return out;
}

double feature_error(const std::vector<SpherePoint>& ys, int S, const SpherePoint& x,
                     double* tail_error) {
  const int d = x.dim();
  const int J = minimal_depth(static_cast<int>(ys.size()), d, S);
  const auto stack = build_cnn_stack(ys, S, J);
  const auto h = forward_cnn(stack.layers, x);
  const auto down = downsample(h, d);
  double worst = 0.0;
  for (size_t k = 0; k < ys.size(); ++k) {
    worst = std::max(worst, static_cast<double>(std::abs(down[k] - stack.output_offset - ys[k].dot(x))));
  }
  if (tail_error) {
    *tail_error = 0.0;
    for (size_t k = ys.size(); k < down.size(); ++k) {
      *tail_error = std::max(*tail_error, static_cast<double>(std::abs(down[k] - stack.output_offset)));
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("minimal depth") {
  CHECK(minimal_depth(1, 3, 2) == 2);
  CHECK(minimal_depth(2, 3, 2) == 5);
  CHECK(minimal_depth(5, 8, 3) == 20);
  CHECK(minimal_depth(1, 3, 3) == 1);
  CHECK_THROWS_AS(minimal_depth(1, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(minimal_depth(0, 3, 2), std::invalid_argument);
}

TEST_CASE("cnn stack on the pole: hand-computed forward pass") {
  const std::vector<SpherePoint> ys{SpherePoint({0.0, 0.0, 1.0})};
  const auto stack = build_cnn_stack(ys, 2, 2);
  REQUIRE(stack.layers.size() == 2);
  CHECK(stack.output_offset == 1.0L);
  CHECK(stack.layers[0].bias == std::vector<Real>(5, -1.0L));
  CHECK(stack.layers[1].bias == std::vector<Real>{0, 0, 0, 0, 0, -1, -1});

  const auto x = SpherePoint::normalize({0.2, -0.4, 0.6});
  const auto h = forward_cnn(stack.layers, x);
  REQUIRE(h.size() == 7);
  const std::vector<double> expected{x[0] + 1, x[1] + 1, x[2] + 1, 1, 1, 1, 1};
  for (size_t i = 0; i < h.size(); ++i) CHECK(static_cast<double>(h[i]) == doctest::Approx(expected[i]));
  const auto down = downsample(h, 3);
  REQUIRE(down.size() == 2);
  CHECK(static_cast<double>(down[0]) == doctest::Approx(x[2] + 1.0));
  CHECK(static_cast<double>(down[1]) == doctest::Approx(1.0));

  CHECK_THROWS_AS(build_cnn_stack(ys, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_cnn_stack(std::vector<SpherePoint>{}, 2, 2), std::invalid_argument);
}

TEST_CASE("downsample") {
  const std::vector<Real> v{1, 2, 3, 4, 5, 6, 7};
  CHECK(downsample(v, 3) == std::vector<Real>{3, 6});
  CHECK(downsample(v, 1) == v);
  CHECK(downsample(v, 7) == std::vector<Real>{7});
  CHECK_THROWS_AS(downsample(v, 8), std::invalid_argument);
  CHECK_THROWS_AS(downsample(v, 0), std::invalid_argument);
}

TEST_CASE("zero-layer forward pass returns the input") {
  const auto x = SpherePoint::normalize({1.0, 2.0, 3.0});
  const auto trace = forward_cnn_trace(std::span<const CnnLayer>{}, x.coords());
  REQUIRE(trace.activations.size() == 1);
  CHECK(trace.min_preactivation == std::numeric_limits<double>::infinity());
  for (int i = 0; i < 3; ++i) CHECK(static_cast<double>(trace.activations[0][i]) == x[i]);
}

TEST_CASE("block matrix") {
  const BlockMatrix xi{{1.0L, 2.0L}, 3};
  CHECK(xi.rows() == 6);
  CHECK(xi.cols() == 3);
  CHECK(xi.apply(std::vector<Real>{1, -1, 2}) == std::vector<Real>{1, 2, -1, -2, 2, 4});
  CHECK(xi.apply_transpose(std::vector<Real>{1, 1, 0, 1, 3, 0}) == std::vector<Real>{3, 2, 3});
  CHECK_THROWS_AS(xi.apply(std::vector<Real>{1}), std::invalid_argument);
  CHECK_THROWS_AS(xi.apply_transpose(std::vector<Real>{1}), std::invalid_argument);
}

TEST_CASE("property: bias structure and nonnegative pre-activations") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = gen::integer(rng, 3, 6);
    const int S = gen::integer(rng, 2, d);
    const int m = gen::integer(rng, 1, 4);
    const auto ys = gen::points(rng, d, m);
    const int J = minimal_depth(m, d, S) + gen::integer(rng, 0, 2);
    const auto stack = build_cnn_stack(ys, S, J);
    REQUIRE(static_cast<int>(stack.layers.size()) == J);
    CHECK(stack.layers[0].bias.size() == static_cast<size_t>(d + S));
    Real offset = 1.0L;
    for (const auto& layer : stack.layers) {
      CHECK(layer.filter.support_length() == S);
      offset *= layer.filter.l1_norm();
    }
    CHECK(static_cast<double>(stack.output_offset) == doctest::Approx(static_cast<double>(offset)));
    // Rows S+1..width of T^{(j)} see the full filter, so the bias is constant there.
    for (size_t j = 1; j < stack.layers.size(); ++j) {
      const auto& b = stack.layers[j].bias;
      for (int i = S + 1; i < stack.layers[j].input_width; ++i) {
        CHECK(std::abs(static_cast<double>(b[i] - b[S])) <= 1e-12 * static_cast<double>(stack.output_offset));
      }
    }
    for (int k = 0; k < 10; ++k) {
      const auto x = gen::point(rng, d);
      CHECK(forward_cnn_trace(stack.layers, x.coords()).min_preactivation >= -1e-10);
    }
  }
}

TEST_CASE("property: feature identity") {
  Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = gen::integer(rng, 3, 8);
    const int S = gen::integer(rng, 2, d);
    const int m = gen::integer(rng, 1, 5);
    const auto ys = gen::points(rng, d, m);
    double tail = 0.0;
    CHECK(feature_error(ys, S, gen::point(rng, d), &tail) <= 1e-8);
    CHECK(tail <= 1e-8);
  }
}

TEST_CASE("two-layer network: constant target gives the linear kernel") {
  const BandLimitedZonal one(SpherePoint({0.0, 0.0, 1.0}), {1.0});
  const std::vector<SpherePoint> ys{SpherePoint::normalize({1.0, -1.0, 2.0})};
  const auto net = build_theorem1_net(one, 0.0, 1, ys, 4, 2, minimal_depth(1, 3, 2));
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto x = gen::point(rng, 3);
    CHECK(std::abs(evaluate(net, x) - (1.0 + 3.0 * ys[0].dot(x))) <= 1e-10);
  }
}

TEST_CASE("property: two-layer network equals its closed form") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = gen::integer(rng, 3, 5);
    const int S = gen::integer(rng, 2, d);
    const int m = gen::integer(rng, 1, 4);
    const int n = gen::integer(rng, 1, 4);
    const int N = gen::integer(rng, 1, 24);
    const double r = gen::real(rng, 0.0, 3.0);
    const auto ys = gen::points(rng, d, m);
    const BandLimitedZonal f(gen::point(rng, d), gen::vec(rng, gen::integer(rng, 1, 6)));
    const int J = minimal_depth(m, d, S) + gen::integer(rng, 0, 3);
    const auto net = build_theorem1_net(f, r, n, ys, N, S, J);
    const DiscretizedLn op(f, r, n, ys);
    const SplineMesh mesh(N);
    std::vector<double> zeta_nodes;
    for (double t : mesh.interior_nodes()) zeta_nodes.push_back(op.kernel()(t));
    for (int i = 0; i < 10; ++i) {
      const auto x = gen::point(rng, d);
      double closed = 0.0;
      for (int j = 0; j < m; ++j) {
        closed += op.weights()[j] * apply_Lt_values(zeta_nodes, mesh, ys[j].dot(x));
      }
      closed /= m;
      const auto trace = evaluate_trace(net, x);
      CHECK(std::abs(trace.output - closed) <= 1e-8);
      // The second FC layer sees L_t(zeta)/N + B_{J+2}/N, which must stay nonnegative.
      for (int j = 0; j < m; ++j) CHECK(trace.fc_activations[1][j] >= 0.0L);
      for (size_t k = static_cast<size_t>(m); k < trace.downsampled.size(); ++k) {
        CHECK(std::abs(static_cast<double>(trace.downsampled[k] - net.B_J)) <= 1e-10);
      }
      // Blocks past m see B_J against a bias of B_J + 1, so they are exactly zero.
      const size_t len = static_cast<size_t>(2 * N + 3);
      for (size_t i = static_cast<size_t>(m) * len; i < trace.fc_activations[0].size(); ++i) {
        CHECK(trace.fc_activations[0][i] == 0.0L);
      }
    }
  }
}

TEST_CASE("one-layer network: linear, zero and closed form") {
  const std::vector<SpherePoint> ys{SpherePoint::normalize({1.0, 0.0, 1.0})};
  const int N = 5;
  const auto lin = build_theorem2_net(ys, node_values({[](double u) { return 2.0 * u - 0.5; }}, N), 2, N);
  const auto zero = build_theorem2_net(ys, node_values({[](double) { return 0.0; }}, N), 2, N);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto x = gen::point(rng, 3);
    CHECK(std::abs(evaluate(lin, x) - (2.0 * ys[0].dot(x) - 0.5)) <= 1e-10);
    CHECK(evaluate(zero, x) == 0.0);
  }

  CHECK_THROWS_AS(build_theorem2_net(ys, node_values({[](double) { return 0.0; }}, 3), 2, N),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_theorem2_net(ys, {}, 2, N), std::invalid_argument);
  CHECK_THROWS_AS(build_theorem2_net(ys, node_values({[](double) { return 0.0; }}, N), 4, N),
                  std::invalid_argument);
}

TEST_CASE("property: one-layer network equals its closed form") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = gen::integer(rng, 3, 6);
    const int S = gen::integer(rng, 2, d);
    const int m = gen::integer(rng, 1, 4);
    const int N = gen::integer(rng, 1, 32);
    const auto ys = gen::points(rng, d, m);
    std::vector<std::function<double(double)>> gs;
    for (int j = 0; j < m; ++j) {
      const double c = gen::real(rng, -1.0, 1.0);
      const double a = gen::real(rng, 0.5, 3.0);
      gs.push_back([=](double u) { return std::abs(u - c) + std::sin(a * u); });
    }
    const auto values = node_values(gs, N);
    const auto net = build_theorem2_net(ys, values, S, N);
    CHECK(net.J == minimal_depth(m, d, S));
    const SplineMesh mesh(N);
    for (int i = 0; i < 10; ++i) {
      const auto x = gen::point(rng, d);
      double closed = 0.0;
      for (int j = 0; j < m; ++j) closed += apply_Lt_values(values[j], mesh, ys[j].dot(x));
      CHECK(std::abs(evaluate(net, x) - closed) <= 1e-8);
    }
  }
}

TEST_CASE("free-parameter counts") {
  const std::vector<SpherePoint> ys{SpherePoint({0.0, 0.0, 1.0})};
  const auto two = build_theorem2_net(ys, node_values({[](double u) { return u; }}, 4), 2, 4);
  CHECK(count_free_parameters(two) == 26);
  CHECK(count_free_parameters(two) <= (3 * 2 + 2) * two.J + 1 * (2 * 4 + 2));

  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const int S = gen::integer(rng, 2, 3);
    const int m = gen::integer(rng, 1, 3);
    const int N = gen::integer(rng, 1, 10);
    const auto pts = gen::points(rng, 3, m);
    const BandLimitedZonal f(SpherePoint({0.0, 0.0, 1.0}), {0.5, 0.2});
    const int J = minimal_depth(m, 3, S) + gen::integer(rng, 0, 3);
    const auto net = build_theorem1_net(f, 1.0, 2, pts, N, S, J);
    CHECK(count_free_parameters(net) == J * (3 * S + 2) + m + 2 * N + 4);
  }
}

TEST_CASE("network validation") {
  const BandLimitedZonal f(SpherePoint({0.0, 0.0, 1.0}), {1.0});
  const std::vector<SpherePoint> ys{SpherePoint({1.0, 0.0, 0.0})};
  CHECK_THROWS_AS(build_theorem1_net(f, 1.0, 1, std::vector<SpherePoint>{}, 2, 2, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_theorem1_net(f, 1.0, 1, ys, 0, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(build_theorem1_net(f, 1.0, 1, ys, 2, 2, 1), std::invalid_argument);
  const auto net = build_theorem1_net(f, 1.0, 1, ys, 2, 2, 2);
  CHECK_THROWS_AS(evaluate(net, SpherePoint({0.0, 0.0, 0.0, 1.0})), std::invalid_argument);
}

TEST_CASE("serialization roundtrip") {
  Rng rng(43);
  const auto ys = gen::points(rng, 4, 2);
  const BandLimitedZonal f(gen::point(rng, 4), {0.3, -0.2, 0.1});
  const auto one = build_theorem1_net(f, 1.5, 2, ys, 6, 3, 5);
  const auto two = build_theorem2_net(ys, node_values({[](double u) { return std::abs(u); },
                                                       [](double u) { return u * u; }}, 6), 2, 6);
  for (const auto* net : {&one, &two}) {
    std::ostringstream first;
    write_network(first, *net);
    std::istringstream in(first.str());
    const auto back = read_network(in);
    std::ostringstream second;
    write_network(second, back);
    CHECK(first.str() == second.str());
    for (int i = 0; i < 20; ++i) {
      const auto x = gen::point(rng, 4);
      CHECK(evaluate(back, x) == evaluate(*net, x));
    }
  }

  std::ostringstream good;
  write_network(good, two);
  const auto text = good.str();
  std::istringstream empty("");
  CHECK_THROWS(read_network(empty));
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS(read_network(truncated));
  std::istringstream bad_version("sphcnn-network 7\n");
  CHECK_THROWS(read_network(bad_version));
  std::istringstream garbage("hello world\n");
  CHECK_THROWS(read_network(garbage));
}

}  // TEST_SUITE
