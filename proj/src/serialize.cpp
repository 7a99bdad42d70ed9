#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sphcnn/network.hpp"

// Layout of "sphcnn-network 1" (one record per line, whitespace separated,
// floats printed with max_digits10 of the working precision, 21 digits for
// x87 long double):
//
//   sphcnn-network 1
//   flavor two-fc | one-fc
//   d <int>  S <int>  J <int>  m <int>  N <int>      (one key per line)
//   B_J <float>
//   B_J2 <float> | B_J2 none
//   B_J2_grid <int>
//   B_J2_margin <float>
//   layer <j> <input_width>          then   taps <k> <floats>   bias <k> <floats>
//   fc <index> <transposed 0|1> <block_count>   then   block <k> <floats>   bias <k> <floats>
//   output_coeffs <k> <floats>
//   output_shift <float>
//   end

namespace sphcnn {

namespace {

constexpr const char* kMagic = "sphcnn-network";
constexpr int kVersion = 1;

void write_vector(std::ostream& os, const char* key, std::span<const Real> v) {
  os << key << ' ' << v.size();
  for (Real x : v) os << ' ' << x;
  os << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  void expect(const std::string& key) {
    std::string got;
    if (!(is_ >> got) || got != key) {
      throw std::runtime_error("read_network: expected '" + key + "', got '" + got + "'");
    }
  }
  template <typename T>
  T value(const std::string& key) {
    expect(key);
    return scalar<T>(key);
  }
  template <typename T>
  T scalar(const std::string& what) {
    T v{};
    if (!(is_ >> v)) throw std::runtime_error("read_network: malformed value for " + what);
    return v;
  }
  std::vector<Real> vector(const std::string& key) {
    expect(key);
    const auto count = scalar<long long>(key);
    if (count < 0 || count > (1LL << 28)) throw std::runtime_error("read_network: bad length");
    std::vector<Real> v(static_cast<size_t>(count));
    for (auto& x : v) x = scalar<Real>(key);
    return v;
  }
  std::string word() {
    std::string w;
    if (!(is_ >> w)) throw std::runtime_error("read_network: unexpected end of input");
    return w;
  }

 private:
  std::istream& is_;
};

}  // namespace

void write_network(std::ostream& os, const SphericalNetwork& net) {
  const auto old_precision = os.precision(std::numeric_limits<Real>::max_digits10);
  os << kMagic << ' ' << kVersion << '\n';
  os << "flavor " << (net.flavor == NetworkFlavor::TwoFullyConnected ? "two-fc" : "one-fc")
     << '\n';
  os << "d " << net.d << "\nS " << net.S << "\nJ " << net.J << "\nm " << net.m << "\nN " << net.N
     << '\n';
  os << "B_J " << net.B_J << '\n';
  if (net.B_J2) {
    os << "B_J2 " << *net.B_J2 << '\n';
  } else {
    os << "B_J2 none\n";
  }
  os << "B_J2_grid " << net.B_J2_grid << "\nB_J2_margin " << net.B_J2_margin << '\n';
  for (size_t j = 0; j < net.cnn.size(); ++j) {
    const auto& layer = net.cnn[j];
    os << "layer " << j + 1 << ' ' << layer.input_width << '\n';
    write_vector(os, "taps", layer.filter.taps());
    write_vector(os, "bias", layer.bias);
  }
  for (size_t k = 0; k < net.fc.size(); ++k) {
    const auto& fc = net.fc[k];
    os << "fc " << k + 1 << ' ' << (fc.transposed ? 1 : 0) << ' ' << fc.matrix.block_count
       << '\n';
    write_vector(os, "block", fc.matrix.block);
    write_vector(os, "bias", fc.bias);
  }
  write_vector(os, "output_coeffs", net.output_coeffs);
  os << "output_shift " << net.output_shift << '\n';
  os << "end\n";
  os.precision(old_precision);
}

SphericalNetwork read_network(std::istream& is) {
  Reader in(is);
  in.expect(kMagic);
  const int version = in.scalar<int>("version");
  if (version != kVersion) {
    throw std::runtime_error("read_network: unsupported version " + std::to_string(version));
  }
  SphericalNetwork net{NetworkFlavor::TwoFullyConnected, 0, 0, 0, 0, 0, {}, 0.0, std::nullopt,
                       0, 0.0, {}, {}, 0.0};
  in.expect("flavor");
  const auto flavor = in.word();
  if (flavor == "two-fc") {
    net.flavor = NetworkFlavor::TwoFullyConnected;
  } else if (flavor == "one-fc") {
    net.flavor = NetworkFlavor::OneFullyConnected;
  } else {
    throw std::runtime_error("read_network: unknown flavor " + flavor);
  }
  net.d = in.value<int>("d");
  net.S = in.value<int>("S");
  net.J = in.value<int>("J");
  net.m = in.value<int>("m");
  net.N = in.value<int>("N");
  net.B_J = in.value<Real>("B_J");
  in.expect("B_J2");
  const auto bj2 = in.word();
  if (bj2 != "none") {
    std::istringstream conv(bj2);
    double v = 0.0;
    if (!(conv >> v)) throw std::runtime_error("read_network: malformed B_J2");
    net.B_J2 = v;
  }
  net.B_J2_grid = in.value<int>("B_J2_grid");
  net.B_J2_margin = in.value<double>("B_J2_margin");

  for (int j = 1; j <= net.J; ++j) {
    in.expect("layer");
    if (in.scalar<int>("layer index") != j) throw std::runtime_error("read_network: layer order");
    const int width = in.scalar<int>("input width");
    auto taps = in.vector("taps");
    auto bias = in.vector("bias");
    CnnLayer layer{Filter(std::move(taps)), std::move(bias), width};
    if (layer.filter_length() != net.S ||
        static_cast<int>(layer.bias.size()) != layer.output_width()) {
      throw std::runtime_error("read_network: inconsistent layer " + std::to_string(j));
    }
    net.cnn.push_back(std::move(layer));
  }
  const int fc_count = net.flavor == NetworkFlavor::TwoFullyConnected ? 2 : 1;
  for (int k = 1; k <= fc_count; ++k) {
    in.expect("fc");
    if (in.scalar<int>("fc index") != k) throw std::runtime_error("read_network: fc order");
    const bool transposed = in.scalar<int>("transposed") != 0;
    const int blocks = in.scalar<int>("block count");
    auto block = in.vector("block");
    auto bias = in.vector("bias");
    net.fc.push_back(FullyConnectedLayer{BlockMatrix{std::move(block), blocks}, transposed,
                                         std::move(bias)});
  }
  net.output_coeffs = in.vector("output_coeffs");
  net.output_shift = in.value<Real>("output_shift");
  in.expect("end");
  return net;
}

}  // namespace sphcnn
