#pragma once

namespace sphcnn {

// Working precision for filter taps and network activations. CNN
// activations carry the offset B_J = prod ||w^{(p)}||_1, which grows
// geometrically with depth; the features <y_k, x> are recovered by
// subtracting it, so they keep about log10(eps / B_J) digits.
using Real = long double;

}  // namespace sphcnn
