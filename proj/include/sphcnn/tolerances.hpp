#pragma once

// Tolerances and slope windows for the empirical studies, kept in one place.

namespace sphcnn::tol {

// Filter factorization: relative l_inf reconvolution error.
inline constexpr double kFactorizationRelError = 1e-6;

// Toeplitz product route vs convolved-filter route, entrywise.
inline constexpr double kToeplitzChain = 1e-10;

// Exact identities realized in floating point (feature extraction, network
// closed forms).
inline constexpr double kFeatureIdentity = 1e-8;
inline constexpr double kNetworkIdentity = 1e-8;
inline constexpr double kSplineIdentity = 1e-10;
inline constexpr double kPreactivationFloor = -1e-10;

// Analytic bounds compared against floating-point network output: the slack
// only absorbs rounding in the network evaluation.
inline constexpr double kBoundRoundingSlack = 1e-9;

// Ridge rate: theoretical slope is -alpha; the window absorbs the grid
// surrogate and the position of the kinks relative to the mesh.
inline constexpr double kRidgeSlopeWindow = 0.2;

// Discretization: Monte-Carlo error decays like m^{-1/2}; with 20 seeds the
// fitted slope stays within 0.15 of that.
inline constexpr double kDiscretizationSlopeCenter = -0.5;
inline constexpr double kDiscretizationSlopeWindow = 0.15;
// Ratio of consecutive seed-averaged errors when m doubles (1/sqrt(2) ~ 0.707).
inline constexpr double kDoublingRatioLow = 0.6;
inline constexpr double kDoublingRatioHigh = 0.85;

// Near-best operator: fitted slope of ||f - L_n f|| must be <= -r + 0.3.
inline constexpr double kNearBestSlopeSlack = 0.3;

// Smooth-target end-to-end study: each seed-averaged error may exceed the
// best earlier value by at most this factor (constants are unknown, only the
// trend is checked).
inline constexpr double kMonotoneFactor = 1.5;

}  // namespace sphcnn::tol
