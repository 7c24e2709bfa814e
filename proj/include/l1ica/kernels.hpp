#pragma once

#include "l1ica/types.hpp"

#include <cmath>
#include <span>

namespace l1ica {

// Gaussian contrast G(y) = -exp(-y^2/2) and its first two derivatives.
inline double contrast_g(double y) { return -std::exp(-0.5 * y * y); }
inline double contrast_g1(double y) { return y * std::exp(-0.5 * y * y); }
inline double contrast_g2(double y) { return (1.0 - y * y) * std::exp(-0.5 * y * y); }

namespace kernels {

/// Sums over the N columns z_j of Z for the projections y_j = w^T z_j.
struct ProjectionSums {
    double g = 0.0;  // sum_j G(y_j)
    double g2 = 0.0; // sum_j G''(y_j)
    Vector zg1;      // sum_j z_j G'(y_j), length K
};

/// Column block size of the parallel kernels. Partial sums are formed per
/// block and combined in block order, so results do not depend on the number
/// of OpenMP threads.
inline constexpr Index kBlock = 256;

/// Straight single-pass loops; the reference the parallel kernels are tested
/// against.
namespace serial {
ProjectionSums projection_sums(const Matrix& Z, const Vector& w);
double sum_g(std::span<const double> values);
} // namespace serial

namespace parallel {
ProjectionSums projection_sums(const Matrix& Z, const Vector& w);
double sum_g(std::span<const double> values);
} // namespace parallel

// Library entry points; these dispatch to the parallel kernels.
inline ProjectionSums projection_sums(const Matrix& Z, const Vector& w) { return parallel::projection_sums(Z, w); }
inline double sum_g(std::span<const double> values) { return parallel::sum_g(values); }

} // namespace kernels
} // namespace l1ica
