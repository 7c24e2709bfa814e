#pragma once

#include "l1ica/types.hpp"

#include <span>
#include <vector>

namespace l1ica {

/// Columns whose l2 norm is at most this fraction of the largest column norm
/// are zero columns. Components that end up in the null space of Q# leave
/// such columns behind at solver precision.
inline constexpr double kZeroColumnTolerance = 1e-8;

/// Fraction of entries of the column-normalised A with magnitude below
/// epsilon. Zero columns count as entirely sparse.
double sparsity(const Matrix& A, double epsilon = 1e-2);
Index zero_columns(const Matrix& A);

/// Mean over rows of |m4 / m2^2 - 3| using raw (uncentred) moments.
/// Throws NumericalError on a row with zero second moment.
double mak(const Matrix& S);

/// sqrt(mean((X - A S)^2)).
double rmse(const Matrix& X, const Matrix& A, const Matrix& S);

/// Amari distance of a square P; zero iff P is a scaled permutation.
/// Throws NumericalError when a row or column of P is zero.
double amari_distance(const Matrix& P);

/// P = W^T Q A*.
Matrix unmixing_product(const Matrix& W, const Matrix& Q, const Matrix& A_star);

/// Fraction of values strictly below psi.
double success_rate(std::span<const double> amari_values, double psi);

/// |Pearson correlation| of s and d. Throws NumericalError if either is
/// constant.
double correlation(std::span<const double> s, std::span<const double> d);

struct TTest {
    double t = 0.0;
    double p = 1.0;
    double dof = 0.0;
};

/// Pooled-variance Student t-test; t < 0 when mean(x) < mean(y), two-sided p.
TTest two_sample_t_test(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> values);
/// Sample standard deviation / sqrt(n); 0 for a single value.
double standard_error(std::span<const double> values);

struct SparsityBin {
    double center = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    Index frequency = 0;
    double success_rate = 0.0; // 0 for an empty bin
};

/// Histogram of sparsity values in bins [c - w/2, c + w/2) with centres at
/// multiples of w, plus the success rate of the trials falling in each bin.
std::vector<SparsityBin> success_by_sparsity(std::span<const double> sparsities, std::span<const double> amari_values,
                                             double psi, double width = 0.1);

} // namespace l1ica
