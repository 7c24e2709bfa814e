#pragma once

#include "l1ica/model.hpp"
#include "l1ica/types.hpp"

#include <cstdint>
#include <span>

namespace l1ica {

/// Gaussian reference sample for the negentropy surrogate, drawn once per fit.
class NonlinearityTable {
public:
    NonlinearityTable(Index N, std::uint64_t seed);

    const Vector& nu() const { return nu_; }
    Index size() const { return nu_.size(); }
    std::uint64_t seed() const { return seed_; }
    /// sum_j G(nu_j)
    double reference_sum() const { return reference_sum_; }

private:
    Vector nu_;
    std::uint64_t seed_;
    double reference_sum_;
};

/// (1/N^2) (sum_j G(w^T z_j) - sum_j G(nu_j))^2 for any w; no unit-norm check.
double negentropy_value(const Vector& w, const Matrix& Z, const NonlinearityTable& table);

/// As negentropy_value, but w must have unit norm within 1e-10.
double negentropy_cost(const Vector& w, const Matrix& Z, const NonlinearityTable& table);

/// One fixed-point step, (1/N) sum_j [z_j G'(w^T z_j) - G''(w^T z_j) w].
/// The result is not normalised.
Vector fastica_update(const Vector& w, const Matrix& Z, const NonlinearityTable& table);

/// w - sum_j (w^T v_j) v_j over the orthonormal vectors in prior.
/// Throws DegenerateDeflation when the residual norm is below 1e-12.
Vector gram_schmidt_step(const Vector& w, std::span<const Vector> prior);

/// Same projection with prior vectors taken from the first `count` columns of W.
Vector gram_schmidt_step(const Vector& w, const Matrix& W, Index count);

/// K x K starting matrix: standard normal entries from the fit seed, unit
/// columns.
Matrix initial_unmixing(Index K, std::uint64_t seed);

/// Random unit vector for the restart-th retry of component i.
Vector restart_direction(Index K, std::uint64_t seed, Index component, Index restart);

namespace detail {
// Unit start vector for component i orthogonal to the first i columns of W.
// Retries with fresh random directions up to five times, then falls back to
// the coordinate axis with the largest residual and marks diag.degenerate.
Vector deflated_start(const Vector& candidate, const Matrix& W, Index i, std::uint64_t seed, ComponentDiagnostics& diag);
} // namespace detail

struct FastIcaOptions {
    Index max_iter = 200;
    double tol = 1e-8;
};

/// Deflationary FastICA with the Gaussian contrast. W has orthonormal columns,
/// S = W^T Z and A = Q_pinv W. Non-convergence is flagged per component.
IcaModel fastica_fit(const Matrix& X, Index K, std::uint64_t seed, const FastIcaOptions& options = {});

} // namespace l1ica
