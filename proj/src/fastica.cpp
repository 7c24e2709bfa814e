#include "l1ica/fastica.hpp"

#include "l1ica/kernels.hpp"
#include "l1ica/rng.hpp"
#include "l1ica/whitening.hpp"

#include <cmath>
#include <string>

namespace l1ica {

namespace {

void check_dims(const Vector& w, const Matrix& Z, const NonlinearityTable& table)
{
    require(w.size() == Z.rows(), "w has length " + std::to_string(w.size()) + " but Z has " + std::to_string(Z.rows()) + " rows");
    require(Z.cols() == table.size(), "Z has " + std::to_string(Z.cols()) + " columns but the reference sample has "
                                          + std::to_string(table.size()));
}

} // namespace

NonlinearityTable::NonlinearityTable(Index N, std::uint64_t seed)
    : nu_(N), seed_(seed)
{
    require(N >= 1, "NonlinearityTable: N must be >= 1");
    Rng rng = substream(seed, "nu");
    for (Index j = 0; j < N; ++j)
        nu_[j] = rng.normal();
    reference_sum_ = kernels::sum_g(std::span<const double>(nu_.data(), static_cast<std::size_t>(N)));
}

double negentropy_value(const Vector& w, const Matrix& Z, const NonlinearityTable& table)
{
    check_dims(w, Z, table);
    const Vector y = Z.transpose() * w;
    const double diff = kernels::sum_g(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())))
        - table.reference_sum();
    const double n = static_cast<double>(Z.cols());
    return diff * diff / (n * n);
}

double negentropy_cost(const Vector& w, const Matrix& Z, const NonlinearityTable& table)
{
    require(std::abs(w.norm() - 1.0) <= 1e-10, "negentropy_cost: w must have unit norm");
    return negentropy_value(w, Z, table);
}

Vector fastica_update(const Vector& w, const Matrix& Z, const NonlinearityTable& table)
{
    check_dims(w, Z, table);
    const auto sums = kernels::projection_sums(Z, w);
    const double n = static_cast<double>(Z.cols());
    return (sums.zg1 - sums.g2 * w) / n;
}

Vector gram_schmidt_step(const Vector& w, std::span<const Vector> prior)
{
    Vector r = w;
    for (const Vector& v : prior) {
        require(v.size() == w.size(), "gram_schmidt_step: dimension mismatch");
        r -= w.dot(v) * v;
    }
    if (r.norm() < 1e-12)
        throw DegenerateDeflation("gram_schmidt_step: vector lies in the span of the previous components");
    return r;
}

Vector gram_schmidt_step(const Vector& w, const Matrix& W, Index count)
{
    require(W.rows() == w.size() && count <= W.cols(), "gram_schmidt_step: dimension mismatch");
    Vector r = w;
    if (count > 0)
        r -= W.leftCols(count) * (W.leftCols(count).transpose() * w);
    if (r.norm() < 1e-12)
        throw DegenerateDeflation("gram_schmidt_step: vector lies in the span of the previous components");
    return r;
}

Matrix initial_unmixing(Index K, std::uint64_t seed)
{
    require(K >= 1, "initial_unmixing: K must be >= 1");
    Rng rng = substream(seed, "init");
    Matrix W(K, K);
    for (Index j = 0; j < K; ++j)
        for (Index i = 0; i < K; ++i)
            W(i, j) = rng.normal();
    W.colwise().normalize();
    return W;
}

Vector restart_direction(Index K, std::uint64_t seed, Index component, Index restart)
{
    Rng rng = substream(seed, "restart", static_cast<std::uint64_t>(component * 64 + restart));
    Vector v(K);
    for (Index i = 0; i < K; ++i)
        v[i] = rng.normal();
    return v.normalized();
}

namespace detail {

Vector deflated_start(const Vector& candidate, const Matrix& W, Index i, std::uint64_t seed, ComponentDiagnostics& diag)
{
    Vector start = candidate;
    for (Index attempt = 0; attempt <= 5; ++attempt) {
        try {
            return gram_schmidt_step(start, W, i).normalized();
        } catch (const DegenerateDeflation&) {
            if (attempt == 5)
                break;
            diag.restarts += 1;
            start = restart_direction(W.rows(), seed, i, attempt);
        }
    }
    diag.degenerate = true;
    const Matrix residual = Matrix::Identity(W.rows(), W.rows()) - W.leftCols(i) * W.leftCols(i).transpose();
    Index best = 0;
    residual.colwise().norm().maxCoeff(&best);
    return residual.col(best).normalized();
}

} // namespace detail

IcaModel fastica_fit(const Matrix& X, Index K, std::uint64_t seed, const FastIcaOptions& options)
{
    require(options.max_iter >= 1, "fastica_fit: max_iter must be >= 1");
    require(options.tol > 0.0, "fastica_fit: tol must be positive");

    WhiteningFit white = fit_whitening(X, K);
    const Matrix& Z = white.Z;
    const NonlinearityTable table(Z.cols(), seed);
    const Matrix W0 = initial_unmixing(K, seed);

    IcaModel model;
    model.seed = seed;
    model.W = Matrix::Zero(K, K);
    model.components.resize(static_cast<std::size_t>(K));

    for (Index i = 0; i < K; ++i) {
        auto& diag = model.components[static_cast<std::size_t>(i)];
        Vector w = detail::deflated_start(W0.col(i), model.W, i, seed, diag);
        for (Index it = 0; it < options.max_iter; ++it) {
            Vector next;
            try {
                next = gram_schmidt_step(fastica_update(w, Z, table), model.W, i).normalized();
            } catch (const DegenerateDeflation&) {
                next = detail::deflated_start(restart_direction(K, seed, i, diag.restarts), model.W, i, seed, diag);
                diag.restarts += 1;
            }
            diag.iterations = it + 1;
            const bool done = std::abs(next.dot(w)) > 1.0 - options.tol;
            w = next;
            if (done) {
                diag.converged = true;
                break;
            }
        }
        model.W.col(i) = w;
        diag.final_negentropy = negentropy_value(w, Z, table);
        diag.final_cost = diag.final_negentropy;
    }

    model.S = model.W.transpose() * Z;
    model.A = white.model.Q_pinv * model.W;
    model.whitening = std::move(white.model);
    return model;
}

} // namespace l1ica
