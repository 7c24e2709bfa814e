#include "l1ica/whitening.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace l1ica {

namespace {

void fix_sign(Eigen::Ref<Vector> v)
{
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            arg = i;
        }
    }
    if (v[arg] < 0.0)
        v = -v;
}

} // namespace

Matrix WhiteningModel::center(const Matrix& X) const
{
    require(X.rows() == mean.size(), "center: row count does not match the fitted mean");
    return X.colwise() - mean;
}

WhiteningFit fit_whitening(const Matrix& X, Index K)
{
    const Index p = X.rows();
    const Index N = X.cols();
    require(K >= 1 && K <= std::min(p, N - 1),
            "fit_whitening: K=" + std::to_string(K) + " outside [1, min(p, N-1)] for a "
                + std::to_string(p) + "x" + std::to_string(N) + " input");
    require_finite(X, "fit_whitening");

    WhiteningFit fit;
    WhiteningModel& model = fit.model;
    model.mean = X.rowwise().mean();
    const Matrix Xc = X.colwise() - model.mean;
    const double inv_n = 1.0 / static_cast<double>(N);

    Matrix E(p, K);
    Vector lambda(K);
    if (p <= N) {
        const Matrix C = inv_n * (Xc * Xc.transpose());
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
        if (eig.info() != Eigen::Success)
            throw NumericalError("fit_whitening: covariance eigendecomposition failed");
        for (Index k = 0; k < K; ++k) {
            lambda[k] = eig.eigenvalues()[p - 1 - k];
            E.col(k) = eig.eigenvectors().col(p - 1 - k);
        }
    } else {
        const Matrix G = inv_n * (Xc.transpose() * Xc);
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
        if (eig.info() != Eigen::Success)
            throw NumericalError("fit_whitening: Gram eigendecomposition failed");
        for (Index k = 0; k < K; ++k) {
            lambda[k] = eig.eigenvalues()[N - 1 - k];
            if (lambda[k] > 0.0)
                E.col(k) = (Xc * eig.eigenvectors().col(N - 1 - k)).normalized();
            else
                E.col(k).setZero();
        }
    }
    if (!(lambda[0] > 0.0) || lambda[K - 1] <= 1e-12 * lambda[0])
        throw NumericalError("fit_whitening: covariance has fewer than " + std::to_string(K)
                             + " significant eigenvalues");
    for (Index k = 0; k < K; ++k)
        fix_sign(E.col(k));

    model.eigenvalues = lambda;
    model.Q = lambda.cwiseSqrt().cwiseInverse().asDiagonal() * E.transpose();
    model.Q_pinv = pseudo_inverse(model.Q);
    fit.Z = model.Q * Xc;
    return fit;
}

Matrix pseudo_inverse(const Matrix& Q)
{
    require(Q.rows() >= 1 && Q.rows() <= Q.cols(), "pseudo_inverse: expected a wide K x p matrix with K <= p");
    require_finite(Q, "pseudo_inverse");
    const Matrix gram = Q * Q.transpose();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    if (!(hi > 0.0) || !(lo > 0.0) || std::sqrt(lo / hi) <= 1e-10)
        throw NumericalError("pseudo_inverse: input is not of full row rank");
    // (Q Q^T)^{-1} from the eigendecomposition, which is exact for the
    // diagonal Q Q^T produced by whitening.
    const Matrix gram_inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal()
        * eig.eigenvectors().transpose();
    return Q.transpose() * gram_inv;
}

Matrix omp_sparse_inverse(const Matrix& Q_pinv, Index k0)
{
    const Index K = Q_pinv.cols();
    require(k0 >= 1 && k0 <= K, "omp_sparse_inverse: k0=" + std::to_string(k0) + " outside [1, " + std::to_string(K) + "]");
    if (k0 == K)
        return Q_pinv;

    Matrix out = Matrix::Zero(Q_pinv.rows(), K);
    std::vector<Index> order(static_cast<std::size_t>(K));
    for (Index i = 0; i < Q_pinv.rows(); ++i) {
        std::iota(order.begin(), order.end(), Index{0});
        std::partial_sort(order.begin(), order.begin() + k0, order.end(), [&](Index a, Index b) {
            const double ma = std::abs(Q_pinv(i, a));
            const double mb = std::abs(Q_pinv(i, b));
            return ma > mb || (ma == mb && a < b);
        });
        for (Index s = 0; s < k0; ++s)
            out(i, order[static_cast<std::size_t>(s)]) = Q_pinv(i, order[static_cast<std::size_t>(s)]);
    }
    return out;
}

Index k0_from_kappa(double kappa, Index K)
{
    require(kappa >= 0.0 && kappa < 1.0, "kappa must lie in [0, 1)");
    const auto k0 = static_cast<Index>(std::floor((1.0 - kappa) * static_cast<double>(K) + 0.5));
    return std::clamp<Index>(k0, 1, K);
}

void attach_sparse_inverse(WhiteningModel& model, Index k0)
{
    model.Q_sharp = omp_sparse_inverse(model.Q_pinv, k0);
    model.k0 = k0;
    model.kappa = 1.0 - static_cast<double>(k0) / static_cast<double>(model.components());
}

} // namespace l1ica
