#pragma once

#include "l1ica/types.hpp"

namespace l1ica {

/// PCA whitening of a p x N observation down to K components.
struct WhiteningModel {
    Vector mean;     // length p, per-row average over columns
    Vector eigenvalues; // top K covariance eigenvalues, descending
    Matrix Q;        // K x p whitening map
    Matrix Q_pinv;   // p x K Moore-Penrose inverse of Q
    Matrix Q_sharp;  // p x K, at most k0 nonzeros per row; empty until set
    Index k0 = 0;
    double kappa = 0.0;

    Index components() const { return Q.rows(); }
    Index dimension() const { return Q.cols(); }
    bool has_sparse_inverse() const { return Q_sharp.size() > 0; }

    /// Subtract the stored mean from every column of X.
    Matrix center(const Matrix& X) const;
};

struct WhiteningFit {
    WhiteningModel model;
    Matrix Z; // K x N, (1/N) Z Z^T = I_K
};

/// Centre X, take the top-K eigenpairs of (1/N) Xc Xc^T and return
/// Q = Lambda^{-1/2} E^T together with Z = Q Xc.
///
/// Eigenpairs are sorted by descending eigenvalue and each eigenvector's
/// largest-magnitude entry (lowest index on ties) is made positive, so Q is
/// reproducible. When p > N the eigenvectors are obtained from the N x N Gram
/// matrix instead of the p x p covariance.
///
/// Throws std::invalid_argument when K is outside [1, min(p, N-1)] and
/// NumericalError when the K-th eigenvalue is <= 1e-12 times the largest.
WhiteningFit fit_whitening(const Matrix& X, Index K);

/// Moore-Penrose inverse of a full-row-rank K x p matrix, Q^T (Q Q^T)^{-1}.
/// Throws NumericalError when the smallest singular value is <= 1e-10 times the
/// largest.
Matrix pseudo_inverse(const Matrix& Q);

/// Best Frobenius approximation of each row of Q_pinv with at most k0 nonzeros.
///
/// Orthogonal matching pursuit over the identity dictionary selects, for each
/// row, the k0 entries of largest magnitude and keeps their values; ties go to
/// the lower column index. k0 == K returns the input unchanged.
Matrix omp_sparse_inverse(const Matrix& Q_pinv, Index k0);

/// k0 = round((1 - kappa) K), clamped to [1, K].
Index k0_from_kappa(double kappa, Index K);

/// Fill Q_sharp, k0 and kappa = 1 - k0/K on a fitted model.
void attach_sparse_inverse(WhiteningModel& model, Index k0);

} // namespace l1ica
