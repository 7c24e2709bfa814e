#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// Nothing here calls into the library code it is checking.

#include "l1ica/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using l1ica::Index;
using l1ica::Matrix;
using l1ica::Vector;

inline Matrix svd_pinv(const Matrix& Q)
{
    Eigen::JacobiSVD<Matrix> svd(Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector inv = svd.singularValues();
    for (Index i = 0; i < inv.size(); ++i)
        inv[i] = inv[i] > 1e-14 * inv[0] ? 1.0 / inv[i] : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Relative Frobenius errors of the four Penrose identities.
inline double penrose_error(const Matrix& Q, const Matrix& P)
{
    auto rel = [](const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); };
    return std::max({rel(Q * P * Q, Q), rel(P * Q * P, P), rel((Q * P).transpose(), Q * P),
                     rel((P * Q).transpose(), P * Q)});
}

// Best k-sparse approximation of a row by enumerating every support of size k
// and filling it by least squares against the identity dictionary. Among
// equal residuals the lexicographically first support wins.
inline Vector exhaustive_sparse_row(const Vector& row, Index k)
{
    const Index K = row.size();
    std::vector<int> mask(static_cast<std::size_t>(K), 0);
    std::fill(mask.begin(), mask.begin() + k, 1);
    double best = std::numeric_limits<double>::infinity();
    Vector best_row = Vector::Zero(K);
    do {
        Matrix D(K, k);
        D.setZero();
        Index c = 0;
        for (Index j = 0; j < K; ++j)
            if (mask[static_cast<std::size_t>(j)])
                D(j, c++) = 1.0;
        const Vector coef = D.colPivHouseholderQr().solve(row);
        const Vector approx = D * coef;
        const double r = (row - approx).squaredNorm();
        if (r < best) {
            best = r;
            best_row = approx;
        }
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best_row;
}

// Textbook orthogonal matching pursuit with an arbitrary dictionary (columns
// are atoms). Ties in the greedy selection go to the lower atom index.
inline Vector generic_omp(const Matrix& dictionary, const Vector& y, Index k)
{
    std::vector<Index> support;
    Vector residual = y;
    Vector coef;
    for (Index step = 0; step < k; ++step) {
        Index pick = -1;
        double best = -1.0;
        for (Index j = 0; j < dictionary.cols(); ++j) {
            if (std::find(support.begin(), support.end(), j) != support.end())
                continue;
            const double score = std::abs(dictionary.col(j).dot(residual)) / dictionary.col(j).norm();
            if (score > best) {
                best = score;
                pick = j;
            }
        }
        support.push_back(pick);
        Matrix D(dictionary.rows(), static_cast<Index>(support.size()));
        for (std::size_t c = 0; c < support.size(); ++c)
            D.col(static_cast<Index>(c)) = dictionary.col(support[c]);
        coef = D.colPivHouseholderQr().solve(y);
        residual = y - D * coef;
    }
    Vector x = Vector::Zero(dictionary.cols());
    for (std::size_t c = 0; c < support.size(); ++c)
        x[support[c]] = coef[static_cast<Index>(c)];
    return x;
}

// Generalised lasso min (L/2)||w||^2 + alpha ||D w||_1 - b^T w through its
// dual, min_{|u|_inf <= alpha} (1/2L) ||b - D^T u||^2 with w = (b - D^T u)/L,
// solved by accelerated projected gradient (FISTA).
inline Vector dual_fista_lasso(const Vector& b, double L, double alpha, const Matrix& D, Index iterations = 1000000,
                               double tol = 1e-15)
{
    const Index p = D.rows();
    const double lip = Eigen::SelfAdjointEigenSolver<Matrix>(D * D.transpose()).eigenvalues().maxCoeff() / L;
    const double step = 1.0 / std::max(lip, 1e-300);
    Vector u = Vector::Zero(p), v = u, u_prev = u;
    double t = 1.0;
    for (Index it = 0; it < iterations; ++it) {
        const Vector w = (b - D.transpose() * v) / L;
        u_prev = u;
        u = (v + step * (D * w)).cwiseMax(-alpha).cwiseMin(alpha);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        v = u + ((t - 1.0) / t_next) * (u - u_prev);
        t = t_next;
        if ((u - u_prev).norm() <= tol * std::max(1.0, u.norm()) && it > 100)
            break;
    }
    return (b - D.transpose() * u) / L;
}

inline double lasso_value(const Vector& w, const Vector& b, double L, double alpha, const Matrix& D)
{
    double l1 = 0.0;
    for (Index i = 0; i < D.rows(); ++i) {
        double s = 0.0;
        for (Index j = 0; j < D.cols(); ++j)
            s += D(i, j) * w[j];
        l1 += std::abs(s);
    }
    double quad = 0.0, lin = 0.0;
    for (Index j = 0; j < w.size(); ++j) {
        quad += w[j] * w[j];
        lin += b[j] * w[j];
    }
    return 0.5 * L * quad + alpha * l1 - lin;
}

inline double naive_rmse(const Matrix& X, const Matrix& A, const Matrix& S)
{
    double sum = 0.0;
    for (Index i = 0; i < X.rows(); ++i)
        for (Index j = 0; j < X.cols(); ++j) {
            double x = 0.0;
            for (Index l = 0; l < A.cols(); ++l)
                x += A(i, l) * S(l, j);
            sum += (X(i, j) - x) * (X(i, j) - x);
        }
    return std::sqrt(sum / static_cast<double>(X.rows() * X.cols()));
}

inline double naive_mak(const Matrix& S)
{
    double total = 0.0;
    for (Index i = 0; i < S.rows(); ++i) {
        double m2 = 0.0, m4 = 0.0;
        for (Index j = 0; j < S.cols(); ++j) {
            m2 += std::pow(S(i, j), 2);
            m4 += std::pow(S(i, j), 4);
        }
        m2 /= static_cast<double>(S.cols());
        m4 /= static_cast<double>(S.cols());
        total += std::abs(m4 / (m2 * m2) - 3.0);
    }
    return total / static_cast<double>(S.rows());
}

inline double naive_amari(const Matrix& P)
{
    const Index K = P.rows();
    double d = 0.0;
    for (Index i = 0; i < K; ++i) {
        double s = 0.0, m = 0.0;
        for (Index j = 0; j < K; ++j) {
            s += std::abs(P(i, j));
            m = std::max(m, std::abs(P(i, j)));
        }
        d += s / m - 1.0;
    }
    for (Index j = 0; j < K; ++j) {
        double s = 0.0, m = 0.0;
        for (Index i = 0; i < K; ++i) {
            s += std::abs(P(i, j));
            m = std::max(m, std::abs(P(i, j)));
        }
        d += s / m - 1.0;
    }
    return d;
}

inline double naive_correlation(const std::vector<double>& s, const std::vector<double>& d)
{
    const double n = static_cast<double>(s.size());
    const double ms = std::accumulate(s.begin(), s.end(), 0.0) / n;
    const double md = std::accumulate(d.begin(), d.end(), 0.0) / n;
    double sd = 0.0, ss = 0.0, dd = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        sd += (s[i] - ms) * (d[i] - md);
        ss += (s[i] - ms) * (s[i] - ms);
        dd += (d[i] - md) * (d[i] - md);
    }
    return std::abs(sd) / std::sqrt(ss * dd);
}

// Regularised incomplete beta I_x(a, b) by Lentz's continued fraction.
inline double incomplete_beta(double a, double b, double x)
{
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    if (x > (a + 1.0) / (a + b + 2.0))
        return 1.0 - incomplete_beta(b, a, 1.0 - x);
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x)) / a;
    const double tiny = 1e-300;
    double f = 1.0, c = 1.0, d = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const int m = i / 2;
        double num;
        if (i == 0)
            num = 1.0;
        else if (i % 2 == 0)
            num = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        else
            num = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny)
            d = tiny;
        d = 1.0 / d;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny)
            c = tiny;
        const double cd = c * d;
        f *= cd;
        if (std::abs(1.0 - cd) < 1e-16)
            break;
    }
    return front * (f - 1.0);
}

struct TResult {
    double t;
    double p;
};

inline TResult pooled_t_test(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n1 = static_cast<double>(x.size()), n2 = static_cast<double>(y.size());
    const double m1 = std::accumulate(x.begin(), x.end(), 0.0) / n1;
    const double m2 = std::accumulate(y.begin(), y.end(), 0.0) / n2;
    double s1 = 0.0, s2 = 0.0;
    for (double v : x)
        s1 += (v - m1) * (v - m1);
    for (double v : y)
        s2 += (v - m2) * (v - m2);
    const double dof = n1 + n2 - 2.0;
    const double pooled = (s1 + s2) / dof;
    const double t = (m1 - m2) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    return {t, incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t))};
}

} // namespace oracle
