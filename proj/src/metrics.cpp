#include "l1ica/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <numeric>
#include <string>

namespace l1ica {

double sparsity(const Matrix& A, double epsilon)
{
    require(A.size() > 0, "sparsity: empty matrix");
    require(epsilon > 0.0, "sparsity: epsilon must be positive");
    const Vector norms = A.colwise().norm().transpose();
    const double floor = kZeroColumnTolerance * norms.maxCoeff();
    Index small = 0;
    for (Index j = 0; j < A.cols(); ++j) {
        const double norm = norms[j];
        if (norm <= floor) {
            small += A.rows();
            continue;
        }
        for (Index i = 0; i < A.rows(); ++i)
            if (std::abs(A(i, j)) / norm < epsilon)
                ++small;
    }
    return static_cast<double>(small) / static_cast<double>(A.size());
}

Index zero_columns(const Matrix& A)
{
    const Vector norms = A.colwise().norm().transpose();
    const double floor = norms.size() > 0 ? kZeroColumnTolerance * norms.maxCoeff() : 0.0;
    Index n = 0;
    for (Index j = 0; j < norms.size(); ++j)
        if (norms[j] <= floor)
            ++n;
    return n;
}

double mak(const Matrix& S)
{
    require(S.size() > 0, "mak: empty matrix");
    double total = 0.0;
    for (Index i = 0; i < S.rows(); ++i) {
        const auto sq = S.row(i).array().square();
        const double m2 = sq.mean();
        const double m4 = sq.square().mean();
        if (!(m2 > 0.0))
            throw NumericalError("mak: row " + std::to_string(i) + " has zero second moment");
        total += std::abs(m4 / (m2 * m2) - 3.0);
    }
    return total / static_cast<double>(S.rows());
}

double rmse(const Matrix& X, const Matrix& A, const Matrix& S)
{
    require(A.cols() == S.rows() && X.rows() == A.rows() && X.cols() == S.cols(),
            "rmse: X, A and S are not conformable");
    return std::sqrt((X - A * S).squaredNorm() / static_cast<double>(X.size()));
}

double amari_distance(const Matrix& P)
{
    require(P.rows() == P.cols() && P.rows() >= 1, "amari_distance: P must be square");
    const Matrix M = P.cwiseAbs();
    const Vector row_max = M.rowwise().maxCoeff();
    const Vector col_max = M.colwise().maxCoeff().transpose();
    if ((row_max.array() == 0.0).any() || (col_max.array() == 0.0).any())
        throw NumericalError("amari_distance: P has a zero row or column");
    double d = 0.0;
    for (Index i = 0; i < M.rows(); ++i)
        d += M.row(i).sum() / row_max[i] - 1.0;
    for (Index j = 0; j < M.cols(); ++j)
        d += M.col(j).sum() / col_max[j] - 1.0;
    return d;
}

Matrix unmixing_product(const Matrix& W, const Matrix& Q, const Matrix& A_star)
{
    require(W.rows() == Q.rows() && Q.cols() == A_star.rows(),
            "unmixing_product: W (" + std::to_string(W.rows()) + "x" + std::to_string(W.cols()) + "), Q ("
                + std::to_string(Q.rows()) + "x" + std::to_string(Q.cols()) + ") and A* ("
                + std::to_string(A_star.rows()) + "x" + std::to_string(A_star.cols()) + ") are not conformable");
    return W.transpose() * (Q * A_star);
}

double success_rate(std::span<const double> amari_values, double psi)
{
    require(!amari_values.empty(), "success_rate: no values");
    std::size_t hits = 0;
    for (double v : amari_values)
        if (v < psi)
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(amari_values.size());
}

double correlation(std::span<const double> s, std::span<const double> d)
{
    require(s.size() == d.size() && !s.empty(), "correlation: vectors must have equal nonzero length");
    const auto n = static_cast<Index>(s.size());
    const Eigen::Map<const Vector> sv(s.data(), n);
    const Eigen::Map<const Vector> dv(d.data(), n);
    const Vector sc = sv.array() - sv.mean();
    const Vector dc = dv.array() - dv.mean();
    const double ns = sc.norm();
    const double nd = dc.norm();
    if (ns == 0.0 || nd == 0.0)
        throw NumericalError("correlation: constant vector");
    return std::min(1.0, std::abs(sc.dot(dc)) / (ns * nd));
}

double mean(std::span<const double> values)
{
    require(!values.empty(), "mean: no values");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values)
{
    require(!values.empty(), "standard_error: no values");
    if (values.size() < 2)
        return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values)
        ss += (v - m) * (v - m);
    const double n = static_cast<double>(values.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

TTest two_sample_t_test(std::span<const double> x, std::span<const double> y)
{
    require(x.size() >= 2 && y.size() >= 2, "two_sample_t_test: each sample needs at least 2 values");
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());
    const double m1 = mean(x);
    const double m2 = mean(y);
    double ss1 = 0.0;
    double ss2 = 0.0;
    for (double v : x)
        ss1 += (v - m1) * (v - m1);
    for (double v : y)
        ss2 += (v - m2) * (v - m2);
    TTest r;
    r.dof = n1 + n2 - 2.0;
    const double pooled = (ss1 + ss2) / r.dof;
    if (!(pooled > 0.0))
        throw NumericalError("two_sample_t_test: zero pooled variance");
    r.t = (m1 - m2) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    const boost::math::students_t dist(r.dof);
    r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    r.p = std::min(1.0, r.p);
    return r;
}

std::vector<SparsityBin> success_by_sparsity(std::span<const double> sparsities, std::span<const double> amari_values,
                                             double psi, double width)
{
    require(sparsities.size() == amari_values.size(), "success_by_sparsity: length mismatch");
    require(width > 0.0 && width <= 1.0, "success_by_sparsity: width must lie in (0, 1]");
    const auto bins = static_cast<Index>(std::floor(1.0 / width + 0.5)) + 1;
    std::vector<SparsityBin> out(static_cast<std::size_t>(bins));
    std::vector<Index> hits(static_cast<std::size_t>(bins), 0);
    for (Index b = 0; b < bins; ++b) {
        auto& bin = out[static_cast<std::size_t>(b)];
        bin.center = static_cast<double>(b) * width;
        bin.lo = bin.center - 0.5 * width;
        bin.hi = bin.center + 0.5 * width;
    }
    for (std::size_t k = 0; k < sparsities.size(); ++k) {
        auto b = static_cast<Index>(std::floor(sparsities[k] / width + 0.5));
        b = std::clamp<Index>(b, 0, bins - 1);
        out[static_cast<std::size_t>(b)].frequency += 1;
        if (amari_values[k] < psi)
            hits[static_cast<std::size_t>(b)] += 1;
    }
    for (std::size_t b = 0; b < out.size(); ++b)
        if (out[b].frequency > 0)
            out[b].success_rate = static_cast<double>(hits[b]) / static_cast<double>(out[b].frequency);
    return out;
}

} // namespace l1ica
