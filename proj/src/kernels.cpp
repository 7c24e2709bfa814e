#include "l1ica/kernels.hpp"


#include <string>
#include <vector>

namespace l1ica::kernels {

namespace {

// Below this many columns the thread start-up costs more than the loop.
constexpr Index kParallelThreshold = 4 * kBlock;

void check(const Matrix& Z, const Vector& w)
{
    require(Z.rows() == w.size(), "projection_sums: w has length " + std::to_string(w.size()) + " but Z has "
                                      + std::to_string(Z.rows()) + " rows");
}

} // namespace

namespace serial {

ProjectionSums projection_sums(const Matrix& Z, const Vector& w)
{
    check(Z, w);
    ProjectionSums out;
    out.zg1 = Vector::Zero(Z.rows());
    for (Index j = 0; j < Z.cols(); ++j) {
        const double y = Z.col(j).dot(w);
        const double e = std::exp(-0.5 * y * y);
        out.g -= e;
        out.g2 += (1.0 - y * y) * e;
        out.zg1 += (y * e) * Z.col(j);
    }
    return out;
}

double sum_g(std::span<const double> values)
{
    double s = 0.0;
    for (double v : values)
        s += contrast_g(v);
    return s;
}

} // namespace serial

namespace parallel {

ProjectionSums projection_sums(const Matrix& Z, const Vector& w)
{
    check(Z, w);
    const Index K = Z.rows();
    const Index N = Z.cols();
    const Index blocks = (N + kBlock - 1) / kBlock;

    std::vector<double> g(static_cast<std::size_t>(blocks), 0.0);
    std::vector<double> g2(static_cast<std::size_t>(blocks), 0.0);
    Matrix zg1 = Matrix::Zero(K, blocks);

#pragma omp parallel for schedule(static) if (N >= kParallelThreshold)
    for (Index b = 0; b < blocks; ++b) {
        const Index begin = b * kBlock;
        const Index end = std::min(N, begin + kBlock);
        double bg = 0.0;
        double bg2 = 0.0;
        for (Index j = begin; j < end; ++j) {
            const double y = Z.col(j).dot(w);
            const double e = std::exp(-0.5 * y * y);
            bg -= e;
            bg2 += (1.0 - y * y) * e;
            zg1.col(b) += (y * e) * Z.col(j);
        }
        g[static_cast<std::size_t>(b)] = bg;
        g2[static_cast<std::size_t>(b)] = bg2;
    }

    ProjectionSums out;
    out.zg1 = Vector::Zero(K);
    for (Index b = 0; b < blocks; ++b) {
        out.g += g[static_cast<std::size_t>(b)];
        out.g2 += g2[static_cast<std::size_t>(b)];
        out.zg1 += zg1.col(b);
    }
    return out;
}

double sum_g(std::span<const double> values)
{
    const auto n = static_cast<Index>(values.size());
    const Index blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);

#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
    for (Index b = 0; b < blocks; ++b) {
        const Index end = std::min(n, (b + 1) * kBlock);
        double s = 0.0;
        for (Index j = b * kBlock; j < end; ++j)
            s += contrast_g(values[static_cast<std::size_t>(j)]);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double s : partial)
        total += s;
    return total;
}

} // namespace parallel

} // namespace l1ica::kernels
