#include "doctest.h"
#include "oracles.hpp"

#include "l1ica/datagen.hpp"
#include "l1ica/metrics.hpp"
#include "l1ica/rng.hpp"

#include <cmath>
#include <vector>

using namespace l1ica;

namespace {

Matrix gaussian(Index r, Index c, std::uint64_t seed)
{
    Rng rng(seed);
    Matrix m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = rng.normal();
    return m;
}

Matrix permutation(Index K, std::uint64_t seed)
{
    std::vector<Index> idx(static_cast<std::size_t>(K));
    for (Index i = 0; i < K; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    Rng rng(seed);
    for (Index i = K - 1; i > 0; --i)
        std::swap(idx[static_cast<std::size_t>(i)], idx[rng.next_u64() % static_cast<std::uint64_t>(i + 1)]);
    Matrix P = Matrix::Zero(K, K);
    for (Index i = 0; i < K; ++i)
        P(i, idx[static_cast<std::size_t>(i)]) = 1.0;
    return P;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

TEST_CASE("sparsity examples")
{
    Matrix A = Matrix::Zero(4, 3);
    A.topRows(3) = Matrix::Identity(3, 3);
    CHECK(sparsity(A) == 0.75);
    CHECK(sparsity(Matrix::Ones(2, 2)) == 0.0);

    double total = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s)
        total += sparsity(gen_mixing(10, 10, 0.8, derive_seed(s, "mixing")));
    CHECK(std::abs(total / 20 - 0.8) < 0.03);
}

TEST_CASE("sparsity counts magnitudes and ignores column scale")
{
    Matrix A(2, 2);
    A << -5.0, 1.0, 0.001, 1.0;
    CHECK(sparsity(A) == 0.25);
    const Matrix B = gaussian(8, 4, 3);
    Matrix scaled = B;
    scaled.col(1) *= 1e4;
    scaled.col(3) *= 0.37;
    CHECK(sparsity(scaled) == sparsity(B));
    CHECK(sparsity(B, 10.0) == 1.0);
}

TEST_CASE("near-zero columns count as entirely sparse")
{
    Matrix A = gaussian(5, 3, 4);
    A.col(2) *= 1e-12;
    CHECK(zero_columns(A) == 1);
    Matrix dense = Matrix::Ones(5, 3);
    dense.col(2) *= 1e-12;
    CHECK(sparsity(dense) == doctest::Approx(1.0 / 3.0));
    CHECK(zero_columns(Matrix::Ones(3, 3)) == 0);
}

TEST_CASE("mak on known distributions")
{
    const Index N = 1000000;
    CHECK(mak(gaussian(1, N, 5)) < 0.02);
    Rng rng(6);
    Matrix U(1, N), L(1, N);
    for (Index j = 0; j < N; ++j) {
        U(0, j) = rng.uniform(-2.0, 2.0);
        L(0, j) = rng.laplace(0.0, 1.0);
    }
    CHECK(std::abs(mak(U) - 1.2) < 0.05);
    CHECK(std::abs(mak(L) - 3.0) < 0.3);
    CHECK_THROWS_AS(mak(Matrix::Zero(2, 10)), NumericalError);
}

TEST_CASE("rmse examples")
{
    const Matrix A = gaussian(6, 3, 7), S = gaussian(3, 50, 8);
    CHECK(rmse(A * S, A, S) == 0.0);
    CHECK(rmse((A * S).array() + 0.25, A, S) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(rmse(Matrix::Zero(5, 50), A, S), std::invalid_argument);
}

TEST_CASE("metrics agree with naive loops")
{
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const Index p = 2 + static_cast<Index>(rng.next_u64() % 6);
        const Index K = 2 + static_cast<Index>(rng.next_u64() % 4);
        const Index N = 5 + static_cast<Index>(rng.next_u64() % 40);
        const Matrix X = gaussian(p, N, rng.next_u64());
        const Matrix A = gaussian(p, K, rng.next_u64());
        const Matrix S = gaussian(K, N, rng.next_u64());
        const Matrix P = gaussian(K, K, rng.next_u64());
        CHECK(std::abs(rmse(X, A, S) - oracle::naive_rmse(X, A, S)) < 1e-12);
        CHECK(std::abs(mak(S) - oracle::naive_mak(S)) < 1e-12);
        CHECK(std::abs(amari_distance(P) - oracle::naive_amari(P)) < 1e-12);
        const auto s = to_std(S.row(0).transpose()), d = to_std(S.row(1).transpose());
        CHECK(std::abs(correlation(s, d) - oracle::naive_correlation(s, d)) < 1e-12);
    }
}

TEST_CASE("amari distance examples")
{
    CHECK(amari_distance(Matrix::Ones(2, 2)) == 4.0);
    for (Index K = 1; K <= 5; ++K) {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Matrix Pi = permutation(K, s);
            CHECK(amari_distance(Pi) == 0.0);
            Vector d1(K), d2(K);
            Rng rng(s + 100);
            for (Index i = 0; i < K; ++i) {
                d1(i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 10.0);
                d2(i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 10.0);
            }
            const Matrix G = d1.asDiagonal() * Pi * d2.asDiagonal();
            CHECK(amari_distance(G) == 0.0);
            if (K >= 2) {
                Index c = 0;
                while (Pi(0, c) != 0.0)
                    ++c;
                Matrix perturbed = G;
                perturbed(0, c) += 0.05;
                CHECK(amari_distance(perturbed) > 0.0);
            }
        }
    }
    Matrix zero_row = Matrix::Identity(3, 3);
    zero_row.row(1).setZero();
    CHECK_THROWS_AS(amari_distance(zero_row), NumericalError);
}

TEST_CASE("unmixing_product")
{
    const Matrix Pi = permutation(4, 1);
    CHECK(amari_distance(unmixing_product(Matrix::Identity(4, 4), Matrix::Identity(4, 4), Pi)) == 0.0);
    const Matrix W = gaussian(4, 4, 2), Q = gaussian(4, 9, 3), A = gaussian(9, 4, 4);
    const Matrix P = unmixing_product(W, Q, A);
    Matrix direct = Matrix::Zero(4, 4);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j)
            for (Index a = 0; a < 4; ++a)
                for (Index b = 0; b < 9; ++b)
                    direct(i, j) += W(a, i) * Q(a, b) * A(b, j);
    CHECK((P - direct).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(unmixing_product(W, Q.transpose(), A), std::invalid_argument);
}

TEST_CASE("success rate")
{
    const std::vector<double> v{30.0, 40.0};
    CHECK(success_rate(v, 35.0) == 0.5);
    CHECK(success_rate(v, 41.0) == 1.0);
    CHECK(success_rate(v, 30.0) == 0.0);
    CHECK_THROWS_AS(success_rate(std::vector<double>{}, 35.0), std::invalid_argument);
    Rng rng(10);
    std::vector<double> many(100);
    for (auto& x : many)
        x = rng.uniform(20.0, 60.0);
    double prev = 0.0;
    for (double psi = 15.0; psi <= 65.0; psi += 0.5) {
        const double sr = success_rate(many, psi);
        CHECK(sr >= prev);
        prev = sr;
    }
}

TEST_CASE("correlation")
{
    Rng rng(11);
    std::vector<double> d(200), s(200);
    for (auto& x : d)
        x = rng.normal();
    CHECK(correlation(d, d) == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 0; i < d.size(); ++i)
        s[i] = -2.0 * d[i] + 7.0;
    CHECK(correlation(s, d) == doctest::Approx(1.0).epsilon(1e-14));

    const std::vector<double> a{1.0, -1.0, 1.0, -1.0}, b{1.0, 1.0, -1.0, -1.0};
    CHECK(correlation(a, b) == 0.0);
    CHECK_THROWS_AS(correlation(std::vector<double>(5, 3.0), std::vector<double>{1, 2, 3, 4, 5}), NumericalError);

    std::vector<double> e(200);
    for (auto& x : e)
        x = rng.normal();
    const double base = correlation(e, d);
    for (std::size_t i = 0; i < e.size(); ++i)
        s[i] = 3.5 * e[i] - 1.25;
    CHECK(correlation(s, d) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("two-sample t-test")
{
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto same = two_sample_t_test(x, x);
    CHECK(same.t == 0.0);
    CHECK(same.p == doctest::Approx(1.0));
    CHECK_THROWS_AS(two_sample_t_test(std::vector<double>{0, 0}, std::vector<double>{1, 1}), NumericalError);
    CHECK_THROWS_AS(two_sample_t_test(std::vector<double>{0}, std::vector<double>{1, 2}), std::invalid_argument);

    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(15), b(23);
        for (auto& v : a)
            v = rng.normal();
        for (auto& v : b)
            v = 0.5 + 1.3 * rng.normal();
        const auto got = two_sample_t_test(a, b);
        const auto ref = oracle::pooled_t_test(a, b);
        CHECK(std::abs(got.t - ref.t) < 1e-10);
        CHECK(std::abs(got.p - ref.p) < 1e-8);
        CHECK(got.dof == 36.0);
    }
    const auto neg = two_sample_t_test(std::vector<double>{0, 1, 2}, std::vector<double>{5, 6, 8});
    CHECK(neg.t < 0.0);
}

TEST_CASE("mean and standard error")
{
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(v) == 2.5);
    CHECK(standard_error(v) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(standard_error(std::vector<double>{7.0}) == 0.0);
}

TEST_CASE("success by sparsity bins")
{
    const std::vector<double> sp{0.0, 0.04, 0.06, 0.81, 0.84, 0.86, 1.0};
    const std::vector<double> ad{10, 50, 10, 10, 50, 10, 10};
    const auto bins = success_by_sparsity(sp, ad, 35.0);
    REQUIRE(bins.size() == 11);
    CHECK(bins[0].frequency == 2);
    CHECK(bins[0].success_rate == 0.5);
    CHECK(bins[1].frequency == 1);
    CHECK(bins[8].frequency == 2);
    CHECK(bins[8].success_rate == 0.5);
    CHECK(bins[9].frequency == 1);
    CHECK(bins[10].frequency == 1);
    CHECK(bins[5].frequency == 0);
    CHECK(bins[5].success_rate == 0.0);
    CHECK(bins[8].center == doctest::Approx(0.8));
    CHECK(bins[8].lo == doctest::Approx(0.75));
    CHECK(bins[8].hi == doctest::Approx(0.85));
    CHECK_THROWS_AS(success_by_sparsity(sp, std::vector<double>{1.0}, 35.0), std::invalid_argument);
}
