#include "doctest.h"

#include "l1ica/datagen.hpp"
#include "l1ica/fastica.hpp"
#include "l1ica/kernels.hpp"
#include "l1ica/metrics.hpp"
#include "l1ica/rng.hpp"
#include "l1ica/whitening.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace l1ica;

namespace {

Vector unit(double theta)
{
    Vector w(2);
    w << std::cos(theta), std::sin(theta);
    return w;
}

// Noiseless two-source Laplace mixture, whitened.
Matrix laplace_pair(Index N, std::uint64_t seed, Matrix* A_star = nullptr, WhiteningModel* model = nullptr)
{
    GroundTruth t;
    t.S_star = gen_sources(2, N, {{Laplace{0, 1}, 1.0}}, derive_seed(seed, "sources"));
    t.A_star = gen_mixing(2, 2, 0.0, derive_seed(seed, "mixing"));
    const Matrix X = gen_observation(t, 0);
    auto fit = fit_whitening(X, 2);
    if (A_star)
        *A_star = t.A_star;
    if (model)
        *model = fit.model;
    return fit.Z;
}

} // namespace

TEST_CASE("negentropy of a gaussian sample is near zero")
{
    const Index N = 10000;
    const NonlinearityTable table(N, 17);
    Matrix Z(1, N);
    Z.row(0) = table.nu().transpose();
    CHECK(negentropy_cost(Vector::Ones(1), Z, table) < 1e-3);

    Rng rng(18);
    for (Index j = 0; j < N; ++j)
        Z(0, j) = rng.normal();
    CHECK(negentropy_cost(Vector::Ones(1), Z, table) < 1e-3);
}

TEST_CASE("negentropy at Z = 0 approaches (1 - 1/sqrt 2)^2")
{
    const Index N = 200000;
    const NonlinearityTable table(N, 3);
    const Matrix Z = Matrix::Zero(2, N);
    const double expected = std::pow(1.0 - 1.0 / std::numbers::sqrt2, 2);
    CHECK(negentropy_cost(unit(0.3), Z, table) == doctest::Approx(expected).epsilon(0.01));
    CHECK(table.reference_sum() / N == doctest::Approx(-1.0 / std::numbers::sqrt2).epsilon(0.005));
}

TEST_CASE("negentropy is nonnegative and requires unit w")
{
    const Matrix Z = laplace_pair(500, 1);
    const NonlinearityTable table(500, 1);
    for (double th = 0.0; th < 3.2; th += 0.1)
        CHECK(negentropy_cost(unit(th), Z, table) >= 0.0);
    CHECK_THROWS_AS(negentropy_cost(2.0 * unit(0.0), Z, table), std::invalid_argument);
    CHECK(negentropy_value(2.0 * unit(0.0), Z, table) >= 0.0);
    CHECK_THROWS_AS(negentropy_cost(Vector::Ones(3).normalized(), Z, table), std::invalid_argument);
}

TEST_CASE("fastica_update at Z = 0 returns -w")
{
    const NonlinearityTable table(50, 2);
    const Vector w = unit(0.7);
    CHECK((fastica_update(w, Matrix::Zero(2, 50), table) + w).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fastica_update averages both terms")
{
    const Matrix Z = laplace_pair(300, 4);
    const NonlinearityTable table(300, 4);
    const Vector w = unit(1.1);
    Vector expect = Vector::Zero(2);
    for (Index j = 0; j < Z.cols(); ++j) {
        const double y = w.dot(Z.col(j));
        expect += Z.col(j) * contrast_g1(y) - contrast_g2(y) * w;
    }
    expect /= 300.0;
    CHECK((fastica_update(w, Z, table) - expect).norm() < 1e-13);
}

TEST_CASE("the negentropy maximiser found by angle scan is a fixed point")
{
    const Index N = 100000;
    const Matrix Z = laplace_pair(N, 8);
    const NonlinearityTable table(N, 8);
    auto J = [&](double th) { return negentropy_value(unit(th), Z, table); };

    const int steps = 2000;
    double best = 0.0, best_val = -1.0;
    for (int k = 0; k < steps; ++k) {
        const double th = std::numbers::pi * k / steps;
        if (const double v = J(th); v > best_val) {
            best_val = v;
            best = th;
        }
    }
    // Golden-section refinement on the bracketing cell.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best - std::numbers::pi / steps, hi = best + std::numbers::pi / steps;
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    double fa = J(a), fb = J(b);
    while (hi - lo > 1e-12) {
        if (fa > fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = J(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = J(b);
        }
    }
    const Vector w = unit(0.5 * (lo + hi));
    const Vector next = fastica_update(w, Z, table).normalized();
    CHECK(std::min((next - w).norm(), (next + w).norm()) < 1e-6);
}

TEST_CASE("gram_schmidt_step examples")
{
    const Vector w = Vector::Ones(2) / std::numbers::sqrt2;
    CHECK(gram_schmidt_step(w, std::span<const Vector>{}) == w);

    const std::vector<Vector> prior{Vector::Unit(2, 0)};
    const Vector r = gram_schmidt_step(w, prior);
    CHECK(r(0) == 0.0);
    CHECK(r(1) == doctest::Approx(1.0 / std::numbers::sqrt2));
    CHECK_THROWS_AS(gram_schmidt_step(prior[0], prior), DegenerateDeflation);

    Matrix W = Matrix::Identity(3, 3);
    const Vector v = Vector::Ones(3);
    const Vector out = gram_schmidt_step(v, W, 2);
    CHECK(out == Vector::Unit(3, 2));
    CHECK_THROWS_AS(gram_schmidt_step(Vector::Unit(3, 1), W, 2), DegenerateDeflation);
}

TEST_CASE("gram_schmidt_step output is orthogonal to the prior vectors")
{
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Index K = 6;
        Matrix G(K, K);
        for (Index j = 0; j < K; ++j)
            for (Index i = 0; i < K; ++i)
                G(i, j) = rng.normal();
        Eigen::HouseholderQR<Matrix> qr(G);
        const Matrix W = qr.householderQ();
        Vector w(K);
        for (Index i = 0; i < K; ++i)
            w(i) = rng.normal();
        const Vector r = gram_schmidt_step(w, W, 4);
        CHECK((W.leftCols(4).transpose() * r).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("FastICA separates a noiseless 2x2 Laplace mixture")
{
    const Index N = 100000;
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GroundTruth t;
        t.S_star = gen_sources(2, N, {{Laplace{0, 1}, 1.0}}, derive_seed(seed, "sources"));
        t.A_star = gen_mixing(2, 2, 0.0, derive_seed(seed, "mixing"));
        const Matrix X = gen_observation(t, 0);
        const IcaModel m = fastica_fit(X, 2, seed);
        const double ad = amari_distance(unmixing_product(m.W, m.whitening.Q, t.A_star));
        good += ad < 1.0 ? 1 : 0;
        CHECK((m.W.transpose() * m.W - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(good >= 18);
}

TEST_CASE("FastICA fit invariants")
{
    GroundTruth t;
    t.S_star = gen_sources(5, 2000, {{Laplace{0, 1}, 0.4}, {Uniform{0, 1}, 0.6}}, 7);
    t.A_star = gen_mixing(8, 5, 0.3, 8);
    t.noise_sigma = 0.1;
    const Matrix X = gen_observation(t, 9);
    const IcaModel m = fastica_fit(X, 5, 11);
    CHECK((m.W.transpose() * m.W - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((m.A - m.whitening.Q_pinv * m.W).cwiseAbs().maxCoeff() == 0.0);
    const Matrix Z = m.whitening.Q * m.whitening.center(X);
    CHECK((m.S - m.W.transpose() * Z).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.components.size() == 5);

    const NonlinearityTable table(2000, 11);
    for (Index i = 0; i < 5; ++i) {
        const Vector w = m.W.col(i);
        CHECK(negentropy_cost(w, Z, table) == negentropy_cost(-w, Z, table));
    }
    const IcaModel again = fastica_fit(X, 5, 11);
    CHECK(again.W == m.W);
}

TEST_CASE("initial_unmixing has unit columns and is seed-determined")
{
    const Matrix W0 = initial_unmixing(6, 3);
    for (Index j = 0; j < 6; ++j)
        CHECK(W0.col(j).norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(initial_unmixing(6, 3) == W0);
    CHECK(initial_unmixing(6, 4) != W0);
    const Vector r = restart_direction(6, 3, 2, 1);
    CHECK(r.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(restart_direction(6, 3, 2, 2) != r);
}

TEST_CASE("deflated_start redraws a spanned candidate")
{
    Matrix W = Matrix::Identity(3, 3);
    ComponentDiagnostics diag;
    const Vector v = detail::deflated_start(Vector::Unit(3, 0), W, 2, 1, diag);
    CHECK(std::abs(v(2)) == doctest::Approx(1.0));
    CHECK(diag.restarts >= 1);
    CHECK(!diag.degenerate);
}
