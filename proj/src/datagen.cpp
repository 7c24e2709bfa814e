#include "l1ica/datagen.hpp"

#include "l1ica/rng.hpp"

#include <cmath>
#include <string>

namespace l1ica {

namespace {

void validate(const SourceDistribution& d)
{
    if (const auto* lap = std::get_if<Laplace>(&d))
        require(lap->sigma > 0.0 && std::isfinite(lap->sigma), "Laplace sigma must be positive");
    else if (const auto* ln = std::get_if<LogNormal>(&d))
        require(ln->sigma > 0.0 && std::isfinite(ln->sigma), "log-normal sigma must be positive");
    else if (const auto* u = std::get_if<Uniform>(&d))
        require(u->c1 < u->c2, "uniform interval requires c1 < c2");
}

struct Sampler {
    Rng& rng;
    double operator()(const Laplace& d) const { return rng.laplace(d.mu, d.sigma); }
    double operator()(const LogNormal& d) const { return rng.lognormal(d.mu, d.sigma); }
    double operator()(const Uniform& d) const { return rng.uniform(d.c1, d.c2); }
};

} // namespace

std::vector<Index> source_row_counts(Index K, const std::vector<SourceRowSpec>& spec)
{
    require(K >= 1, "gen_sources: K must be >= 1");
    require(!spec.empty(), "gen_sources: empty source spec");
    double total = 0.0;
    for (const auto& s : spec) {
        require(s.fraction >= 0.0 && s.fraction <= 1.0, "gen_sources: fraction outside [0,1]");
        validate(s.distribution);
        total += s.fraction;
    }
    require(std::abs(total - 1.0) <= 1e-12, "gen_sources: fractions must sum to 1");

    std::vector<Index> counts(spec.size(), 0);
    Index assigned = 0;
    for (std::size_t i = 0; i + 1 < spec.size(); ++i) {
        const auto rows = static_cast<Index>(std::floor(spec[i].fraction * static_cast<double>(K) + 0.5));
        counts[i] = std::min(rows, K - assigned);
        assigned += counts[i];
    }
    counts.back() = K - assigned;
    return counts;
}

Matrix gen_sources(Index K, Index N, const std::vector<SourceRowSpec>& spec, std::uint64_t seed)
{
    require(N >= 1, "gen_sources: N must be >= 1");
    const auto counts = source_row_counts(K, spec);

    Rng rng(seed);
    Matrix S(K, N);
    Index row = 0;
    for (std::size_t b = 0; b < spec.size(); ++b) {
        const Sampler draw{rng};
        for (Index r = 0; r < counts[b]; ++r, ++row)
            for (Index j = 0; j < N; ++j)
                S(row, j) = std::visit(draw, spec[b].distribution);
    }
    return S;
}

Matrix gen_mixing(Index p, Index K, double chi, std::uint64_t seed)
{
    require(p >= 1 && K >= 1, "gen_mixing: p and K must be >= 1");
    require(chi >= 0.0 && chi <= 1.0, "gen_mixing: chi outside [0,1]");
    Rng rng(seed);
    Matrix A(p, K);
    for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < K; ++j)
            A(i, j) = rng.uniform() < chi ? 0.0 : rng.normal();
    return A;
}

Matrix gen_observation(const GroundTruth& truth, std::uint64_t seed)
{
    require(truth.A_star.cols() == truth.S_star.rows(),
            "gen_observation: A* has " + std::to_string(truth.A_star.cols()) + " columns but S* has "
                + std::to_string(truth.S_star.rows()) + " rows");
    require(truth.noise_sigma >= 0.0, "gen_observation: noise_sigma must be nonnegative");

    Matrix X = truth.A_star * truth.S_star;
    if (truth.noise_sigma > 0.0) {
        Rng rng(seed);
        for (Index i = 0; i < X.rows(); ++i)
            for (Index j = 0; j < X.cols(); ++j)
                X(i, j) += truth.noise_sigma * rng.normal();
    }
    require_finite(X, "gen_observation");
    return X;
}

} // namespace l1ica
