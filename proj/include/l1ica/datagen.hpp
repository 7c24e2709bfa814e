#pragma once

#include "l1ica/types.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace l1ica {

struct Laplace {
    double mu = 0.0;
    double sigma = 1.0;
};

struct LogNormal {
    double mu = 0.0;
    double sigma = 1.0;
};

struct Uniform {
    double c1 = 0.0;
    double c2 = 1.0;
};

using SourceDistribution = std::variant<Laplace, LogNormal, Uniform>;

/// One block of source rows: a distribution and the fraction of the K rows
/// drawn from it.
struct SourceRowSpec {
    SourceDistribution distribution;
    double fraction = 1.0;
};

struct GroundTruth {
    Matrix A_star; // p x K
    Matrix S_star; // K x N
    double chi = 0.0;
    double noise_sigma = 0.0;
};

/// Row counts per SourceRowSpec entry: round-half-up of fraction*K for every entry but
/// the last, which takes the remainder. Validates the spec.
std::vector<Index> source_row_counts(Index K, const std::vector<SourceRowSpec>& spec);

/// K x N source matrix; rows are filled block by block in list order.
Matrix gen_sources(Index K, Index N, const std::vector<SourceRowSpec>& spec, std::uint64_t seed);

/// p x K Bernoulli-Gaussian mixing: each entry is 0 with probability chi,
/// otherwise standard normal.
Matrix gen_mixing(Index p, Index K, double chi, std::uint64_t seed);

/// X = A* S* + E with E i.i.d. Normal(0, noise_sigma^2).
Matrix gen_observation(const GroundTruth& truth, std::uint64_t seed);

} // namespace l1ica
