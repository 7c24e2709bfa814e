#pragma once

#include <cstdint>
#include <string_view>

namespace l1ica {

/// xoshiro256** 1.0 seeded through splitmix64.
///
/// Every distribution below is implemented here rather than through
/// <random> so the streams are bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1].
    double uniform_open_low() { return 1.0 - uniform(); }
    /// Standard normal, Box-Muller with the second value cached.
    double normal();
    /// Laplace with location mu and scale sigma (density exp(-|x-mu|/sigma)/(2 sigma)).
    double laplace(double mu, double sigma);
    double lognormal(double mu, double sigma);
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of the substream identified by (seed, purpose, index).
///
/// The purpose tag is hashed with 64-bit FNV-1a; seed, tag hash and index are
/// then folded through three splitmix64 rounds. Distinct purposes and indices
/// give statistically independent streams, and adding a new purpose never
/// changes an existing one.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

inline Rng substream(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0)
{
    return Rng(derive_seed(seed, purpose, index));
}

} // namespace l1ica
