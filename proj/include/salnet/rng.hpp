#pragma once

#include <cstdint>
#include <vector>

namespace salnet {

// SplitMix64, used for seeding and for deriving child streams.
//   z = state += 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256** seeded from a 64-bit value through SplitMix64.
//
// Every random draw in the library goes through this type so that a seed
// fully determines an experiment. Normal deviates use the Marsaglia polar
// method (no cached second deviate), uniform doubles take the top 53 bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Independent stream for run `index` of an experiment seeded with `master`.
    // seed = splitmix64(master ^ splitmix64(index + 0x5A17C0DE5A17C0DE)).
    static Rng child(std::uint64_t master, std::uint64_t index);
    static std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();
    // [0, 1)
    double uniform01();
    // [lo, hi); lo == hi returns lo. Throws std::invalid_argument if lo > hi.
    double uniform(double lo, double hi);
    double normal();
    bool bernoulli(double p);
    // Unbiased integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

// Gaussian direction scaled to the given Euclidean norm.
std::vector<double> random_unit_vector(Rng& rng, std::size_t dim, double norm = 1.0);

// Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> shuffled_indices(Rng& rng, std::size_t n);

}  // namespace salnet
