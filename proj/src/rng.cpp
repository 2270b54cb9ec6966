#include "salnet/rng.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace salnet {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Rng::child_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t a = index + 0x5A17C0DE5A17C0DEULL;
    std::uint64_t b = master ^ splitmix64(a);
    return splitmix64(b);
}

Rng Rng::child(std::uint64_t master, std::uint64_t index) { return Rng(child_seed(master, index)); }

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform: lo > hi");
    if (lo == hi) return lo;
    const double v = lo + (hi - lo) * uniform01();
    // Rounding can land exactly on hi for tiny ranges.
    return v < hi ? v : std::nextafter(hi, lo);
}

double Rng::normal() {
    for (;;) {
        const double a = 2.0 * uniform01() - 1.0;
        const double b = 2.0 * uniform01() - 1.0;
        const double r2 = a * a + b * b;
        if (r2 > 0.0 && r2 < 1.0) return a * std::sqrt(-2.0 * std::log(r2) / r2);
    }
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= threshold) return x % bound;
    }
}

std::vector<double> random_unit_vector(Rng& rng, std::size_t dim, double norm) {
    if (dim == 0) throw std::invalid_argument("random_unit_vector: dim must be >= 1");
    if (!(norm > 0.0)) throw std::invalid_argument("random_unit_vector: norm must be > 0");
    std::vector<double> v(dim);
    double sq = 0.0;
    do {
        sq = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            sq += x * x;
        }
    } while (sq == 0.0);
    const double scale = norm / std::sqrt(sq);
    for (auto& x : v) x *= scale;
    return v;
}

std::vector<std::size_t> shuffled_indices(Rng& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace salnet
