#include "salnet/tasks.hpp"

#include <bit>

namespace salnet {

Vector SequencePattern::input_at(std::size_t step, std::size_t channels) const {
    Vector x(channels, 0.0);
    for (const auto& s : schedule)
        if (s.step == step && s.channel < channels) x[s.channel] = s.value;
    return x;
}

std::vector<SequencePattern> parity3_patterns(const ParityEncoding& enc) {
    std::vector<SequencePattern> patterns;
    for (int word = 0; word < 8; ++word) {
        SequencePattern p;
        int ones = 0;
        for (std::size_t k = 0; k < 3; ++k) {
            p.bits[k] = (word >> (2 - k)) & 1;
            ones += p.bits[k];
            p.schedule.push_back({k * enc.interval, k, p.bits[k] ? enc.on : enc.off});
        }
        p.output_step = 3 * enc.interval;
        p.target = ones % 2 == 1 ? enc.target : -enc.target;
        patterns.push_back(std::move(p));
    }
    return patterns;
}

double parity8_target(std::uint32_t bits, double target_magnitude) {
    return std::popcount(bits & 0xFFu) % 2 == 1 ? target_magnitude : -target_magnitude;
}

StaticPattern parity8_pattern(std::uint32_t bits, Rng& rng, double noise, double target_magnitude) {
    StaticPattern p;
    p.bits = bits & 0xFFu;
    p.inputs.resize(8);
    for (std::size_t i = 0; i < 8; ++i) {
        p.inputs[i] = (p.bits >> i) & 1u ? 1.0 : -1.0;
        if (noise > 0.0) p.inputs[i] += rng.uniform(-noise, noise);
    }
    p.target = parity8_target(p.bits, target_magnitude);
    return p;
}

std::vector<Vector> random_probe_inputs(Rng& rng, std::size_t count, std::size_t dim) {
    std::vector<Vector> out(count, Vector(dim));
    for (auto& v : out)
        for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return out;
}

}  // namespace salnet
