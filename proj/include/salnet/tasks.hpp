#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "salnet/matrix.hpp"
#include "salnet/rng.hpp"

namespace salnet {

struct ScheduledInput {
    std::size_t step;
    std::size_t channel;  // 0-based input neuron
    double value;
};

// Sequential 3-bit parity with a 300-step lag. Bit k (0-based) arrives on
// channel k at step 100*k as a one-step pulse of -1 (bit 0) or +1 (bit 1);
// every other input is 0. The target at step `output_step` is +0.8 for an
// odd number of 1-bits and -0.8 otherwise.
struct SequencePattern {
    std::array<int, 3> bits{};
    std::vector<ScheduledInput> schedule;
    double target = 0.0;
    std::size_t output_step = 300;

    Vector input_at(std::size_t step, std::size_t channels = 3) const;
};

struct ParityEncoding {
    double on = 1.0;
    double off = -1.0;
    double target = 0.8;
    std::size_t interval = 100;
};

// All eight words in order 0..7, bit k = (word >> (2 - k)) & 1.
std::vector<SequencePattern> parity3_patterns(const ParityEncoding& enc = {});

struct StaticPattern {
    std::uint32_t bits = 0;
    Vector inputs;
    double target = 0.0;
};

// Input i is +1 when bit i of `bits` is set and -1 otherwise, plus fresh
// uniform noise in [-noise, noise) per element (no draws when noise == 0).
StaticPattern parity8_pattern(std::uint32_t bits, Rng& rng, double noise = 0.2, double target_magnitude = 0.8);
double parity8_target(std::uint32_t bits, double target_magnitude = 0.8);

// `count` vectors with elements uniform in [-1, 1).
std::vector<Vector> random_probe_inputs(Rng& rng, std::size_t count = 1000, std::size_t dim = 8);

}  // namespace salnet
