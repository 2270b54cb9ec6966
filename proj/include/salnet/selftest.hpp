#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace salnet {

struct SelftestCheck {
    std::string name;
    double value = 0.0;  // measured error or statistic
    double limit = 0.0;  // pass when value <= limit
    bool passed = false;
};

struct SelftestReport {
    std::vector<SelftestCheck> checks;

    bool passed() const;
};

// Finite-difference checks of the SAL update and of BP/BPTT, Monte-Carlo
// checks of forward and backward variance propagation, a linear-map
// Lyapunov check and a CSV round trip.
SelftestReport run_selftest(std::uint64_t seed = 1);

}  // namespace salnet
