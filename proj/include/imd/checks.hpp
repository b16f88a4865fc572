#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace imd {

/// Outcome of one invariant checked on a batch of random instances.
struct CheckEntry {
    std::string suite;
    std::string name;
    bool passed = true;
    std::size_t instances = 0;
    /// Largest observed violation (0 when the invariant is exact).
    double worst = 0.0;
    std::string detail;
};

/// Suites: imd (including function families), ot, uncertainty, all.
std::vector<CheckEntry> run_check_suite(const std::string& suite, std::uint64_t seed = 1);

}  // namespace imd
