#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace benjamin {

/// Empirical constants of a pointwise or norm inequality.
struct BoundReport {
    std::string lemma;
    std::size_t samples = 0;
    double max_ratio = 0.0;
    /// Infimum of the ratio, meaningful for two-sided claims.
    double min_ratio = 0.0;
    /// Samples excluded because they violated the hypothesis or were degenerate.
    std::size_t violations = 0;
    std::uint64_t seed = 0;
};

} // namespace benjamin
