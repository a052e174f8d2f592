#pragma once

// Statistical check of the independence-between-colors bound for one
// variable: E[log2 max(1 + I_x, A^imp_x)] is at most the same expectation
// with the per-color indicators replaced by independent ones that have the
// same conditional marginals given pi(x).

#include "ippsz/solver.hpp"

#include <cstdint>

namespace ippsz
{

struct IndependenceReport
{
    double left = 0.0;
    double left_se = 0.0;
    double right = 0.0;
    double right_se = 0.0;
    std::uint64_t trials = 0;
    unsigned bins = 0;

    // left <= right + 3 sigma of the difference.
    [[nodiscard]] bool holds() const;
};

// Marginals Pr[A^imp_{x,c} = 1 | pi(x) = p] are estimated on `bins` equal
// bins of p from a first batch of `trials` placements; both sides are then
// estimated from a second, independent batch.
[[nodiscard]] IndependenceReport verify_independence_upper_bound( const ExactOracle& oracle, Var x,
                                                                  double theta,
                                                                  std::uint64_t trials,
                                                                  std::uint64_t seed,
                                                                  unsigned bins = 16 );

} // namespace ippsz
