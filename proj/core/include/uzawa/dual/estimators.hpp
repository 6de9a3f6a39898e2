#pragma once

#include "uzawa/core/problem.hpp"
#include "uzawa/core/stats.hpp"

#include <cstdint>

namespace uzawa {

/// Monte Carlo estimate of W(lambda) = -F0*(lambda) + (1/n) sum_i E[G_i + <lambda, u^i>].
/// Each sample averages one realization of every agent.
MeanEstimate estimate_dual_value(const ProblemInstance& problem, const PriceSignal& lambda, std::size_t samples,
                                 std::uint64_t seed, std::size_t workers = 1);

/// Estimate of E[F0(mean realization)] - F0(E[mean realization]).
struct GapEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
  /// True when E[mean realization] came from exact expectations.
  bool exact_mean = false;
};

struct GapOptions {
  std::size_t samples = 1000;
  /// Samples for the inner expectation when it is not available exactly.
  std::size_t mean_samples = 10000;
  std::size_t workers = 1;
};

GapEstimate estimate_gap(const ProblemInstance& problem, const PriceSignal& lambda, std::uint64_t seed,
                         const GapOptions& options = {});

}  // namespace uzawa
