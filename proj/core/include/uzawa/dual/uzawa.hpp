#pragma once

#include "uzawa/core/errors.hpp"
#include "uzawa/core/problem.hpp"
#include "uzawa/core/step_schedule.hpp"
#include "uzawa/dual/trace.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace uzawa {

/// Failure inside a dual iteration; carries the iteration index.
class DualAscentError : public Error {
 public:
  DualAscentError(std::size_t iteration, const std::string& what)
      : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

/// ||Y||^2 <= m1 + m2 ||lambda||^2, checked on every iteration when set.
struct GrowthBound {
  double m1 = 0.0;
  double m2 = 0.0;
  bool holds(double y_sq, double lambda_sq) const noexcept { return y_sq <= m1 + m2 * lambda_sq; }
};

struct UzawaOptions {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::size_t workers = 1;
  /// Starting price; the problem's initial price when unset.
  std::optional<PriceSignal> initial_price;
  /// Keep every thinning-th iterate in the trace.
  std::size_t thinning = 1;
  bool keep_trace = true;
  std::optional<GrowthBound> growth_bound;
  /// Monte Carlo samples for a dual-value estimate every `dual_value_every`
  /// iterations (0 disables).
  std::size_t dual_value_every = 0;
  std::size_t dual_value_samples = 0;
  /// Called with (k, lambda^k) for k = 0..K, after the update that produced it.
  std::function<void(std::size_t, const PriceSignal&)> on_price;
};

/// One fresh realization per agent per iteration.
DualTrace stochastic_uzawa(const ProblemInstance& problem, const StepSchedule& schedule, const UzawaOptions& options);

/// m agents drawn uniformly with replacement per iteration.
DualTrace sampled_stochastic_uzawa(const ProblemInstance& problem, std::size_t m, const StepSchedule& schedule,
                                   const UzawaOptions& options);

/// Exact-gradient ascent; every agent must offer exact expectations.
DualTrace deterministic_uzawa(const ProblemInstance& problem, const StepSchedule& schedule,
                              const UzawaOptions& options);

/// The dual gradient (1/n) sum_i E[u^i(lambda)] - v(lambda). Needs exact expectations.
PriceSignal exact_gradient(const ProblemInstance& problem, const PriceSignal& lambda, std::size_t workers = 1);

/// A single draw of Y at lambda using the iteration-k streams of the full algorithm.
PriceSignal sample_gradient(const ProblemInstance& problem, const PriceSignal& lambda, std::uint64_t seed,
                            std::size_t k, std::size_t workers = 1);

/// Measures growth constants from gradient draws at lambda = 0 and at random
/// prices of the given scales, inflated by `safety`.
GrowthBound calibrate_growth_bound(const ProblemInstance& problem, std::uint64_t seed,
                                   const std::vector<double>& scales, std::size_t draws, double safety = 10.0);

}  // namespace uzawa
