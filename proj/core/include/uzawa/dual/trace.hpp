#pragma once

#include "uzawa/core/price_signal.hpp"
#include "uzawa/core/stats.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace uzawa {

/// One iteration k: lambda^k, the gradient estimate Y^{k+1} and the step rho_k,
/// so that lambda^{k+1} = lambda^k + rho_k * Y^{k+1}.
struct DualIterate {
  std::size_t k = 0;
  double rho = 0.0;
  PriceSignal lambda;
  PriceSignal gradient;
  std::optional<MeanEstimate> dual_value;
  double wall_seconds = 0.0;
};

struct DualTrace {
  /// Iterations kept (every `thinning`-th, always including the first).
  std::vector<DualIterate> iterates;
  std::size_t iterations = 0;
  std::size_t thinning = 1;
  PriceSignal final_price;

  /// lambda^k for 0 <= k <= iterations, when stored.
  const PriceSignal& price_at(std::size_t k) const;
};

}  // namespace uzawa
