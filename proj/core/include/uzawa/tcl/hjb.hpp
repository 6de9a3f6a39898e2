#pragma once

#include "uzawa/core/price_signal.hpp"
#include "uzawa/tcl/thermal.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace uzawa {

/// One-step transition of the Markov-chain approximation at node j.
struct Transition {
  double up = 0.0;
  double down = 0.0;
  double stay = 1.0;
};

struct HJBOptions {
  /// Split a decision step into equal sub-steps when the validity condition
  /// fails. When false such grids are rejected.
  bool substep = true;
  /// Offer the hold control (zero drift) in addition to OFF and ON.
  bool relaxed = false;
  /// Relative tolerance below which OFF wins a comparison.
  double tie_tolerance = 1e-9;
  /// Nodes re-checked against a direct backup per solve; 0 disables.
  std::size_t dpp_checks = 100;
  std::uint64_t dpp_seed = 0x5eed;
};

/// Sub-step count and length used for a given TCL on a grid.
struct HJBStepping {
  std::size_t substeps = 1;
  double delta = 0.0;
};

HJBStepping hjb_stepping(const TCLParams& params, const TCLGrid& grid, const HJBOptions& options = {});

/// Transition probabilities over one sub-step of length delta with control u.
/// Edge nodes absorb outward moves.
Transition hjb_transition(const TCLParams& params, const TCLGrid& grid, std::size_t node, double u, double delta);

/// Running cost rate per second at (x, u) for energy price p [GBP/MWh] and
/// response price rho [GBP/MWh].
double tcl_stage_rate(const TCLParams& params, double x, double u, double p, double rho) noexcept;

/// Backward dynamic programming on the Markov-chain approximation.
/// `prices` has channels (p, rho) over grid.slots slots.
OnOffPolicy hjb_best_response(const TCLParams& params, const PriceSignal& prices, const TCLGrid& grid,
                              const HJBOptions& options = {});

}  // namespace uzawa
