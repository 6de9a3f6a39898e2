#pragma once

#include "uzawa/core/noise_stream.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace uzawa {

/// One thermostatically controlled load (a fridge).
///
/// dX = -(X - x_off + zeta u) / gamma dt + sigma dW with u in {0, p_on}.
/// Units: gamma [s], temperatures [degC], zeta [degC/W], p_on [W],
/// sigma [degC / sqrt(day)], alpha [GBP / (h degC^2)], beta [GBP / (s degC^2)],
/// terminal_weight [GBP / degC^2].
struct TCLParams {
  double gamma = 200000.0;
  double x_off = 20.0;
  double zeta = 0.6;
  double sigma = 0.0;
  double p_on = 180.0;
  double alpha = 0.2e-4;
  double beta = 50.0;
  double x_target = -17.5;
  double x_min = -21.0;
  double x_max = -14.0;
  double terminal_weight = 0.01;
  double x0 = -17.5;

  /// Throws std::invalid_argument unless gamma > 0, zeta > 0, sigma >= 0,
  /// x_min < x_target < x_max, p_on > 0 and all weights >= 0.
  void validate() const;

  double sigma_per_sqrt_s() const noexcept { return sigma / 293.93876913398137; }
  double alpha_per_s() const noexcept { return alpha / 3600.0; }
  double drift(double x, double u) const noexcept { return -(x - x_off + zeta * u) / gamma; }
  /// Comfort and band penalty per second.
  double discomfort_rate(double x) const noexcept;
  /// Fraction of consumption offered as response, clamped to [0, 1].
  double response_fraction(double x) const noexcept;
  double terminal_cost(double x) const noexcept { return terminal_weight * (x - x_target) * (x - x_target); }
  /// Control that holds the temperature still, clamped to [0, p_on].
  double hold_control(double x) const noexcept;
};

/// Joules per MWh: converts W * s * (GBP/MWh) into GBP.
inline constexpr double kJoulesPerMWh = 3.6e9;

/// Decision grid of the HJB solver and simulator.
struct TCLGrid {
  double dt = 1800.0 / 237.0;  // decision step [s]
  std::size_t steps = 11376;
  std::size_t slots = 48;
  double x_lo = -24.0;         // first temperature node
  double dx = 0.15;
  std::size_t nodes = 88;

  /// Daily grid: dt adjusted so each of `slots` slots holds a whole number of
  /// steps, nodes covering [x_min - margin, x_max + margin].
  static TCLGrid daily(double dt_target, double dx, double x_min, double x_max, double margin = 3.0,
                       double horizon_s = 86400.0, std::size_t slots = 48);

  void validate() const;
  std::size_t steps_per_slot() const noexcept { return steps / slots; }
  double slot_seconds() const noexcept { return dt * double(steps_per_slot()); }
  double slot_hours() const noexcept { return slot_seconds() / 3600.0; }
  double node(std::size_t j) const noexcept { return x_lo + dx * double(j); }
  double x_hi() const noexcept { return node(nodes - 1); }
  std::size_t nearest(double x) const noexcept;
};

enum class Mode : std::uint8_t { Off = 0, On = 1, Hold = 2 };

/// Decision table over (step, node) plus the value at t = 0.
class OnOffPolicy {
 public:
  OnOffPolicy() = default;
  OnOffPolicy(std::size_t steps, std::size_t nodes) : steps_(steps), nodes_(nodes), table_(steps * nodes, 0) {}

  Mode at(std::size_t step, std::size_t node) const noexcept { return Mode(table_[step * nodes_ + node]); }
  void set(std::size_t step, std::size_t node, Mode m) noexcept { table_[step * nodes_ + node] = std::uint8_t(m); }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t nodes() const noexcept { return nodes_; }

  std::vector<double>& initial_value() noexcept { return v0_; }
  const std::vector<double>& initial_value() const noexcept { return v0_; }

 private:
  std::size_t steps_ = 0;
  std::size_t nodes_ = 0;
  std::vector<std::uint8_t> table_;
  std::vector<double> v0_;
};

/// Per-slot means of one simulated path.
struct TCLPath {
  std::vector<double> temperature;  // steps + 1 values, filled only when requested
  std::vector<double> control;      // steps values, filled only when requested
  std::vector<double> response;     // steps values, filled only when requested
  std::vector<double> slot_power;   // mean consumption per slot [W]
  std::vector<double> slot_response;  // mean offered response per slot [W]
  double discomfort = 0.0;          // integrated discomfort plus terminal cost [GBP]
};

/// Euler-Maruyama path under a policy with nearest-node lookup. One Gaussian
/// is drawn per step when sigma > 0.
void simulate_tcl(const TCLParams& params, const OnOffPolicy& policy, const TCLGrid& grid, NoiseStream& stream,
                  TCLPath& out, bool keep_paths = false);

/// Thermostat hysteresis: ON once x >= x_on, OFF once x <= x_off_threshold.
/// The initial mode is OFF when x0 < x_on. Response is zero.
void simulate_hysteresis(const TCLParams& params, const TCLGrid& grid, double x_on, double x_off_threshold,
                         NoiseStream& stream, TCLPath& out, bool keep_paths = false);

}  // namespace uzawa
