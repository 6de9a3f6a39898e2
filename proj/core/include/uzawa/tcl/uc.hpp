#pragma once

#include "uzawa/core/price_signal.hpp"
#include "uzawa/qp/qp.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace uzawa {

/// Generation technology. Costs in GBP/MWh (c1, c2) and GBP/(MW^2 h) (c3);
/// capacity in MW per slot.
struct Technology {
  std::string name;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  std::vector<double> capacity;
  double headroom = 0.0;  // r
  double slope = 0.0;     // s
  double inertia = 0.0;   // h [s]
};

/// Unit commitment over equal slots. Dispatch quantities are slot-average MW;
/// slot costs are rates times slot_hours.
struct UCInstance {
  std::vector<Technology> technologies;
  std::vector<double> demand;  // inflexible demand [MW]
  double slot_hours = 0.5;
  double population = 2e7;     // TCLs represented in the balance
  double tcl_power = 180.0;    // upper bound on mean per-TCL consumption [W]
  double min_dispatch = 1.0;   // mu
  bool frequency_response = true;
  bool rocof = true;
  bool nadir = false;          // unsupported, rejected by validate()
  double loss = 1800.0;        // Delta G_L [MW]
  double damping = 0.02;       // Lambda [1/Hz]
  double nominal_frequency = 50.0;
  double loss_inertia = 5.0;   // h_L [s]
  double delivery_time = 10.0; // t_d [s]
  double rocof_time = 2.0;     // t_ref [s]
  double qss_limit = 0.5;      // Delta f_qss [Hz]
  double rocof_limit = 0.8;    // Delta f_ref [Hz]

  std::size_t slots() const noexcept { return demand.size(); }
  /// Throws std::invalid_argument on bad data and
  /// CapabilityError when the nadir constraint is requested.
  void validate() const;
  /// MW of aggregate load for a mean per-TCL load in W.
  double tcl_megawatts(double watts) const noexcept { return population * watts * 1e-6; }
  /// GBP paid by one TCL per slot for load `watts` at price [GBP/MWh].
  double pairing_weight() const noexcept { return slot_hours * 1e-6; }
};

/// Desk-scale instance: nuclear, CCGT, OCGT and wind over 48 half-hour slots.
UCInstance desk_uc_instance();

/// Channels (U, R) of a per-TCL aggregate profile in W.
PriceSignal make_profile(std::size_t slots);
/// Channels (p, rho) of a price signal in GBP/MWh.
PriceSignal make_prices(std::size_t slots);

struct Dispatch {
  std::size_t slots = 0;
  std::size_t technologies = 0;
  std::vector<double> commitment;  // slot-major, H in [0, 1]
  std::vector<double> generation;  // MW
  std::vector<double> response;    // MW
  double max_balance_residual = 0.0;  // MW

  double H(std::size_t s, std::size_t j) const { return commitment[s * technologies + j]; }
  double G(std::size_t s, std::size_t j) const { return generation[s * technologies + j]; }
  double R(std::size_t s, std::size_t j) const { return response[s * technologies + j]; }
};

struct UCResult {
  double cost = 0.0;  // GBP over the horizon
  Dispatch dispatch;
};

struct UCResponse {
  PriceSignal profile;      // v(lambda), channels (U, R)
  double objective = 0.0;   // UC cost minus population pairing [GBP]
  Dispatch dispatch;
};

/// Minimum generation cost for a fixed TCL profile (channels U, R in W).
UCResult uc_cost(const UCInstance& uc, const PriceSignal& profile, const QPOptions& options = {});

/// Joint minimization over dispatch and the TCL profile of
/// cost - population * sum_l (p U - rho R) * slot_hours * 1e-6.
/// The system buys response at rho, matching the TCL running cost u p - r rho.
UCResponse aggregate_response(const UCInstance& uc, const PriceSignal& prices, const QPOptions& options = {});

/// Marginal cost of the profile expressed as prices (p, rho) in GBP/MWh,
/// read from the QP multipliers.
PriceSignal uc_marginal_prices(const UCInstance& uc, const PriceSignal& profile, const QPOptions& options = {});

/// QP of one slot with the profile fixed (joint = false) or free (joint = true).
QPProblem uc_slot_qp(const UCInstance& uc, std::size_t slot, double tcl_load_mw, double tcl_response_mw,
                     bool joint = false, double price = 0.0, double rho = 0.0);

}  // namespace uzawa
