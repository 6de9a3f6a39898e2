#pragma once

#include "uzawa/core/step_schedule.hpp"
#include "uzawa/dual/trace.hpp"
#include "uzawa/tcl/oracles.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uzawa {

struct PopulationAverage {
  PriceSignal profile;                // (U, R) per slot [W]
  std::vector<double> discomfort;     // per TCL [GBP]
  double mean_discomfort() const;
};

/// Thermostat hysteresis for every TCL (ON at x_max, OFF at x_min, no
/// response). Agent i uses stream {Evaluation, i, 0, 0} of `seed`.
PopulationAverage bau_baseline(const TCLPopulation& population, const TCLGrid& grid, std::uint64_t seed,
                               std::size_t workers = 1);

/// Population average under the best response to `prices`, with the same
/// per-agent streams as bau_baseline so that both share their noise.
PopulationAverage evaluate_prices(const TCLPopulation& population, const TCLGrid& grid, const PriceSignal& prices,
                                  std::uint64_t seed, const HJBOptions& hjb = {}, std::size_t workers = 1);

enum class InitialPrice { Zero, Marginal };

struct CoordinationConfig {
  TCLPopulationOptions population;
  UCInstance uc = desk_uc_instance();
  TCLGrid grid = TCLGrid::daily(7.6, 0.15, -21.0, -14.0);
  HJBOptions hjb;
  StepSchedule schedule{0.05, 10.0};
  std::size_t samples = 50;      // m
  std::size_t iterations = 75;   // K
  std::size_t evaluation_size = 2000;
  InitialPrice initial_price = InitialPrice::Marginal;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct CoordinationResult {
  double sigma = 0.0;
  PriceSignal initial_price;
  PriceSignal final_price;
  DualTrace trace;
  PopulationAverage flexible;
  PopulationAverage baseline;
  UCResult flexible_uc;
  UCResult baseline_uc;

  double flexible_cost() const noexcept { return flexible_uc.cost; }
  double baseline_cost() const noexcept { return baseline_uc.cost; }
  double saving() const noexcept { return (baseline_cost() - flexible_cost()) / baseline_cost(); }
};

/// Sampled stochastic Uzawa on the TCL population for one volatility, then
/// FS and BAU costs on a freshly drawn evaluation population.
CoordinationResult coordination_experiment(const CoordinationConfig& config, double sigma);

}  // namespace uzawa
