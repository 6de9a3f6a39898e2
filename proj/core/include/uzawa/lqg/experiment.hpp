#pragma once

#include "uzawa/core/stats.hpp"
#include "uzawa/core/step_schedule.hpp"
#include "uzawa/lqg/oracles.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace uzawa {

struct BiasVarianceConfig {
  std::vector<std::size_t> populations;
  std::vector<std::size_t> checkpoints;
  std::size_t runs = 200;
  StepSchedule schedule{5.0, 10.0};
  /// Deterministic reference run producing lambda-bar per population.
  StepSchedule reference_schedule{1e4, 1e4};
  std::size_t reference_iterations = 10000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::function<LQGFamily(std::size_t n)> family;
};

/// Statistics over J replicates for one (n, k).
struct BiasVarianceCell {
  std::size_t n = 0;
  std::size_t k = 0;
  Eigen::MatrixXd bias;
  double bias_sq = 0.0;
  double variance = 0.0;
  double error = 0.0;  // variance + bias_sq
};

struct BiasVarianceReport {
  std::vector<std::size_t> populations;
  std::vector<std::size_t> checkpoints;
  std::size_t runs = 0;
  std::vector<PriceSignal> reference;  // lambda-bar per population
  std::vector<BiasVarianceCell> cells; // population-major

  const BiasVarianceCell& cell(std::size_t n_index, std::size_t k_index) const {
    return cells[n_index * checkpoints.size() + k_index];
  }
};

BiasVarianceReport bias_variance_experiment(const BiasVarianceConfig& config);

/// OLS of log10 v against log10 k for one population.
LinearFit variance_slope_vs_iteration(const BiasVarianceReport& report, std::size_t n_index);
/// OLS of log10 v against log10 n at one checkpoint.
LinearFit variance_slope_vs_population(const BiasVarianceReport& report, std::size_t k_index);
/// OLS of log10 |b|^2 against log10 k for one population.
LinearFit bias_slope_vs_iteration(const BiasVarianceReport& report, std::size_t n_index);

/// Writes log_variance_price_x_iteration.csv, log_variance_price_x_population.csv
/// and log_bias_price_x_iteration.csv into `dir`. Returns the file names.
std::vector<std::string> write_report_tables(const BiasVarianceReport& report, const std::filesystem::path& dir);

}  // namespace uzawa
