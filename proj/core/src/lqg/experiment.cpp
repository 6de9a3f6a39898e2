#include "uzawa/lqg/experiment.hpp"

#include "uzawa/core/executor.hpp"
#include "uzawa/dual/trace_io.hpp"
#include "uzawa/dual/uzawa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace uzawa {

BiasVarianceReport bias_variance_experiment(const BiasVarianceConfig& cfg) {
  if (cfg.populations.empty() || cfg.checkpoints.empty()) throw std::invalid_argument("bias/variance: empty grid");
  if (cfg.runs == 0) throw std::invalid_argument("bias/variance: need at least one run");
  if (!cfg.family) throw std::invalid_argument("bias/variance: no instance family");
  if (!std::is_sorted(cfg.checkpoints.begin(), cfg.checkpoints.end())) {
    throw std::invalid_argument("bias/variance: checkpoints must be increasing");
  }
  const std::size_t K = cfg.checkpoints.back();
  const std::size_t nk = cfg.checkpoints.size();

  BiasVarianceReport rep;
  rep.populations = cfg.populations;
  rep.checkpoints = cfg.checkpoints;
  rep.runs = cfg.runs;
  Executor ex(cfg.workers);

  for (std::size_t ni = 0; ni < cfg.populations.size(); ++ni) {
    const std::size_t n = cfg.populations[ni];
    const ProblemInstance problem = make_lqg_problem(cfg.family(n));

    UzawaOptions ref_opt;
    ref_opt.iterations = cfg.reference_iterations;
    ref_opt.keep_trace = false;
    const PriceSignal reference = deterministic_uzawa(problem, cfg.reference_schedule, ref_opt).final_price;
    rep.reference.push_back(reference);

    // prices[j][c]: replicate j at checkpoint c
    std::vector<std::vector<Eigen::MatrixXd>> prices(cfg.runs, std::vector<Eigen::MatrixXd>(nk));
    ex.for_each(cfg.runs, [&](std::size_t j) {
      UzawaOptions opt;
      opt.iterations = K;
      opt.keep_trace = false;
      opt.seed = derive_seed(cfg.seed, {StreamTag::Replicate, j, ni, 0});
      std::size_t next = 0;
      opt.on_price = [&](std::size_t k, const PriceSignal& lambda) {
        while (next < nk && cfg.checkpoints[next] == k) prices[j][next++] = lambda.values();
      };
      try {
        stochastic_uzawa(problem, cfg.schedule, opt);
      } catch (const std::exception& e) {
        throw std::runtime_error("replicate " + std::to_string(j) + " (n=" + std::to_string(n) + "): " + e.what());
      }
    });

    for (std::size_t c = 0; c < nk; ++c) {
      BiasVarianceCell cell;
      cell.n = n;
      cell.k = cfg.checkpoints[c];
      Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(reference.values().rows(), reference.values().cols());
      for (std::size_t j = 0; j < cfg.runs; ++j) mean += prices[j][c];
      mean /= double(cfg.runs);
      cell.bias = mean - reference.values();
      double var = 0.0;
      for (std::size_t j = 0; j < cfg.runs; ++j) var += (prices[j][c] - reference.values() - cell.bias).squaredNorm();
      cell.variance = var / double(cfg.runs);
      cell.bias_sq = cell.bias.squaredNorm();
      cell.error = cell.variance + cell.bias_sq;
      rep.cells.push_back(std::move(cell));
    }
  }
  return rep;
}

namespace {

LinearFit log_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log10(x[i]));
    ly.push_back(std::log10(y[i]));
  }
  return ols(lx, ly);
}

}  // namespace

LinearFit variance_slope_vs_iteration(const BiasVarianceReport& r, std::size_t ni) {
  std::vector<double> x, y;
  for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
    x.push_back(double(r.checkpoints[c]));
    y.push_back(r.cell(ni, c).variance);
  }
  return log_fit(x, y);
}

LinearFit variance_slope_vs_population(const BiasVarianceReport& r, std::size_t ki) {
  std::vector<double> x, y;
  for (std::size_t ni = 0; ni < r.populations.size(); ++ni) {
    x.push_back(double(r.populations[ni]));
    y.push_back(r.cell(ni, ki).variance);
  }
  return log_fit(x, y);
}

LinearFit bias_slope_vs_iteration(const BiasVarianceReport& r, std::size_t ni) {
  std::vector<double> x, y;
  for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
    x.push_back(double(r.checkpoints[c]));
    y.push_back(r.cell(ni, c).bias_sq);
  }
  return log_fit(x, y);
}

std::vector<std::string> write_report_tables(const BiasVarianceReport& r, const std::filesystem::path& dir) {
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  const std::string f1 = "log_variance_price_x_iteration.csv";
  const std::string f2 = "log_variance_price_x_population.csv";
  const std::string f3 = "log_bias_price_x_iteration.csv";
  {
    auto out = open(f1);
    out << "log10_k";
    for (auto n : r.populations) out << ",n=" << n;
    out << '\n';
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
      out << format_number(std::log10(double(r.checkpoints[c])));
      for (std::size_t ni = 0; ni < r.populations.size(); ++ni) out << ',' << format_number(std::log10(r.cell(ni, c).variance));
      out << '\n';
    }
  }
  {
    auto out = open(f2);
    out << "log10_n";
    for (auto k : r.checkpoints) out << ",k=" << k;
    out << '\n';
    for (std::size_t ni = 0; ni < r.populations.size(); ++ni) {
      out << format_number(std::log10(double(r.populations[ni])));
      for (std::size_t c = 0; c < r.checkpoints.size(); ++c) out << ',' << format_number(std::log10(r.cell(ni, c).variance));
      out << '\n';
    }
  }
  {
    auto out = open(f3);
    out << "log10_k";
    for (auto n : r.populations) out << ",n=" << n;
    out << '\n';
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
      out << format_number(std::log10(double(r.checkpoints[c])));
      for (std::size_t ni = 0; ni < r.populations.size(); ++ni) out << ',' << format_number(std::log10(r.cell(ni, c).bias_sq));
      out << '\n';
    }
  }
  return {f1, f2, f3};
}

}  // namespace uzawa
