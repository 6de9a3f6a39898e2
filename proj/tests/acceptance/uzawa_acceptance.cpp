// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
//
//   uzawa_acceptance [--only N[,N...]]

#include "uzawa/core/stats.hpp"
#include "uzawa/dual/estimators.hpp"
#include "uzawa/dual/toy.hpp"
#include "uzawa/dual/uzawa.hpp"
#include "uzawa/lqg/experiment.hpp"
#include "uzawa/lqg/oracles.hpp"
#include "uzawa/tcl/hjb.hpp"
#include "uzawa/tcl/uc.hpp"
#include "uzawa_cli/commands.hpp"

#include "oracles.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace uzawa;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = UZAWA_CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::string* captured = nullptr) {
  std::vector<const char*> argv{"uzawa"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run(int(argv.size()), argv.data(), out, err);
  if (captured) *captured = out.str() + err.str();
  return rc;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "uzawa_acceptance" / name;
  fs::remove_all(p);
  return p;
}

// ---------------------------------------------------------------------------

Outcome toy_saddle_point() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string text;
  const int rc = run_cli({"toy", "--config", (kConfigs / "toy.ini").string()}, &text);
  const double elapsed = seconds_since(t0);

  const auto problem = make_toy_problem(1.0, 0.0);
  UzawaOptions o;
  o.seed = 1;
  o.iterations = 5000;
  const auto trace = stochastic_uzawa(problem, StepSchedule(1.0, 10.0), o);
  const double lambda = trace.final_price(0, 0);
  auto star = PriceSignal::zeros_like(trace.final_price);
  star(0, 0) = -0.5;
  const auto w = estimate_dual_value(problem, star, 10000, 7);
  const bool pass =
      rc == 0 && std::abs(lambda + 0.5) < 0.05 && std::abs(w.mean - 0.25) < 0.01 && elapsed < 1.0;
  return {pass, fmt::format("lambda_K={:.6f} W(lambda*)={:.6f} cmd exit {} in {:.3f}s", lambda, w.mean, rc, elapsed)};
}

struct LQGRun {
  BiasVarianceReport report;
  double seconds = 0.0;
};

const LQGRun& lqg_run() {
  static const LQGRun run = [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto out = scratch("lqg");
    LQGRun r;
    // Fits use the cells the CLI run wrote.
    if (run_cli({"lqg", "--config", (kConfigs / "lqg.ini").string(), "--out", out.string()}) != 0) {
      r.seconds = seconds_since(t0);
      return r;
    }
    BiasVarianceConfig cfg;
    cfg.populations = {10, 100, 1000};
    cfg.checkpoints = {10, 100, 1000};
    for (const auto& row : read_csv(out / "cells.csv")) {
      BiasVarianceCell c;
      c.n = std::stoul(row[0]);
      c.k = std::stoul(row[1]);
      c.bias_sq = std::stod(row[2]);
      c.variance = std::stod(row[3]);
      c.error = std::stod(row[4]);
      r.report.cells.push_back(c);
    }
    r.report.populations = cfg.populations;
    r.report.checkpoints = cfg.checkpoints;
    r.seconds = seconds_since(t0);
    return r;
  }();
  return run;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) lx.push_back(std::log10(x[i])), ly.push_back(std::log10(y[i]));
  return ols(lx, ly).slope;
}

Outcome lqg_variance_vs_iteration() {
  const auto& r = lqg_run();
  if (r.report.cells.size() != 9) return {false, "lqg run failed"};
  std::vector<double> k, v;
  for (std::size_t ki = 0; ki < 3; ++ki) {
    k.push_back(double(r.report.checkpoints[ki]));
    v.push_back(r.report.cell(1, ki).variance);
  }
  const double s = log_slope(k, v);
  return {s >= -1.0 && s <= -0.6 && r.seconds < 300.0,
          fmt::format("slope {:.3f} at n=100, target [-1.0, -0.6]; run {:.0f}s", s, r.seconds)};
}

Outcome lqg_variance_vs_population() {
  const auto& r = lqg_run();
  if (r.report.cells.size() != 9) return {false, "lqg run failed"};
  std::vector<double> n, v;
  for (std::size_t ni = 0; ni < 3; ++ni) {
    n.push_back(double(r.report.populations[ni]));
    v.push_back(r.report.cell(ni, 2).variance);
  }
  const double s = log_slope(n, v);
  return {s >= -1.2 && s <= -0.8 && r.seconds < 600.0,
          fmt::format("slope {:.3f} at k=1000, target [-1.2, -0.8]; run {:.0f}s", s, r.seconds)};
}

Outcome lqg_bias_subdominance() {
  const auto& r = lqg_run();
  if (r.report.cells.size() != 9) return {false, "lqg run failed"};
  bool pass = true;
  std::string detail;
  for (std::size_t ni = 0; ni < 3; ++ni) {
    const auto& c = r.report.cell(ni, 2);
    pass = pass && c.bias_sq < c.variance;
    detail += fmt::format("n={}: bias^2/variance {:.3g}; ", c.n, c.bias_sq / c.variance);
  }
  return {pass, detail + "k=1000"};
}

Outcome gap_scaling() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::vector<double> ns, gaps;
  std::string detail;
  for (std::size_t n : {10u, 100u, 1000u}) {
    LQGFamilyOptions f;  // homogeneous
    const auto problem = make_lqg_problem(make_lqg_family(n, f));
    UzawaOptions o;
    o.iterations = 2000;
    o.keep_trace = false;
    const auto lambda = deterministic_uzawa(problem, StepSchedule(1e4, 1e4), o).final_price;
    GapOptions g;
    g.samples = 2000;
    const auto est = estimate_gap(problem, lambda, 11 + n, g);
    const double bound = f.nu * lqg_max_control_second_moment(problem, lambda) / double(n);
    pass = pass && est.estimate <= bound + 2.0 * est.half_width;
    ns.push_back(double(n));
    gaps.push_back(est.estimate);
    detail += fmt::format("n={}: gap {:.3g} <= {:.3g}; ", n, est.estimate, bound + 2.0 * est.half_width);
  }
  bool positive = true;
  for (double g : gaps) positive = positive && g > 0.0;
  const double slope = positive ? log_slope(ns, gaps) : 0.0;
  const double elapsed = seconds_since(t0);
  pass = pass && positive && slope <= -0.7 && elapsed < 300.0;
  return {pass, detail + fmt::format("slope {:.3f} (<= -0.7) in {:.1f}s", slope, elapsed)};
}

Outcome oracle_suites() {
  const auto t0 = std::chrono::steady_clock::now();
  // (a) Riccati against grid search.
  std::mt19937_64 rng(2024);
  double riccati_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_lqg(rng, 1 + std::size_t(trial % 3));
    PriceSignal lambda({"u"}, inst.lambda.size());
    for (std::size_t t = 0; t < inst.lambda.size(); ++t) lambda(0, t) = inst.lambda[t];
    const auto pol = riccati_unconstrained(inst.agent, lambda);
    std::vector<double> K, k;
    for (std::size_t t = 0; t < inst.lambda.size(); ++t) K.push_back(pol.gain[t](0, 0)), k.push_back(pol.offset[t][0]);
    const double arg = testing::grid_search_first_control(inst.agent, K, k, inst.lambda);
    riccati_err = std::max(riccati_err, std::abs(arg - (K[0] * inst.agent.x0[0] + k[0])));
  }
  // (b) HJB against enumeration.
  const auto c = testing::coarse_tcl();
  HJBOptions ho;
  ho.substep = false;
  auto prices = make_prices(1);
  const auto pol = hjb_best_response(c.params, prices, c.grid, ho);
  std::size_t mismatches = 0;
  for (std::size_t t = 0; t < c.grid.steps; ++t)
    for (std::size_t j = 0; j < c.grid.nodes; ++j) mismatches += pol.at(t, j) != testing::enumerated_mode(c, t, j);
  // (c) QP against active-set enumeration.
  NoiseStream s(77, {StreamTag::Test, 0, 0, 0});
  double qp_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + int(s.index(4));
    const int m = int(s.index(5));
    const auto p = testing::random_qp(s, n, m);
    Eigen::VectorXd x;
    const double ref = testing::active_set_oracle(p, x);
    qp_gap = std::max(qp_gap, std::abs(qp_solve(p).objective - ref));
  }
  const double elapsed = seconds_since(t0);
  return {riccati_err <= 1e-3 && mismatches == 0 && qp_gap <= 1e-6 && elapsed < 60.0,
          fmt::format("(a) max control error {:.2g}; (b) {} of {} nodes differ; (c) max objective gap {:.2g}; {:.2f}s",
                      riccati_err, mismatches, c.grid.steps * c.grid.nodes, qp_gap, elapsed)};
}

Outcome tcl_coordination() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = scratch("tcl");
  std::string text;
  const int rc = run_cli({"tcl", "--config", (kConfigs / "tcl.ini").string(), "--out", out.string()}, &text);
  const double elapsed = seconds_since(t0);
  if (rc != 0) return {false, "tcl run failed: " + text};
  const auto rows = read_csv(out / "costs.csv");
  if (rows.size() != 3) return {false, "expected three scenarios in costs.csv"};
  bool dominance = true, anticorrelated = true, ordered = true;
  std::string detail;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    const double bau = std::stod(r[1]), fs_cost = std::stod(r[2]), saving = std::stod(r[3]), corr = std::stod(r[4]);
    dominance = dominance && fs_cost <= bau;
    anticorrelated = anticorrelated && corr < 0.0;
    ordered = ordered && saving <= prev;
    prev = saving;
    detail += fmt::format("sigma={}: saving {:.3f}% corr {:.3f}; ", r[0], 100.0 * saving, corr);
  }
  const bool pass = dominance && ordered && anticorrelated && elapsed < 1800.0;
  return {pass, detail + fmt::format("(a) {} (b) {} (c) {} in {:.0f}s", dominance ? "ok" : "FS > BAU",
                                     ordered ? "ok" : "saving increases", anticorrelated ? "ok" : "corr >= 0",
                                     elapsed)};
}

Outcome determinism() {
  struct Case {
    std::string command;
    std::string config;
  };
  const std::vector<Case> cases{{"toy", "toy.ini"}, {"lqg", "lqg_minimal.ini"}, {"tcl", "tcl_quick.ini"}};
  bool pass = true;
  std::size_t compared = 0;
  std::string detail;
  for (const auto& c : cases) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (const char* workers : {"1", "4", "8", "1"}) {
      const auto out = scratch(c.command + "_w" + workers + "_" + std::to_string(outputs.size()));
      const int rc = run_cli({c.command, "--config", (kConfigs / c.config).string(), "--seed", "7", "--workers",
                              workers, "--out", out.string()});
      if (rc != 0) {
        pass = false;
        detail += c.command + " failed; ";
        break;
      }
      std::map<std::string, std::string> files;
      for (const auto& e : fs::directory_iterator(out)) {
        if (e.path().extension() == ".csv") files[e.path().filename().string()] = slurp(e.path());
      }
      outputs.push_back(std::move(files));
    }
    for (std::size_t i = 1; i < outputs.size(); ++i) {
      if (outputs[i] != outputs[0]) {
        pass = false;
        detail += c.command + " differs; ";
      }
    }
    if (!outputs.empty()) compared += outputs[0].size();
  }
  return {pass, detail + fmt::format("{} CSV files identical across workers 1, 4, 8 and a repeat", compared)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--only") {
      std::stringstream ss(argv[i + 1]);
      std::string part;
      while (std::getline(ss, part, ',')) only.insert(std::stoi(part));
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"toy saddle point", toy_saddle_point},
      {"LQG variance vs iteration slope", lqg_variance_vs_iteration},
      {"LQG variance vs population slope", lqg_variance_vs_population},
      {"LQG bias subdominance", lqg_bias_subdominance},
      {"epsilon-bound scaling", gap_scaling},
      {"Riccati/HJB/QP oracle suites", oracle_suites},
      {"TCL coordination", tcl_coordination},
      {"determinism across workers", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = int(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("{} {}. {}: {}\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
