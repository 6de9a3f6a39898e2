#include "uzawa_cli/commands.hpp"

#include "artifacts.hpp"

#include "uzawa/core/errors.hpp"
#include "uzawa/core/stats.hpp"
#include "uzawa/dual/estimators.hpp"
#include "uzawa/dual/toy.hpp"
#include "uzawa/dual/trace_io.hpp"
#include "uzawa/dual/uzawa.hpp"
#include "uzawa/lqg/experiment.hpp"
#include "uzawa/lqg/oracles.hpp"
#include "uzawa/tcl/coordination.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

namespace uzawa::cli {

namespace {

Config load_config(const RunOptions& o) {
  return o.config ? Config::load(*o.config) : Config::parse("", "<defaults>");
}

// "a=1,b=10" into two keys of `section`.
void apply_schedule(Config& c, const std::string& section, const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    const auto key = eq == std::string::npos ? part : part.substr(0, eq);
    if (eq == std::string::npos || (key != "a" && key != "b")) {
      throw ConfigError(section, "schedule", 0, "--schedule expects a=<value>,b=<value>, got '" + text + "'");
    }
    c.set(section, key, part.substr(eq + 1));
  }
}

void apply_common(Config& c, const RunOptions& o, const std::string& section) {
  if (o.seed) c.set(section, "seed", std::to_string(*o.seed));
  if (o.workers) c.set(section, "workers", std::to_string(*o.workers));
  if (o.schedule) apply_schedule(c, section, *o.schedule);
}

std::string num(double v) { return format_number(v); }

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error";
    if (!e.section().empty()) err << " [" << e.section() << "]";
    if (!e.key().empty()) err << " " << e.key();
    if (e.line()) err << " (line " << e.line() << ")";
    err << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "invalid setting: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}

}  // namespace

int cmd_toy(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Config c = load_config(options);
    if (options.sigma) throw ConfigError("", "sigma", 0, "--sigma applies to the tcl command only");
    apply_common(c, options, "toy");
    if (options.iterations) c.set("toy", "iterations", std::to_string(*options.iterations));
    c.check_keys("toy", {"target", "noise", "iterations", "seed", "workers", "a", "b", "samples"});

    Settings s(c);
    const double target = s.number("toy", "target", 1.0);
    const double noise = s.number("toy", "noise", 0.0);
    const auto iterations = s.count("toy", "iterations", 5000);
    const auto seed = s.count("toy", "seed", 1);
    const auto workers = s.count("toy", "workers", 1);
    const StepSchedule schedule(s.number("toy", "a", 1.0), s.number("toy", "b", 10.0));
    const auto samples = s.count("toy", "samples", 10000);

    const auto problem = make_toy_problem(target, noise);
    UzawaOptions uo;
    uo.seed = seed;
    uo.iterations = iterations;
    uo.workers = workers;
    const auto trace = stochastic_uzawa(problem, schedule, uo);
    const double lambda = trace.final_price(0, 0);
    const double lambda_star = -target / 2.0;
    const double primal = target * target / 4.0 + noise * noise / 2.0;
    const auto w = estimate_dual_value(problem, trace.final_price, samples, derive_seed(seed, {StreamTag::DualEstimate, 0, 0, 0}),
                                       workers);

    fmt::print(out, "lambda_K = {}\n", num(lambda));
    fmt::print(out, "lambda_star = {}\n", num(lambda_star));
    fmt::print(out, "W(lambda_K) = {} +- {}\n", num(w.mean), num(w.half_width));
    fmt::print(out, "primal_optimum = {}\n", num(primal));

    if (options.out) {
      ArtifactDir dir(*options.out);
      dir.write("config.ini", s.snapshot().canonical());
      std::ostringstream csv;
      csv << "lambda_K,lambda_star,W,W_half_width,primal_optimum\n"
          << num(lambda) << ',' << num(lambda_star) << ',' << num(w.mean) << ',' << num(w.half_width) << ','
          << num(primal) << '\n';
      dir.write("summary.csv", csv.str());
      write_trace_csv(trace, dir.path() / "trace.csv");
      dir.adopt("trace.csv");
      write_trace_metadata(trace, {seed, schedule.a(), schedule.b(), "stochastic", fnv1a64(s.snapshot().canonical())},
                           dir.path() / "trace.json");
      dir.adopt("trace.json");
      dir.finish("toy", options.command_line, s.snapshot(), seed);
    }

    bool ok = true;
    if (!(std::abs(lambda - lambda_star) < 0.05)) {
      fmt::print(err, "lambda_K is {} away from the saddle point\n", num(std::abs(lambda - lambda_star)));
      ok = false;
    }
    if (!(std::abs(w.mean - primal) < 0.01)) {
      fmt::print(err, "dual value {} differs from the primal optimum {}\n", num(w.mean), num(primal));
      ok = false;
    }
    return ok ? kSuccess : kSolverFailure;
  });
}

int cmd_lqg(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Config c = load_config(options);
    if (options.sigma) throw ConfigError("", "sigma", 0, "--sigma applies to the tcl command only");
    c.require_section("experiment");
    c.require_section("schedule");
    if (options.seed) c.set("experiment", "seed", std::to_string(*options.seed));
    if (options.workers) c.set("experiment", "workers", std::to_string(*options.workers));
    if (options.schedule) apply_schedule(c, "schedule", *options.schedule);
    c.check_keys("experiment", {"populations", "checkpoints", "runs", "seed", "workers"});
    c.check_keys("schedule", {"a", "b"});
    c.check_keys("reference", {"a", "b", "iterations"});
    c.check_keys("family", {"horizon", "A", "B", "C", "d", "q", "d_final", "x0", "nu", "ramp_start", "ramp_end",
                            "classes", "heterogeneity"});

    Settings s(c);
    BiasVarianceConfig bv;
    bv.populations.clear();
    for (auto n : s.counts("experiment", "populations", {10, 100})) bv.populations.push_back(std::size_t(n));
    auto checkpoints = s.counts("experiment", "checkpoints", {10, 100, 1000});
    if (options.iterations) {
      const auto k = std::uint64_t(*options.iterations);
      std::erase_if(checkpoints, [&](auto x) { return x >= k; });
      checkpoints.push_back(k);
    }
    bv.checkpoints.assign(checkpoints.begin(), checkpoints.end());
    bv.runs = s.count("experiment", "runs", 200);
    bv.seed = s.count("experiment", "seed", 1);
    bv.workers = s.count("experiment", "workers", 1);
    bv.schedule = StepSchedule(s.number("schedule", "a", 5.0), s.number("schedule", "b", 10.0));
    bv.reference_schedule = StepSchedule(s.number("reference", "a", 1e4), s.number("reference", "b", 1e4));
    bv.reference_iterations = s.count("reference", "iterations", 10000);

    LQGFamilyOptions f;
    f.horizon = s.count("family", "horizon", f.horizon);
    f.A = s.number("family", "A", f.A);
    f.B = s.number("family", "B", f.B);
    f.C = s.number("family", "C", f.C);
    f.d = s.number("family", "d", f.d);
    f.q = s.number("family", "q", f.q);
    f.d_final = s.number("family", "d_final", f.d_final);
    f.x0 = s.number("family", "x0", f.x0);
    f.nu = s.number("family", "nu", f.nu);
    f.ramp_start = s.number("family", "ramp_start", f.ramp_start);
    f.ramp_end = s.number("family", "ramp_end", f.ramp_end);
    f.classes = s.count("family", "classes", f.classes);
    f.heterogeneity = s.number("family", "heterogeneity", f.heterogeneity);
    bv.family = [f](std::size_t n) { return make_lqg_family(n, f); };

    const auto report = bias_variance_experiment(bv);

    std::ostringstream cells, summary;
    cells << "n,k,bias_sq,variance,error\n";
    for (std::size_t ni = 0; ni < report.populations.size(); ++ni) {
      for (std::size_t ki = 0; ki < report.checkpoints.size(); ++ki) {
        const auto& cell = report.cell(ni, ki);
        cells << cell.n << ',' << cell.k << ',' << num(cell.bias_sq) << ',' << num(cell.variance) << ','
              << num(cell.error) << '\n';
      }
    }
    summary << "fit,fixed,slope,intercept\n";
    if (report.checkpoints.size() >= 2) {
      for (std::size_t ni = 0; ni < report.populations.size(); ++ni) {
        const auto v = variance_slope_vs_iteration(report, ni);
        const auto b = bias_slope_vs_iteration(report, ni);
        summary << "variance_vs_iteration,n=" << report.populations[ni] << ',' << num(v.slope) << ','
                << num(v.intercept) << '\n';
        summary << "bias_sq_vs_iteration,n=" << report.populations[ni] << ',' << num(b.slope) << ','
                << num(b.intercept) << '\n';
        fmt::print(out, "n={}: variance slope vs k {:.3f}, bias^2 slope vs k {:.3f}\n", report.populations[ni],
                   v.slope, b.slope);
      }
    }
    if (report.populations.size() >= 2) {
      for (std::size_t ki = 0; ki < report.checkpoints.size(); ++ki) {
        const auto v = variance_slope_vs_population(report, ki);
        summary << "variance_vs_population,k=" << report.checkpoints[ki] << ',' << num(v.slope) << ','
                << num(v.intercept) << '\n';
        fmt::print(out, "k={}: variance slope vs n {:.3f}\n", report.checkpoints[ki], v.slope);
      }
    }

    if (options.out) {
      ArtifactDir dir(*options.out);
      dir.write("config.ini", s.snapshot().canonical());
      for (const auto& name : write_report_tables(report, dir.path())) dir.adopt(name);
      dir.write("cells.csv", cells.str());
      dir.write("summary.csv", summary.str());
      dir.finish("lqg", options.command_line, s.snapshot(), bv.seed);
    }
    return kSuccess;
  });
}

namespace {

CoordinationConfig read_tcl(Settings& s, std::vector<double>& sigmas) {
  CoordinationConfig cfg;
  auto& pop = cfg.population;
  auto& b = pop.base;
  pop.size = s.count("population", "size", pop.size);
  pop.classes = s.count("population", "classes", pop.classes);
  pop.gamma_spread = s.number("population", "gamma_spread", pop.gamma_spread);
  b.gamma = s.number("population", "gamma", b.gamma);
  b.x_off = s.number("population", "x_off", b.x_off);
  b.zeta = s.number("population", "zeta", b.zeta);
  b.p_on = s.number("population", "p_on", b.p_on);
  b.alpha = s.number("population", "alpha", b.alpha);
  b.beta = s.number("population", "beta", b.beta);
  b.x_target = s.number("population", "x_target", b.x_target);
  b.x_min = s.number("population", "x_min", b.x_min);
  b.x_max = s.number("population", "x_max", b.x_max);
  b.terminal_weight = s.number("population", "terminal_weight", b.terminal_weight);
  cfg.evaluation_size = s.count("population", "evaluation_size", cfg.evaluation_size);

  auto& uc = cfg.uc;
  uc.population = s.number("uc", "population", uc.population);
  uc.tcl_power = s.number("uc", "tcl_power", uc.tcl_power);
  uc.min_dispatch = s.number("uc", "min_dispatch", uc.min_dispatch);
  uc.frequency_response = s.flag("uc", "frequency_response", uc.frequency_response);
  uc.rocof = s.flag("uc", "rocof", uc.rocof);
  uc.nadir = s.flag("uc", "nadir", uc.nadir);
  if (uc.nadir) throw ConfigError("uc", "nadir", 0, "the frequency-nadir constraint is not supported");
  uc.loss = s.number("uc", "loss", uc.loss);
  uc.damping = s.number("uc", "damping", uc.damping);
  uc.nominal_frequency = s.number("uc", "nominal_frequency", uc.nominal_frequency);
  uc.loss_inertia = s.number("uc", "loss_inertia", uc.loss_inertia);
  uc.delivery_time = s.number("uc", "delivery_time", uc.delivery_time);
  uc.rocof_time = s.number("uc", "rocof_time", uc.rocof_time);
  uc.qss_limit = s.number("uc", "qss_limit", uc.qss_limit);
  uc.rocof_limit = s.number("uc", "rocof_limit", uc.rocof_limit);
  const double demand_scale = s.number("uc", "demand_scale", 1.0);
  for (auto& d : uc.demand) d *= demand_scale;
  uc.validate();

  const double dt = s.number("grid", "dt", 7.6);
  const double dx = s.number("grid", "dx", 0.15);
  const double margin = s.number("grid", "margin", 3.0);
  cfg.grid = TCLGrid::daily(dt, dx, b.x_min, b.x_max, margin, 86400.0, uc.slots());

  cfg.schedule = StepSchedule(s.number("algorithm", "a", cfg.schedule.a()), s.number("algorithm", "b", cfg.schedule.b()));
  cfg.samples = s.count("algorithm", "samples", cfg.samples);
  cfg.iterations = s.count("algorithm", "iterations", cfg.iterations);
  cfg.seed = s.count("algorithm", "seed", cfg.seed);
  cfg.workers = s.count("algorithm", "workers", cfg.workers);
  const auto start = s.text("algorithm", "initial_price", "marginal");
  if (start == "marginal") cfg.initial_price = InitialPrice::Marginal;
  else if (start == "zero") cfg.initial_price = InitialPrice::Zero;
  else throw ConfigError("algorithm", "initial_price", 0, "initial_price must be 'zero' or 'marginal'");
  cfg.hjb.relaxed = s.flag("algorithm", "relaxed", cfg.hjb.relaxed);
  cfg.hjb.substep = s.flag("algorithm", "substep", cfg.hjb.substep);
  cfg.hjb.dpp_checks = s.count("algorithm", "dpp_checks", cfg.hjb.dpp_checks);
  sigmas = s.numbers("algorithm", "sigma", {0.0, 1.0, 2.0});
  if (sigmas.empty()) throw ConfigError("algorithm", "sigma", 0, "sigma list is empty");
  for (double v : sigmas) {
    if (!(v >= 0.0)) throw ConfigError("algorithm", "sigma", 0, "sigma values must be nonnegative");
  }
  return cfg;
}

void dispatch_rows(std::ostream& csv, const std::string& sigma, const char* run, const UCInstance& uc,
                   const Dispatch& d) {
  for (std::size_t l = 0; l < d.slots; ++l) {
    for (std::size_t j = 0; j < d.technologies; ++j) {
      csv << sigma << ',' << run << ',' << l << ',' << uc.technologies[j].name << ',' << num(d.H(l, j)) << ','
          << num(d.G(l, j)) << ',' << num(d.R(l, j)) << '\n';
    }
  }
}

}  // namespace

int cmd_tcl(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Config c = load_config(options);
    apply_common(c, options, "algorithm");
    if (options.iterations) c.set("algorithm", "iterations", std::to_string(*options.iterations));
    if (options.sigma) c.set("algorithm", "sigma", *options.sigma);
    c.check_keys("population", {"size", "classes", "gamma_spread", "gamma", "x_off", "zeta", "p_on", "alpha", "beta",
                                "x_target", "x_min", "x_max", "terminal_weight", "evaluation_size"});
    c.check_keys("uc", {"population", "tcl_power", "min_dispatch", "frequency_response", "rocof", "nadir", "loss",
                        "damping", "nominal_frequency", "loss_inertia", "delivery_time", "rocof_time", "qss_limit",
                        "rocof_limit", "demand_scale"});
    c.check_keys("grid", {"dt", "dx", "margin"});
    c.check_keys("algorithm", {"a", "b", "samples", "iterations", "seed", "workers", "initial_price", "relaxed",
                               "substep", "dpp_checks", "sigma"});

    Settings s(c);
    std::vector<double> sigmas;
    const auto cfg = read_tcl(s, sigmas);

    std::ostringstream prices, aggregate, dispatch, costs;
    prices << "sigma,k,slot,p,rho\n";
    aggregate << "sigma,slot,U,R,U_bau\n";
    dispatch << "sigma,run,slot,technology,H,G,R\n";
    costs << "sigma,bau_cost,fs_cost,saving,price_consumption_correlation,bau_discomfort,fs_discomfort\n";

    for (double sigma : sigmas) {
      const auto r = coordination_experiment(cfg, sigma);
      const auto sg = num(sigma);
      bool final_written = false;
      for (const auto& it : r.trace.iterates) {
        final_written = final_written || it.k == r.trace.iterations;
        for (std::size_t l = 0; l < it.lambda.slot_count(); ++l) {
          prices << sg << ',' << it.k << ',' << l << ',' << num(it.lambda(0, l)) << ',' << num(it.lambda(1, l)) << '\n';
        }
      }
      if (!final_written) {
        for (std::size_t l = 0; l < r.final_price.slot_count(); ++l) {
          prices << sg << ',' << r.trace.iterations << ',' << l << ',' << num(r.final_price(0, l)) << ','
                 << num(r.final_price(1, l)) << '\n';
        }
      }
      const auto& fs = r.flexible.profile;
      std::vector<double> p(fs.slot_count()), u(fs.slot_count());
      for (std::size_t l = 0; l < fs.slot_count(); ++l) {
        aggregate << sg << ',' << l << ',' << num(fs(0, l)) << ',' << num(fs(1, l)) << ','
                  << num(r.baseline.profile(0, l)) << '\n';
        p[l] = r.final_price(0, l);
        u[l] = fs(0, l);
      }
      dispatch_rows(dispatch, sg, "fs", cfg.uc, r.flexible_uc.dispatch);
      dispatch_rows(dispatch, sg, "bau", cfg.uc, r.baseline_uc.dispatch);
      const double corr = pearson(p, u);
      costs << sg << ',' << num(r.baseline_cost()) << ',' << num(r.flexible_cost()) << ',' << num(r.saving()) << ','
            << num(corr) << ',' << num(r.baseline.mean_discomfort()) << ',' << num(r.flexible.mean_discomfort())
            << '\n';
      fmt::print(out, "sigma={}: BAU {:.6g} GBP, FS {:.6g} GBP, saving {:.3f}%, corr(p, U) {:.3f}\n", sg,
                 r.baseline_cost(), r.flexible_cost(), 100.0 * r.saving(), corr);
    }

    if (options.out) {
      ArtifactDir dir(*options.out);
      dir.write("config.ini", s.snapshot().canonical());
      dir.write("prices.csv", prices.str());
      dir.write("aggregate.csv", aggregate.str());
      dir.write("dispatch.csv", dispatch.str());
      dir.write("costs.csv", costs.str());
      dir.finish("tcl", options.command_line, s.snapshot(), cfg.seed);
    }
    return kSuccess;
  });
}

}  // namespace uzawa::cli
