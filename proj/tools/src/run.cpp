#include "uzawa_cli/commands.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace uzawa::cli {

namespace {

void add_flags(CLI::App& cmd, RunOptions& o, bool with_sigma) {
  cmd.add_option_function<std::string>("--config", [&o](const std::string& v) { o.config = v; }, "Config file");
  cmd.add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t v) { o.seed = v; }, "Master seed");
  cmd.add_option_function<std::size_t>("--iterations", [&o](std::size_t v) { o.iterations = v; }, "Iterations K");
  cmd.add_option_function<std::size_t>("--workers", [&o](std::size_t v) { o.workers = v; }, "Worker threads");
  cmd.add_option_function<std::string>("--out", [&o](const std::string& v) { o.out = v; }, "Output directory");
  cmd.add_option_function<std::string>("--schedule", [&o](const std::string& v) { o.schedule = v; },
                                       "Step schedule, e.g. a=1,b=10");
  if (with_sigma) {
    cmd.add_option_function<std::string>("--sigma", [&o](const std::string& v) { o.sigma = v; },
                                         "Comma separated noise levels");
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Price decomposition of aggregate-coupled stochastic control problems", "uzawa"};
  app.require_subcommand(1);
  RunOptions o;
  for (int i = 0; i < argc; ++i) o.command_line.emplace_back(argv[i]);
  auto* toy = app.add_subcommand("toy", "One-agent quadratic saddle point");
  auto* lqg = app.add_subcommand("lqg", "LQG bias/variance experiment");
  auto* tcl = app.add_subcommand("tcl", "TCL coordination against unit commitment");
  add_flags(*toy, o, false);
  add_flags(*lqg, o, false);
  add_flags(*tcl, o, true);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kConfigError;
  }
  if (toy->parsed()) return cmd_toy(o, out, err);
  if (lqg->parsed()) return cmd_lqg(o, out, err);
  return cmd_tcl(o, out, err);
}

}  // namespace uzawa::cli
