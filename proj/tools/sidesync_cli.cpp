// sidesync: analytic sweeps, simulations, battery report and figure data.
// Exit codes: 0 ok, 2 bad config or arguments, 3 protocol violation, 1 other.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sidesync/experiment/commands.hpp"

namespace ex = sidesync::experiment;

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ex::ConfigError("out", "cannot write '" + path + "'");
  out << text;
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string horizon;
  std::string out;
  std::string sweep;

  ex::ExperimentConfig load() const {
    auto c = config.empty() ? ex::parse_config("{}") : ex::load_config(config);
    if (seed) c.seed = *seed;
    if (!horizon.empty()) {
      try {
        c.horizon = ex::parse_duration_text(horizon);
      } catch (const std::invalid_argument& e) {
        throw ex::ConfigError("horizon", e.what());
      }
      if (*c.horizon <= sidesync::Duration::zero()) throw ex::ConfigError("horizon", "must be positive");
    }
    return c;
  }

  std::optional<ex::SweepSpec> sweep_spec() const {
    if (sweep.empty()) return std::nullopt;
    return ex::parse_sweep(sweep);
  }
};

void add_common(CLI::App* cmd, Common& o, bool with_sweep) {
  cmd->add_option("--config", o.config, "JSON config file (default: built-in defaults)");
  cmd->add_option("--seed", o.seed, "override the config seed");
  cmd->add_option("--horizon", o.horizon, "override the horizon, e.g. 200h");
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  if (with_sweep) cmd->add_option("--sweep", o.sweep, "AXIS=START:STOP:STEPS or AXIS=V1,V2,...");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sidelink sync power model and simulator"};
  app.require_subcommand(1);

  Common analytic_opts, simulate_opts, battery_opts;
  auto* analytic = app.add_subcommand("analytic", "closed-form power and battery figures");
  add_common(analytic, analytic_opts, true);

  auto* simulate = app.add_subcommand("simulate", "run the discrete-event simulator");
  add_common(simulate, simulate_opts, true);
  std::string trace_path;
  std::uint32_t runs = 1;
  std::uint32_t jobs = 1;
  simulate->add_option("--trace", trace_path, "write the event trace of a single run here");
  simulate->add_option("--runs", runs, "consecutive seeds per sweep point")->check(CLI::PositiveNumber);
  simulate->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* battery = app.add_subcommand("battery", "battery life with and without sync overhead");
  add_common(battery, battery_opts, false);

  auto* reproduce = app.add_subcommand("reproduce", "figure data from built-in defaults");
  std::string figure;
  std::string reproduce_out;
  reproduce->add_option("--figure", figure, "fig5, fig6a, fig6b or battery")->required();
  reproduce->add_option("--out", reproduce_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ex::kExitOk : ex::kExitConfig;
  }

  try {
    if (analytic->parsed()) {
      emit(ex::cmd_analytic(analytic_opts.load(), analytic_opts.sweep_spec()), analytic_opts.out);
    } else if (simulate->parsed()) {
      ex::SimulateOptions o;
      o.sweep = simulate_opts.sweep_spec();
      o.runs = runs;
      o.jobs = jobs;
      o.trace = !trace_path.empty();
      const auto result = ex::cmd_simulate(simulate_opts.load(), o);
      emit(result.csv, simulate_opts.out);
      if (o.trace) emit(result.trace, trace_path);
    } else if (battery->parsed()) {
      emit(ex::cmd_battery(battery_opts.load()), battery_opts.out);
    } else if (reproduce->parsed()) {
      emit(ex::cmd_reproduce(figure), reproduce_out);
    }
  } catch (const std::exception& e) {
    const int code = ex::exit_code_for(std::current_exception());
    const char* what = code == ex::kExitConfig      ? "config error"
                       : code == ex::kExitViolation ? "protocol violation"
                                                    : "error";
    std::cerr << what << ": " << e.what() << "\n";
    return code;
  }
  return ex::kExitOk;
}
