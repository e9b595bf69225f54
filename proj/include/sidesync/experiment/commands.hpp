#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sidesync/experiment/config.hpp"
#include "sidesync/netsim/simulator.hpp"

// The four front-end commands. Each returns its CSV as a string so tests
// can compare it byte for byte; writing it somewhere is the caller's job.
// Columns carry their unit: _ns for time, _w for power, _days for lifetime.
namespace sidesync::experiment {

/// One swept config key. `axis` is a dotted path into the config tree
/// (array elements by index, e.g. devices.1.drift_ppm); the aliases
/// n_attempts, t_data, t_win, t_sync, p_tx and p_rx are accepted.
struct SweepSpec {
  std::string axis;
  std::vector<std::string> values;  ///< JSON scalars or duration strings

  bool operator==(const SweepSpec&) const = default;
};

/// "AXIS=START:STOP:STEPS" (STEPS evenly spaced points, both ends included;
/// START and STOP may carry a time unit) or "AXIS=V1,V2,...". At least two
/// points. Throws ConfigError.
SweepSpec parse_sweep(std::string_view text);

std::string resolve_axis(std::string_view axis);

/// Sets `axis` to `value` in the canonical tree and parses the result, so a
/// swept value goes through the same validation as a config file.
ExperimentConfig apply_sweep_value(const ExperimentConfig& base, const std::string& axis, const std::string& value);

/// Canonical text of the value at `axis` ("500000000000" for t_sync = 500 s).
std::string axis_value(const ExperimentConfig& config, const std::string& axis);

/// CSV column name for an axis: its last path segment with a unit suffix.
std::string axis_header(const std::string& axis);

struct AnalyticRow {
  double p_src = 0.0;
  double p_dst = 0.0;
  double p_rx_beacon = 0.0;
  double p_tx_beacon = 0.0;
  double p_bth = 0.0;
  double battery_legacy_days = 0.0;
  double battery_flexi_days = 0.0;
  double battery_reduction = 0.0;  ///< 1 − flexi/legacy
};

AnalyticRow analytic_row(const ExperimentConfig& config);

/// Closed-form sync power of both ends of a simulated flow, evaluated with
/// the run's realized mean attempt count on the sender side. Absent where
/// no closed form applies (legacy has no sync signalling; the RX beacon
/// listens all the time).
struct FlowAnalytic {
  std::optional<double> src_w;
  std::optional<double> dst_w;
};

FlowAnalytic analytic_sync_power(const netsim::ScenarioConfig& scenario, const netsim::FlowStats& flow);

std::string cmd_analytic(const ExperimentConfig& config, const std::optional<SweepSpec>& sweep);

struct SimulateOptions {
  std::optional<SweepSpec> sweep;
  std::uint32_t runs = 1;  ///< seeds config.seed, config.seed + 1, ...
  std::uint32_t jobs = 1;
  bool trace = false;  ///< only for a single run
};

struct SimulateOutput {
  std::string csv;
  std::string trace;
};

/// Runs every (sweep value, seed) pair on a pool of `jobs` threads; rows
/// come out in sweep order, then seed order. Throws ProtocolViolation from
/// the first failing run in that order.
SimulateOutput cmd_simulate(const ExperimentConfig& config, const SimulateOptions& options);

std::string cmd_battery(const ExperimentConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitViolation = 3;

/// Process exit code for an error escaping a command: config and scenario
/// errors give kExitConfig, protocol violations kExitViolation, anything
/// else kExitError.
int exit_code_for(std::exception_ptr error);

/// fig5, fig6a, fig6b or battery, always from the built-in defaults.
/// Throws ConfigError for any other name.
std::string cmd_reproduce(std::string_view figure);

}  // namespace sidesync::experiment
