#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sidesync/netsim/scenario.hpp"
#include "sidesync/power_model.hpp"

// Experiment configuration: one JSON object. Every key is optional; an
// empty object selects the evaluation defaults. Durations are integer
// nanoseconds or strings with a unit ("72ms", "4.69us", "2h"); powers are
// watts. Unknown keys are rejected.
namespace sidesync::experiment {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// The baseline draw is calibrated once, so that a battery of
/// reference_capacity_wh lasts baseline_days; other capacities scale both
/// lifetimes alike.
struct BatterySection {
  double capacity_wh = 5.0;
  double reference_capacity_wh = 5.0;
  double baseline_days = power::kLegacyBatteryDays;
  int n_attempts = 4;

  power::BatteryModel model() const;

  bool operator==(const BatterySection&) const = default;
};

struct ExperimentConfig {
  netsim::ScenarioConfig scenario;
  /// Default radio; devices without their own radio section use it.
  power::RadioPowerProfile radio{};
  /// TX-beacon window follows optimal_window(t_sync) instead of beacon.t_win.
  bool beacon_optimal_window = true;
  BatterySection battery{};
  std::uint64_t seed = 1;
  std::optional<Duration> horizon;

  /// Beacon parameters with the window resolved.
  power::BeaconParams effective_beacon() const;
  /// Horizon if set, else 100 flow periods.
  Duration effective_horizon() const;
  /// Scenario ready for netsim::run.
  netsim::ScenarioConfig resolved_scenario() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses "<number><unit>" with unit ns|us|ms|s|min|h; the value must be a
/// whole number of nanoseconds. Throws std::invalid_argument.
Duration parse_duration_text(std::string_view text);

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical form: sorted keys, durations in ns, defaults written out,
/// device fields that equal the global default omitted.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace sidesync::experiment
