#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sidesync/netsim/channel.hpp"
#include "sidesync/power_model.hpp"
#include "sidesync/protocol/device.hpp"
#include "sidesync/protocol/roles.hpp"
#include "sidesync/timebase.hpp"

namespace sidesync::netsim {

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SyncMethod { FlexiCoarse, FlexiColdStart, TxBeacon, RxBeacon, Legacy };

std::string to_string(SyncMethod m);
SyncMethod parse_sync_method(std::string_view name);

/// Periods during which the radio serves the primary RAT:
/// [phase + k·period, phase + k·period + length).
struct BusyPattern {
  Duration period{};
  Duration length{};
  Duration phase{};

  void validate() const;
  bool busy_at(SimTime t) const;
  /// True if [start, end) touches a busy period.
  bool overlaps(SimTime start, SimTime end) const;
  bool operator==(const BusyPattern&) const = default;
};

struct DeviceSetup {
  protocol::DeviceConfig config{};
  Position position{};
  std::optional<BusyPattern> busy;

  bool operator==(const DeviceSetup&) const = default;
};

/// Data (or, for beacon methods, resync) demand from src towards dst.
/// The period defaults to t_data, or t_sync for beacon methods.
struct FlowConfig {
  DeviceId src{};
  DeviceId dst{};
  std::optional<Duration> period;
  std::optional<Duration> first_at;  ///< global time of the first arrival
  bool one_shot = false;

  bool operator==(const FlowConfig&) const = default;
};

struct ScenarioConfig {
  std::vector<DeviceSetup> devices;
  std::vector<FlowConfig> flows;
  SyncMethod method = SyncMethod::FlexiCoarse;
  /// Signalling used by flexi_coarse: time_request or slss_only.
  protocol::Handshake coarse_handshake = protocol::Handshake::TimeRequest;
  power::FlexiSyncParams flexi{};
  power::BeaconParams beacon{};
  Drift x_src = Drift::from_ppm(5.0);
  Drift x_dst = Drift::from_ppm(5.0);
  Duration eps_coarse{};
  bool piggyback = false;
  /// Receivers learn the true propagation delay of what they decode.
  bool ranging = false;
  bool dst_identity_known = true;
  double alignment = 0.5;
  Duration data_len = Duration::from_ms(1);
  Duration data_gap = Duration::from_ms(1);
  double comm_range_m = 10'000.0;
  CollisionPolicy collisions = CollisionPolicy::AllLost;
  std::optional<std::uint64_t> max_exchanges;
  bool trace = false;
  bool keep_timeline = false;

  /// Throws ScenarioError.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

struct BuiltDevice {
  DeviceSetup setup;
  protocol::RoleConfig role;
  DriftingClock clock;
};

/// Scenario with every seeded choice made: roles, clocks and flow phases.
struct BuiltScenario {
  std::vector<BuiltDevice> devices;
  ChannelModel channel;
  std::vector<FlowConfig> flows;  ///< period and first_at always set
};

BuiltScenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace sidesync::netsim
