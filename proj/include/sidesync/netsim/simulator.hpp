#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sidesync/netsim/energy.hpp"
#include "sidesync/netsim/scenario.hpp"
#include "sidesync/protocol/roles.hpp"

namespace sidesync::netsim {

struct FlowStats {
  DeviceId src{};
  DeviceId dst{};
  std::uint64_t data_generated = 0;
  std::uint64_t data_sent = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t data_dropped = 0;  ///< given up by the sender
  std::uint64_t data_missed = 0;   ///< expected by the receiver but not decoded
  std::uint64_t sync_successes = 0;
  std::uint64_t sync_failures = 0;
  std::uint64_t fast_paths = 0;
  std::vector<int> attempts;  ///< realized attempts per successful sync

  double mean_attempts() const;
  int max_attempts() const;
  /// Any failed sweep, or data sent but not decoded.
  bool sync_failure() const;
};

struct DeviceSummary {
  DeviceId id{};
  protocol::Imsi imsi{};
  protocol::Role role = protocol::Role::FlexiDst;
  power::RadioPowerProfile radio{};
  DriftingClock final_clock{};
  EnergyReport energy;
};

/// |local_device − local_peer| right after a sync, at global time `at`.
struct SyncSample {
  SimTime at{};
  DeviceId device{};
  DeviceId peer{};
  Duration delta{};
};

struct Counters {
  std::uint64_t events = 0;
  std::uint64_t transmissions = 0;
  std::uint64_t deliveries = 0;  ///< decoded receptions handed to a protocol
  std::uint64_t collisions = 0;
  std::uint64_t half_duplex_losses = 0;
  std::uint64_t busy_losses = 0;
  std::uint64_t busy_suppressed = 0;  ///< transmissions dropped for the primary RAT
  std::uint64_t misaligned = 0;       ///< data arriving outside the receiver's cyclic prefix
  std::uint64_t false_alarms_rejected = 0;
  std::uint64_t accepted_mismatches = 0;  ///< addressed SLSS acted on by someone else
};

struct RunResult {
  std::uint64_t seed = 0;
  Duration horizon{};
  std::vector<FlowStats> flows;
  std::vector<DeviceSummary> devices;
  std::vector<SyncSample> delta_sync;
  Counters counters;
  std::vector<std::string> trace;  ///< "time_ns,device,event,details", only when tracing

  const DeviceSummary& device(DeviceId id) const;
  double average_power(DeviceId id, PowerComponent component = PowerComponent::Total) const;
};

/// Simulates every device's role and the shared channel over [0, horizon).
/// Deterministic in (scenario, seed). Throws ScenarioError for invalid
/// input and protocol::ProtocolViolation, with time and device context,
/// when a role rejects an event.
RunResult run(const ScenarioConfig& scenario, std::uint64_t seed, Duration horizon);

}  // namespace sidesync::netsim
