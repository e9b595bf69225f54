#pragma once

// Scenario builders shared by the simulator tests and the acceptance runner.
#include <algorithm>
#include <vector>

#include "sidesync/netsim/scenario.hpp"
#include "support/gen.hpp"

namespace scen {

using namespace sidesync;
using sidesync::netsim::DeviceSetup;
using sidesync::netsim::FlowConfig;
using sidesync::netsim::ScenarioConfig;
using sidesync::netsim::SyncMethod;
using sidesync::protocol::DeviceId;
using sidesync::protocol::Imsi;

inline DeviceSetup device(std::uint32_t id, std::uint64_t imsi, double x, Duration cycle) {
  DeviceSetup d;
  d.config.id = DeviceId{id};
  d.config.imsi = Imsi{imsi};
  d.config.sl_drx_cycle = cycle;
  d.position = {x, 0.0};
  return d;
}

/// Device 1 (SRC) at the origin, device 2 at `distance_m`, one flow 1 → 2.
inline ScenarioConfig pair(SyncMethod method, double distance_m = 100.0) {
  ScenarioConfig c;
  c.method = method;
  c.devices = {device(1, 1001, 0.0, c.flexi.t_data), device(2, 2002, distance_m, c.flexi.t_data)};
  c.flows = {FlowConfig{DeviceId{1}, DeviceId{2}, std::nullopt, std::nullopt, false}};
  return c;
}

inline void set_cycle(ScenarioConfig& c, Duration cycle) {
  for (auto& d : c.devices) d.config.sl_drx_cycle = cycle;
}

/// Both clocks pinned to the same offset and drift: only the propagation
/// delay separates the devices.
inline void equal_clocks(ScenarioConfig& c, Duration offset, Drift drift) {
  for (auto& d : c.devices) {
    d.config.clock.initial_offset = offset;
    d.config.clock.drift = drift;
  }
}

/// A random but valid scenario: any method, a pair of devices up to
/// 1.2 km apart, sometimes a third device and a busy DST. `horizon` is set
/// to a dozen demand periods.
inline ScenarioConfig random_scenario(gen::Gen& g, Duration& horizon) {
  static const std::vector<SyncMethod> methods{SyncMethod::FlexiCoarse, SyncMethod::FlexiColdStart, SyncMethod::TxBeacon,
                                               SyncMethod::RxBeacon, SyncMethod::Legacy};
  auto c = pair(g.pick(methods), g.real(10.0, 1200.0));
  c.flexi.t_data = g.ms(5 * 60'000, 20 * 60'000);
  c.flexi.n_attempts = static_cast<int>(g.integer(1, 4));
  const std::vector<Duration> cycles{c.flexi.t_data, Duration::from_ms(1280), Duration::from_ms(2560), Duration::from_ms(10'240)};
  set_cycle(c, g.pick(cycles));
  c.beacon.t_sync = g.ms(100'000, 500'000);
  c.eps_coarse = g.ns(0, 2'000'000);
  c.x_src = Drift::from_ppm(g.real(0.0, 10.0));
  c.x_dst = Drift::from_ppm(g.real(0.0, 10.0));
  c.piggyback = g.coin();
  c.ranging = g.coin();
  c.coarse_handshake = g.coin() ? protocol::Handshake::TimeRequest : protocol::Handshake::SlssOnly;
  if (g.integer(0, 3) == 0) c.devices.push_back(device(3, static_cast<std::uint64_t>(g.integer(1, 99'999)), g.real(-800.0, 800.0), c.devices[1].config.sl_drx_cycle));
  if (g.integer(0, 3) == 0) c.devices[1].busy = netsim::BusyPattern{Duration::from_s(1), g.ms(1, 500), g.ms(0, 999)};
  const bool beacon = c.method == SyncMethod::TxBeacon || c.method == SyncMethod::RxBeacon;
  horizon = (beacon ? c.beacon.t_sync : c.flexi.t_data) * 12;
  return c;
}

}  // namespace scen
