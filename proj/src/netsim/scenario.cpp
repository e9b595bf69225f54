#include "sidesync/netsim/scenario.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace sidesync::netsim {

using protocol::DeviceId;
using protocol::Handshake;
using protocol::raw;

namespace {

std::string id_str(DeviceId id) { return std::to_string(raw(id)); }

enum class Side { None, Src, Dst };

struct RoleMap {
  std::map<DeviceId, Side> side;
  std::map<DeviceId, DeviceId> target;  // src -> dst
};

RoleMap assign_sides(const ScenarioConfig& c) {
  RoleMap m;
  for (const auto& d : c.devices) m.side[d.config.id] = Side::None;
  for (const auto& f : c.flows) {
    if (!m.side.count(f.src)) throw ScenarioError("flow source " + id_str(f.src) + " is not a device");
    if (!m.side.count(f.dst)) throw ScenarioError("flow destination " + id_str(f.dst) + " is not a device");
    if (f.src == f.dst) throw ScenarioError("flow from device " + id_str(f.src) + " to itself");
    if (m.side[f.src] == Side::Dst || m.side[f.dst] == Side::Src) {
      throw ScenarioError("device used both as flow source and destination");
    }
    auto [it, fresh] = m.target.emplace(f.src, f.dst);
    if (!fresh && it->second != f.dst) throw ScenarioError("device " + id_str(f.src) + " sources flows to several peers");
    m.side[f.src] = Side::Src;
    m.side[f.dst] = Side::Dst;
  }
  return m;
}

}  // namespace

std::string to_string(SyncMethod m) {
  switch (m) {
    case SyncMethod::FlexiCoarse: return "flexi_coarse";
    case SyncMethod::FlexiColdStart: return "flexi_coldstart";
    case SyncMethod::TxBeacon: return "tx_beacon";
    case SyncMethod::RxBeacon: return "rx_beacon";
    case SyncMethod::Legacy: return "legacy";
  }
  return "?";
}

SyncMethod parse_sync_method(std::string_view name) {
  for (auto m : {SyncMethod::FlexiCoarse, SyncMethod::FlexiColdStart, SyncMethod::TxBeacon, SyncMethod::RxBeacon,
                 SyncMethod::Legacy}) {
    if (to_string(m) == name) return m;
  }
  throw ScenarioError("unknown sync method '" + std::string(name) + "'");
}

void BusyPattern::validate() const {
  if (period <= Duration::zero()) throw ScenarioError("busy period must be positive");
  if (length <= Duration::zero() || length >= period) throw ScenarioError("busy length must lie in (0, period)");
  if (phase < Duration::zero() || phase >= period) throw ScenarioError("busy phase must lie in [0, period)");
}

bool BusyPattern::busy_at(SimTime t) const { return overlaps(t, t + Duration::from_ns(1)); }

bool BusyPattern::overlaps(SimTime start, SimTime end) const {
  if (end <= start) return false;
  const SimTime first = SimTime::zero() + phase;
  std::int64_t k = 0;
  if (start > first + length) k = ((start - first) - length).ns() / period.ns();
  for (;; ++k) {
    const SimTime s = first + period * k;
    if (s >= end) return false;
    if (s + length > start) return true;
  }
}

void ScenarioConfig::validate() const {
  if (devices.empty()) throw ScenarioError("scenario has no devices");
  std::set<DeviceId> ids;
  std::set<protocol::Imsi> imsis;
  for (const auto& d : devices) {
    try {
      d.config.validate();
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("device " + id_str(d.config.id) + ": " + e.what());
    }
    if (!ids.insert(d.config.id).second) throw ScenarioError("duplicate device id " + id_str(d.config.id));
    if (!imsis.insert(d.config.imsi).second) throw ScenarioError("duplicate imsi " + std::to_string(raw(d.config.imsi)));
    if (d.busy) d.busy->validate();
  }
  try {
    flexi.validate();
    beacon.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  for (const auto& f : flows) {
    if (f.period && *f.period <= Duration::zero()) throw ScenarioError("flow period must be positive");
    if (f.first_at && *f.first_at < Duration::zero()) throw ScenarioError("flow first_at must not be negative");
  }
  assign_sides(*this);
  if (method == SyncMethod::FlexiCoarse && coarse_handshake == Handshake::Direct) {
    throw ScenarioError("flexi_coarse needs SLSS signalling");
  }
  if (!(alignment >= 0.0 && alignment <= 1.0)) throw ScenarioError("alignment must lie in [0, 1]");
  if (data_len <= Duration::zero()) throw ScenarioError("data_len must be positive");
  if (data_gap < Duration::zero()) throw ScenarioError("data_gap must not be negative");
  if (eps_coarse < Duration::zero()) throw ScenarioError("eps_coarse must not be negative");
  if (x_src < Drift{} || x_dst < Drift{}) throw ScenarioError("drift bounds must not be negative");
  if (!(comm_range_m >= 0.0)) throw ScenarioError("comm_range must not be negative");
  if (max_exchanges && *max_exchanges == 0) throw ScenarioError("max_exchanges must be positive");
  if (method == SyncMethod::TxBeacon && beacon.t_sync.ns() % protocol::kSlotLength.ns() != 0) {
    throw ScenarioError("beacon interval must be a whole number of milliseconds");
  }
}

BuiltScenario build_scenario(const ScenarioConfig& c, std::uint64_t seed) {
  c.validate();
  const RoleMap sides = assign_sides(c);
  std::mt19937_64 rng(seed);

  BuiltScenario out;
  out.channel.comm_range_m = c.comm_range_m;
  std::map<DeviceId, std::size_t> index;
  std::vector<bool> offset_given;

  for (const auto& d : c.devices) {
    const Side side = sides.side.at(d.config.id);
    Drift drift;
    if (d.config.clock.drift) {
      drift = *d.config.clock.drift;
    } else {
      const auto half = (side == Side::Src ? c.x_src : c.x_dst).ppb() / 2;
      drift = Drift::from_ppb(std::uniform_int_distribution<std::int64_t>(-half, half)(rng));
    }
    Duration offset;
    if (d.config.clock.initial_offset) {
      offset = *d.config.clock.initial_offset;
    } else {
      const auto phase = std::uniform_int_distribution<std::int64_t>(0, d.config.sl_drx_cycle.ns() - 1)(rng);
      offset = Duration::from_s(10) + Duration::from_ns(phase);
    }
    offset_given.push_back(d.config.clock.initial_offset.has_value());
    index[d.config.id] = out.devices.size();
    out.devices.push_back({d, {}, DriftingClock(offset, drift)});
    out.channel.positions[d.config.id] = d.position;
  }

  // Coarse relations: the listener's clock is the reference.
  const bool coarse = c.method == SyncMethod::FlexiCoarse || c.method == SyncMethod::Legacy ||
                      c.method == SyncMethod::TxBeacon;
  if (coarse) {
    for (const auto& [src, dst] : sides.target) {
      const auto si = index.at(src);
      if (offset_given[si]) continue;
      const auto& ref = out.devices[index.at(dst)].clock;
      const auto eps = std::uniform_int_distribution<std::int64_t>(-c.eps_coarse.ns(), c.eps_coarse.ns())(rng);
      auto& clk = out.devices[si].clock;
      clk = DriftingClock(ref.offset_at_last_sync() + Duration::from_ns(eps), clk.drift());
    }
  }

  const Duration guard = time_of_flight(c.comm_range_m) * 2 + Duration::from_us(1);
  const auto& fx = c.flexi;
  const auto& bc = c.beacon;

  auto src_base = [&](const protocol::DeviceConfig& dev) {
    protocol::SrcConfig s;
    s.self = dev.id;
    s.imsi = dev.imsi;
    s.dst_identity_known = c.dst_identity_known;
    s.piggyback = c.piggyback;
    s.data_len = c.data_len;
    s.data_gap = c.data_gap;
    s.response_guard = guard;
    s.x_src = c.x_src;
    s.x_dst = c.x_dst;
    s.max_exchanges = c.max_exchanges;
    return s;
  };
  auto dst_base = [&](const protocol::DeviceConfig& dev) {
    protocol::DstConfig d;
    d.self = dev.id;
    d.imsi = dev.imsi;
    d.sl_drx_cycle = dev.sl_drx_cycle;
    d.schedule = protocol::paging_schedule(dev.imsi, dev.sl_drx_cycle);
    d.alignment = c.alignment;
    d.ranging = c.ranging;
    d.t_req = fx.t_req;
    d.t_rsp = fx.t_rsp;
    d.data_len = c.data_len;
    d.data_gap = c.data_gap;
    d.response_guard = guard;
    d.window = fx.effective_window();
    return d;
  };
  const Handshake flexi_hs = c.method == SyncMethod::Legacy          ? Handshake::Direct
                             : c.method == SyncMethod::FlexiCoarse ? c.coarse_handshake
                                                                   : Handshake::TimeRequest;

  for (auto& b : out.devices) {
    const auto& dev = b.setup.config;
    const Side side = sides.side.at(dev.id);
    switch (c.method) {
      case SyncMethod::FlexiCoarse:
      case SyncMethod::FlexiColdStart:
      case SyncMethod::Legacy:
        if (side == Side::Src) {
          const auto& peer = out.devices[index.at(sides.target.at(dev.id))].setup.config;
          auto s = src_base(dev);
          s.target = protocol::PagingTarget{peer.id, protocol::paging_schedule(peer.imsi, peer.sl_drx_cycle),
                                            fx.effective_window(), c.alignment};
          s.handshake = flexi_hs;
          s.t_ss = fx.t_ss;
          s.t_req = fx.t_req;
          s.t_rsp = fx.t_rsp;
          s.sweep_span = fx.t_win;
          if (c.method != SyncMethod::FlexiColdStart) s.initial_coarse_error = c.eps_coarse;
          b.role = s;
        } else {
          auto d = dst_base(dev);
          d.handshake = flexi_hs;
          b.role = d;
        }
        break;
      case SyncMethod::TxBeacon:
        if (side == Side::Dst) {
          protocol::TxBeaconConfig t;
          t.self = dev.id;
          t.imsi = dev.imsi;
          t.schedule = protocol::paging_schedule(dev.imsi, bc.t_sync);
          t.t_ss = bc.t_ss;
          b.role = t;
        } else if (side == Side::Src) {
          const auto& beacon = out.devices[index.at(sides.target.at(dev.id))].setup.config;
          auto d = dst_base(dev);
          d.handshake = Handshake::SlssOnly;
          d.schedule = protocol::paging_schedule(beacon.imsi, bc.t_sync);
          d.window = bc.t_win;
          d.listen_po = false;
          d.expect_data = false;
          b.role = d;
        } else {
          auto d = dst_base(dev);
          d.handshake = Handshake::SlssOnly;
          b.role = d;
        }
        break;
      case SyncMethod::RxBeacon:
        if (side == Side::Dst) {
          protocol::RxBeaconConfig r;
          r.self = dev.id;
          r.imsi = dev.imsi;
          r.t_req = bc.t_req;
          r.t_rsp = bc.t_rsp;
          r.response_guard = guard;
          b.role = r;
        } else if (side == Side::Src) {
          auto s = src_base(dev);
          s.handshake = Handshake::TimeRequest;
          s.send_data = false;
          s.t_ss = bc.t_ss;
          s.t_req = bc.t_req;
          s.t_rsp = bc.t_rsp;
          s.immediate_attempts = bc.n_attempts;
          s.retry_gap = s.burst() + s.t_rsp + guard + Duration::from_ms(1);
          b.role = s;
        } else {
          auto d = dst_base(dev);
          d.handshake = Handshake::TimeRequest;
          b.role = d;
        }
        break;
    }
    try {
      std::visit([](const auto& r) { r.validate(); }, b.role);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("device " + id_str(dev.id) + ": " + e.what());
    }
  }

  const bool beacon_method = c.method == SyncMethod::TxBeacon || c.method == SyncMethod::RxBeacon;
  for (auto f : c.flows) {
    if (!f.period) f.period = beacon_method ? bc.t_sync : fx.t_data;
    if (!f.first_at) {
      const auto span = std::max<std::int64_t>(f.period->ns() - Duration::from_ms(1).ns(), 1);
      f.first_at = Duration::from_ms(1) + Duration::from_ns(std::uniform_int_distribution<std::int64_t>(0, span - 1)(rng));
    }
    out.flows.push_back(f);
  }
  return out;
}

}  // namespace sidesync::netsim
