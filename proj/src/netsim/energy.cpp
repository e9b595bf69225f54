#include "sidesync/netsim/energy.hpp"

#include <algorithm>
#include <stdexcept>

namespace sidesync::netsim {

std::string to_string(RadioState s) {
  switch (s) {
    case RadioState::Sleep: return "sleep";
    case RadioState::RxData: return "rx_data";
    case RadioState::RxSync: return "rx_sync";
    case RadioState::Busy: return "busy";
    case RadioState::TxData: return "tx_data";
    case RadioState::TxSync: return "tx_sync";
  }
  return "?";
}

std::int64_t Dwell::total() const {
  std::int64_t t = 0;
  for (auto v : ns) t += v;
  return t;
}

void EnergyLedger::add(RadioState state, SimTime start, SimTime end) {
  if (state == RadioState::Sleep) throw std::invalid_argument("sleep is the implicit default state");
  if (end <= start) return;
  raw_.push_back({start, end, state});
}

EnergyReport EnergyLedger::settle(const power::RadioPowerProfile& profile, Duration horizon, bool keep_timeline) const {
  if (horizon <= Duration::zero()) throw std::invalid_argument("horizon must be positive");
  const SimTime stop = SimTime::zero() + horizon;

  struct Edge {
    SimTime at;
    RadioState state;
    int delta;
  };
  std::vector<Edge> edges;
  edges.reserve(raw_.size() * 2);
  for (const auto& seg : raw_) {
    const SimTime a = std::min(seg.start, stop);
    const SimTime b = std::min(seg.end, stop);
    if (b <= a) continue;
    edges.push_back({a, seg.state, +1});
    edges.push_back({b, seg.state, -1});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.at < y.at; });

  EnergyReport r;
  std::array<int, kRadioStates> active{};
  auto top = [&] {
    for (std::size_t i = kRadioStates; i-- > 1;) {
      if (active[i] > 0) return static_cast<RadioState>(i);
    }
    return RadioState::Sleep;
  };
  auto charge = [&](SimTime a, SimTime b, RadioState s) {
    if (b <= a) return;
    r.dwell.ns[static_cast<std::size_t>(s)] += (b - a).ns();
    if (!keep_timeline) return;
    if (!r.timeline.empty() && r.timeline.back().state == s && r.timeline.back().end == a) {
      r.timeline.back().end = b;
    } else {
      r.timeline.push_back({a, b, s});
    }
  };

  SimTime cursor = SimTime::zero();
  std::size_t i = 0;
  while (i < edges.size()) {
    const SimTime at = edges[i].at;
    charge(cursor, at, top());
    while (i < edges.size() && edges[i].at == at) {
      active[static_cast<std::size_t>(edges[i].state)] += edges[i].delta;
      ++i;
    }
    cursor = at;
  }
  charge(cursor, stop, top());

  auto joules = [](double watts, std::int64_t ns) { return watts * static_cast<double>(ns) * 1e-9; };
  r.joules_tx_sync = joules(profile.p_tx, r.dwell.of(RadioState::TxSync));
  r.joules_rx_sync = joules(profile.p_rx, r.dwell.of(RadioState::RxSync));
  r.joules_tx = joules(profile.p_tx, r.dwell.tx());
  r.joules_rx = joules(profile.p_rx, r.dwell.rx());
  r.joules_sleep = joules(profile.p_sleep, r.dwell.of(RadioState::Sleep));
  return r;
}

double ledger_power(const EnergyReport& report, PowerComponent component, Duration horizon) {
  if (horizon <= Duration::zero()) throw std::invalid_argument("horizon must be positive");
  double j = 0.0;
  switch (component) {
    case PowerComponent::Tx: j = report.joules_tx; break;
    case PowerComponent::Rx: j = report.joules_rx; break;
    case PowerComponent::Sleep: j = report.joules_sleep; break;
    case PowerComponent::Total: j = report.joules_total(); break;
    case PowerComponent::Sync: j = report.joules_sync(); break;
  }
  return j / horizon.seconds();
}

}  // namespace sidesync::netsim
