#include "sidesync/netsim/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <map>
#include <variant>

#include "sidesync/netsim/event_queue.hpp"

namespace sidesync::netsim {

using namespace protocol;

double FlowStats::mean_attempts() const {
  if (attempts.empty()) return 0.0;
  double s = 0.0;
  for (int a : attempts) s += a;
  return s / static_cast<double>(attempts.size());
}

int FlowStats::max_attempts() const { return attempts.empty() ? 0 : *std::max_element(attempts.begin(), attempts.end()); }

bool FlowStats::sync_failure() const {
  return sync_failures > 0 || data_sent > data_delivered || (data_sent == 0 && sync_successes == 0);
}

const DeviceSummary& RunResult::device(DeviceId id) const {
  for (const auto& d : devices) {
    if (d.id == id) return d;
  }
  throw std::out_of_range("no device " + std::to_string(raw(id)) + " in run result");
}

double RunResult::average_power(DeviceId id, PowerComponent component) const {
  return ledger_power(device(id).energy, component, horizon);
}

namespace {

struct TimerItem {
  SimTime local;
  std::uint64_t token;
};

struct TxItem {
  Transmit tx;
  std::uint64_t token;
};

struct ListenItem {
  Listen spec;
  SimTime start_g;
  Duration ext{};
  SimTime lock_until{};
  std::uint64_t token = 0;
};

struct ArrivalItem {
  std::uint64_t id = 0;
  Message msg;
  DeviceId from{};
  SimTime start{};
  SimTime end{};
  Duration delay{};
  double distance_m = 0.0;
  bool accepted = false;
  std::uint64_t generation = 0;
};

struct Dev {
  BuiltDevice built;
  RoleState state;
  DriftingClock clock;
  EnergyLedger ledger;
  std::map<TimerKind, TimerItem> timers;
  std::map<std::uint64_t, TxItem> txs;
  std::map<std::uint64_t, ListenItem> listens;
  std::deque<ArrivalItem> arrivals;
  std::deque<std::pair<SimTime, SimTime>> recent_tx;
  std::uint64_t generation = 0;

  DeviceId id() const { return built.setup.config.id; }
};

struct EvBoot {
  std::size_t dev;
};
struct EvTimer {
  std::size_t dev;
  TimerKind kind;
  std::uint64_t token;
};
struct EvTx {
  std::size_t dev;
  std::uint64_t id;
  std::uint64_t token;
};
struct EvListenEnd {
  std::size_t dev;
  std::uint64_t id;
  std::uint64_t token;
};
struct EvArrivalStart {
  std::size_t dev;
  ArrivalItem item;
};
struct EvArrivalEnd {
  std::size_t dev;
  std::uint64_t id;
};
struct EvData {
  std::size_t flow;
  std::uint64_t seq;
};

using Payload = std::variant<EvBoot, EvTimer, EvTx, EvListenEnd, EvArrivalStart, EvArrivalEnd, EvData>;

std::string opt_id(const std::optional<DeviceId>& id) { return id ? std::to_string(raw(*id)) : "*"; }

class Sim {
 public:
  Sim(const ScenarioConfig& cfg, std::uint64_t seed, Duration horizon)
      : cfg_(cfg), built_(build_scenario(cfg, seed)), stop_(SimTime::zero() + horizon) {
    res_.seed = seed;
    res_.horizon = horizon;
    for (auto& b : built_.devices) {
      if (const auto* d = std::get_if<DstConfig>(&b.role); d && horizon < d->schedule.period) {
        throw ScenarioError("horizon shorter than one listening cycle of device " +
                            std::to_string(raw(b.setup.config.id)));
      }
      index_[b.setup.config.id] = devs_.size();
      devs_.push_back(Dev{b, initial_state(b.role), b.clock, {}, {}, {}, {}, {}, {}, 0});
    }
    for (const auto& f : built_.flows) {
      FlowStats s;
      s.src = f.src;
      s.dst = f.dst;
      res_.flows.push_back(std::move(s));
    }
  }

  RunResult run() {
    for (std::size_t i = 0; i < devs_.size(); ++i) q_.push(SimTime::zero(), EvBoot{i});
    for (std::size_t i = 0; i < built_.flows.size(); ++i) {
      q_.push(SimTime::zero() + *built_.flows[i].first_at, EvData{i, 1});
    }
    while (!q_.empty() && q_.next_time() < stop_) {
      auto e = q_.pop();
      now_ = e.at;
      ++res_.counters.events;
      std::visit([this](auto& ev) { handle(ev); }, e.payload);
    }
    now_ = stop_;
    for (auto& d : devs_) {
      for (auto& [id, l] : d.listens) close_listen(d, l, stop_);
      d.listens.clear();
      if (const auto& b = d.built.setup.busy) {
        for (SimTime s = SimTime::zero() + b->phase; s < stop_; s = s + b->period) d.ledger.add(RadioState::Busy, s, s + b->length);
      }
      res_.devices.push_back(DeviceSummary{d.id(), d.built.setup.config.imsi, role_of(d.built.role),
                                           d.built.setup.config.radio, d.clock,
                                           d.ledger.settle(d.built.setup.config.radio, res_.horizon, cfg_.keep_timeline)});
    }
    return std::move(res_);
  }

 private:
  // ---- helpers

  void trace(const Dev& d, std::string_view event, const std::string& details) {
    if (!cfg_.trace) return;
    res_.trace.push_back(fmt::format("{},{},{},{}", now_.ns(), raw(d.id()), event, details));
  }

  SimTime local_now(const Dev& d) const { return d.clock.local_time(now_); }
  SimTime schedule_at(const Dev& d, SimTime local) const { return std::max(now_, d.clock.global_time_for(local)); }

  SimTime listen_end_g(const Dev& d, const ListenItem& l) const {
    if (!l.spec.length) return SimTime::max();
    return d.clock.global_time_for(l.spec.start + *l.spec.length + l.ext);
  }

  void push_listen_end(std::size_t di, std::uint64_t id, ListenItem& l) {
    if (!l.spec.length) return;
    l.token = ++tokens_;
    q_.push(std::max(now_, listen_end_g(devs_[di], l)), EvListenEnd{di, id, l.token});
  }

  void close_listen(Dev& d, const ListenItem& l, SimTime at) {
    if (l.start_g < at) {
      d.ledger.add(l.spec.purpose == Purpose::Sync ? RadioState::RxSync : RadioState::RxData, l.start_g, at);
    }
  }

  FlowStats* flow_for(DeviceId dev, const std::optional<DeviceId>& peer) {
    for (auto& f : res_.flows) {
      if (peer && ((f.src == dev && f.dst == *peer) || (f.src == *peer && f.dst == dev))) return &f;
    }
    if (!peer) {
      for (auto& f : res_.flows) {
        if (f.src == dev) return &f;
      }
    }
    return nullptr;
  }

  // ---- protocol interface

  std::vector<Action> dispatch(std::size_t di, const Event& ev) {
    Dev& d = devs_[di];
    StepResult r;
    try {
      r = step(d.built.role, d.state, ev);
    } catch (const ProtocolViolation& e) {
      std::string msg = fmt::format("t={}ns device {}: {}", now_.ns(), raw(d.id()), e.what());
      const std::size_t n = res_.trace.size();
      for (std::size_t i = n > 8 ? n - 8 : 0; i < n; ++i) msg += "\n  " + res_.trace[i];
      throw ProtocolViolation(msg);
    }
    d.state = std::move(r.state);
    for (const auto& a : r.actions) {
      std::visit([&](const auto& act) { apply(di, act); }, a);
    }
    return std::move(r.actions);
  }

  void apply(std::size_t di, const Transmit& t) {
    Dev& d = devs_[di];
    const std::uint64_t id = ++ids_;
    const std::uint64_t token = ++tokens_;
    d.txs[id] = TxItem{t, token};
    q_.push(schedule_at(d, t.at - t.timing_advance), EvTx{di, id, token});
  }

  void apply(std::size_t di, const Listen& l) {
    Dev& d = devs_[di];
    const std::uint64_t id = ++ids_;
    ListenItem item{l, schedule_at(d, l.start), {}, SimTime::zero(), 0};
    auto& stored = d.listens.emplace(id, item).first->second;
    push_listen_end(di, id, stored);
    // A message already on the air is still caught if it began within the cyclic prefix.
    for (auto& a : d.arrivals) {
      bool misaligned = false;
      if (a.accepted || a.end <= now_ || !accepts(d, stored, a, misaligned)) continue;
      a.accepted = true;
      a.generation = d.generation;
      stored.lock_until = std::max(stored.lock_until, a.end);
    }
  }

  void apply(std::size_t di, const SetTimer& t) {
    Dev& d = devs_[di];
    const std::uint64_t token = ++tokens_;
    d.timers[t.kind] = TimerItem{t.at, token};
    q_.push(schedule_at(d, t.at), EvTimer{di, t.kind, token});
  }

  void apply(std::size_t di, const CancelTimer& t) { devs_[di].timers.erase(t.kind); }

  void apply(std::size_t di, const ResyncClock& r) {
    Dev& d = devs_[di];
    d.clock.resync(now_, d.clock.offset_at(now_) + r.adjustment);
    trace(d, "resync", fmt::format("adjust_ns={}", r.adjustment.ns()));
    // Everything pending is anchored to local time: re-place it.
    for (auto& [kind, t] : d.timers) {
      t.token = ++tokens_;
      q_.push(schedule_at(d, t.local), EvTimer{di, kind, t.token});
    }
    for (auto& [id, t] : d.txs) {
      t.token = ++tokens_;
      q_.push(schedule_at(d, t.tx.at - t.tx.timing_advance), EvTx{di, id, t.token});
    }
    // An open receiver stays on for the span it was opened with; only
    // listens that have not started yet follow the corrected clock.
    for (auto& [id, l] : d.listens) {
      if (l.start_g > now_) {
        l.start_g = schedule_at(d, l.spec.start);
      } else {
        l.ext = l.ext + r.adjustment;
      }
      push_listen_end(di, id, l);
    }
  }

  void apply(std::size_t di, const Sleep&) {
    Dev& d = devs_[di];
    for (auto& [id, l] : d.listens) close_listen(d, l, now_);
    d.listens.clear();
    ++d.generation;
  }

  void apply(std::size_t di, const Record& r) {
    Dev& d = devs_[di];
    trace(d, to_string(r.kind), fmt::format("peer={} attempts={} seq={}", opt_id(r.peer), r.attempts, r.data_seq));
    FlowStats* f = flow_for(d.id(), r.peer);
    switch (r.kind) {
      case OutcomeKind::SyncAchieved:
        if (f) {
          ++f->sync_successes;
          f->attempts.push_back(r.attempts);
        }
        if (r.peer && index_.count(*r.peer)) {
          const Dev& p = devs_[index_.at(*r.peer)];
          res_.delta_sync.push_back({now_, d.id(), *r.peer, (d.clock.offset_at(now_) - p.clock.offset_at(now_)).abs()});
        }
        break;
      case OutcomeKind::SyncFailed:
        if (f) ++f->sync_failures;
        break;
      case OutcomeKind::FastPath:
        if (f) ++f->fast_paths;
        break;
      case OutcomeKind::FalseAlarmRejected: ++res_.counters.false_alarms_rejected; break;
      case OutcomeKind::DataReceived:
        if (f) ++f->data_delivered;
        break;
      case OutcomeKind::DataDropped:
        if (f) ++f->data_dropped;
        break;
      case OutcomeKind::DataMissed:
        if (f) ++f->data_missed;
        break;
      case OutcomeKind::ResponseSent:
      case OutcomeKind::RequestMissed: break;
    }
  }

  // ---- events

  void handle(const EvBoot& e) { dispatch(e.dev, TimerFired{TimerKind::Boot, local_now(devs_[e.dev])}); }

  void handle(const EvTimer& e) {
    Dev& d = devs_[e.dev];
    auto it = d.timers.find(e.kind);
    if (it == d.timers.end() || it->second.token != e.token) return;
    d.timers.erase(it);
    trace(d, "timer", to_string(e.kind));
    dispatch(e.dev, TimerFired{e.kind, local_now(d)});
  }

  void handle(const EvTx& e) {
    Dev& d = devs_[e.dev];
    auto it = d.txs.find(e.id);
    if (it == d.txs.end() || it->second.token != e.token) return;
    const Message msg = it->second.tx.msg;
    d.txs.erase(it);
    const auto& busy = d.built.setup.busy;
    if (busy && busy->overlaps(now_, now_ + msg.on_air)) {
      ++res_.counters.busy_suppressed;
      trace(d, "tx_suppressed", to_string(msg.kind));
      return;
    }
    const SimTime end = now_ + msg.on_air;
    d.ledger.add(msg.kind == MessageKind::SlData ? RadioState::TxData : RadioState::TxSync, now_, end);
    d.recent_tx.emplace_back(now_, end);
    max_air_ = std::max(max_air_, msg.on_air);
    ++res_.counters.transmissions;
    if (msg.kind == MessageKind::SlData) {
      if (auto* f = flow_for(d.id(), msg.dst)) ++f->data_sent;
    }
    trace(d, "tx", fmt::format("{} dst={} len_ns={} seq={}", to_string(msg.kind), opt_id(msg.dst), msg.on_air.ns(),
                               msg.data_seq));
    for (auto& [id, l] : d.listens) {
      if (!l.spec.extend_on_tx || l.start_g > now_ || listen_end_g(d, l) <= now_) continue;
      l.ext += msg.on_air;
      push_listen_end(e.dev, id, l);
    }
    for (const auto& del : deliver(built_.channel, d.id(), msg, now_)) {
      ArrivalItem a{++ids_, msg, d.id(), del.arrival, del.arrival + msg.on_air, del.delay, del.distance_m, false, 0};
      q_.push(del.arrival, EvArrivalStart{index_.at(del.to), a});
    }
  }

  void handle(const EvListenEnd& e) {
    Dev& d = devs_[e.dev];
    auto it = d.listens.find(e.id);
    if (it == d.listens.end() || it->second.token != e.token) return;
    if (it->second.lock_until > now_) {
      q_.push(it->second.lock_until, EvListenEnd{e.dev, e.id, e.token});
      return;
    }
    close_listen(d, it->second, now_);
    d.listens.erase(it);
  }

  bool accepts(const Dev& d, const ListenItem& l, const ArrivalItem& a, bool& misaligned) const {
    if (!l.spec.accepts.contains(a.msg.kind)) return false;
    const SimTime ls = l.start_g;
    const SimTime le = listen_end_g(d, l);
    if (a.msg.kind == MessageKind::Slss) return a.start < le && ls < a.end;
    if (!(a.start < le) || ls - a.start > kNormalCyclicPrefix) return false;
    if (a.msg.kind == MessageKind::SlData && l.spec.expected_arrival) {
      if ((d.clock.local_time(a.start) - *l.spec.expected_arrival).abs() >= kNormalCyclicPrefix) {
        misaligned = true;
        return false;
      }
    }
    return true;
  }

  void handle(EvArrivalStart& e) {
    Dev& d = devs_[e.dev];
    ArrivalItem a = std::move(e.item);
    bool misaligned = false;
    for (auto& [id, l] : d.listens) {
      if (!accepts(d, l, a, misaligned)) continue;
      a.accepted = true;
      l.lock_until = std::max(l.lock_until, a.end);
    }
    if (!a.accepted && misaligned) {
      ++res_.counters.misaligned;
      trace(d, "rx_misaligned", fmt::format("{} from={}", to_string(a.msg.kind), raw(a.from)));
    }
    a.generation = d.generation;
    max_air_ = std::max(max_air_, a.msg.on_air);
    q_.push(a.end, EvArrivalEnd{e.dev, a.id});
    d.arrivals.push_back(std::move(a));
  }

  void handle(const EvArrivalEnd& e) {
    Dev& d = devs_[e.dev];
    auto it = std::find_if(d.arrivals.begin(), d.arrivals.end(), [&](const ArrivalItem& a) { return a.id == e.id; });
    const ArrivalItem a = *it;

    std::vector<Arrival> group{{a.start, a.end, a.distance_m}};
    for (const auto& o : d.arrivals) {
      // A sender's own back-to-back messages may touch by clock quantization; never a collision.
      if (o.id != a.id && o.from != a.from && o.start < a.end && a.start < o.end) group.push_back({o.start, o.end, o.distance_m});
    }
    const bool collided = !detect_collision(group, cfg_.collisions)[0];
    const bool half_duplex = std::any_of(d.recent_tx.begin(), d.recent_tx.end(),
                                         [&](const auto& t) { return t.first < a.end && a.start < t.second; });
    const bool busy = d.built.setup.busy && d.built.setup.busy->overlaps(a.start, a.end);

    if (a.accepted && a.generation == d.generation) {
      if (half_duplex) {
        ++res_.counters.half_duplex_losses;
        trace(d, "rx_lost", fmt::format("{} from={} reason=half_duplex", to_string(a.msg.kind), raw(a.from)));
      } else if (busy) {
        ++res_.counters.busy_losses;
        trace(d, "rx_lost", fmt::format("{} from={} reason=busy", to_string(a.msg.kind), raw(a.from)));
      } else if (collided) {
        ++res_.counters.collisions;
        trace(d, "rx_lost", fmt::format("{} from={} reason=collision", to_string(a.msg.kind), raw(a.from)));
      } else {
        deliver_to(e.dev, a);
      }
    }

    const SimTime horizon_back = now_ - std::min(now_.since_epoch(), max_air_ + max_air_);
    while (!d.arrivals.empty() && d.arrivals.front().end < horizon_back) d.arrivals.pop_front();
    while (!d.recent_tx.empty() && d.recent_tx.front().second < horizon_back) d.recent_tx.pop_front();
  }

  void deliver_to(std::size_t di, const ArrivalItem& a) {
    Dev& d = devs_[di];
    ++res_.counters.deliveries;
    trace(d, "rx", fmt::format("{} from={} dst={} delay_ns={} start_ns={}", to_string(a.msg.kind), raw(a.from),
                               opt_id(a.msg.dst), a.delay.ns(), a.start.ns()));
    MessageReceived ev{a.msg, d.clock.local_time(a.start), local_now(d),
                       cfg_.ranging ? std::optional(a.delay) : std::nullopt};
    const auto actions = dispatch(di, ev);
    if (a.msg.kind == MessageKind::Slss && a.msg.dst && *a.msg.dst != d.id()) {
      const bool rejected = std::any_of(actions.begin(), actions.end(), [](const Action& x) {
        const auto* r = std::get_if<Record>(&x);
        return r && r->kind == OutcomeKind::FalseAlarmRejected;
      });
      if (!rejected) ++res_.counters.accepted_mismatches;
    }
  }

  void handle(const EvData& e) {
    const FlowConfig& f = built_.flows[e.flow];
    const std::size_t di = index_.at(f.src);
    if (std::holds_alternative<SrcConfig>(devs_[di].built.role)) {
      ++res_.flows[e.flow].data_generated;
      trace(devs_[di], "data_arrival", fmt::format("seq={}", e.seq));
      dispatch(di, DataArrived{local_now(devs_[di]), e.seq});
    }
    if (!f.one_shot) q_.push(now_ + *f.period, EvData{e.flow, e.seq + 1});
  }

  const ScenarioConfig& cfg_;
  BuiltScenario built_;
  std::vector<Dev> devs_;
  std::map<DeviceId, std::size_t> index_;
  EventQueue<Payload> q_;
  RunResult res_;
  SimTime now_{};
  SimTime stop_;
  std::uint64_t tokens_ = 0;
  std::uint64_t ids_ = 0;
  Duration max_air_ = Duration::from_ms(1);
};

}  // namespace

RunResult run(const ScenarioConfig& scenario, std::uint64_t seed, Duration horizon) {
  if (horizon <= Duration::zero()) throw ScenarioError("horizon must be positive");
  Sim sim(scenario, seed, horizon);
  return sim.run();
}

}  // namespace sidesync::netsim
