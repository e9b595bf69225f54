#include "sidesync/protocol/roles.hpp"

#include <algorithm>
#include <stdexcept>

namespace sidesync::protocol {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(Duration d, const char* what) {
  if (d <= Duration::zero()) throw std::invalid_argument(std::string(what) + " must be positive");
}

void require_non_negative(Duration d, const char* what) {
  if (d < Duration::zero()) throw std::invalid_argument(std::string(what) + " must not be negative");
}

[[noreturn]] void violation(const std::string& role, const std::string& phase, const std::string& what) {
  throw ProtocolViolation(role + " in phase " + phase + " cannot accept " + what);
}

std::string describe(const Event& e) {
  return std::visit(overloaded{
                        [](const TimerFired& t) { return "timer " + to_string(t.kind); },
                        [](const MessageReceived& m) { return "message " + to_string(m.msg.kind); },
                        [](const DataArrived&) { return std::string("data arrival"); },
                    },
                    e);
}

TimingPayload payload(DeviceId self, Imsi imsi, SimTime at, std::optional<Duration> cycle = std::nullopt) {
  return {at, self, imsi, cycle};
}

// ---------------------------------------------------------------- SRC

struct SrcStep {
  const SrcConfig& cfg;
  SrcState s;
  std::vector<Action> out;

  [[noreturn]] void bad(const Event& e) { violation("FlexiSrc", to_string(s.phase), describe(e)); }

  bool is_fine(SimTime now) const {
    if (!s.peer || !cfg.target) return false;
    if (cfg.assume_fine) return true;
    Duration since = now - s.peer->synced_at;
    if (since < Duration::zero()) since = Duration::zero();
    SyncBudget b{s.peer->residual, cfg.x_src, cfg.x_dst, since, Duration::zero(), cfg.t_cp, cfg.t_slsw};
    return classify_sync(total_sync_error(b), cfg.t_cp, cfg.t_slsw) == SyncLevel::Fine;
  }

  std::optional<DeviceId> addressed() const {
    if (cfg.target && cfg.dst_identity_known) return cfg.target->id;
    return std::nullopt;
  }

  void send_data_at(SimTime at, Duration advance) {
    Message m{MessageKind::SlData, cfg.self, cfg.target ? std::optional(cfg.target->id) : std::nullopt,
              std::nullopt, cfg.data_len, false, *s.current};
    out.push_back(Transmit{m, at, advance});
    out.push_back(SetTimer{TimerKind::DataDone, at + cfg.data_len});
    s.phase = SrcPhase::SendingData;
  }

  void emit_attempt() {
    const SimTime c = s.plan.candidate(s.attempt);
    Message slss{MessageKind::Slss, cfg.self, addressed(), payload(cfg.self, cfg.imsi, c), cfg.t_ss, cfg.piggyback, 0};
    out.push_back(Transmit{slss, c, Duration::zero()});
    if (!cfg.piggyback) {
      Message req{MessageKind::TimeReq, cfg.self, addressed(), std::nullopt, cfg.t_req, false, 0};
      out.push_back(Transmit{req, c + cfg.t_ss, Duration::zero()});
    }
    const SimTime listen_at = c + cfg.burst();
    out.push_back(Listen{listen_at, cfg.t_rsp, Purpose::Sync, KindSet{MessageKind::TimeRsp}, false, std::nullopt});
    out.push_back(SetTimer{TimerKind::ResponseTimeout, listen_at + cfg.t_rsp + cfg.response_guard});
    s.phase = SrcPhase::Sweeping;
  }

  void begin_exchange(std::uint64_t seq, SimTime now) {
    s.current = seq;
    s.attempt = 0;
    if (cfg.handshake == Handshake::Direct) {
      const SimTime po = slot_at_or_after(cfg.target->schedule, now + cfg.lead);
      send_data_at(po, Duration::zero());
      return;
    }
    if (cfg.send_data && is_fine(now)) {
      out.push_back(Record{OutcomeKind::FastPath, cfg.target->id, 0, seq});
      const SimTime po = slot_at_or_after(cfg.target->schedule, now + cfg.lead);
      send_data_at(po, s.peer->delay);
      return;
    }
    if (cfg.handshake == Handshake::SlssOnly) {
      const SimTime po = slot_at_or_after(cfg.target->schedule, now + cfg.lead);
      Message slss{MessageKind::Slss, cfg.self, addressed(), payload(cfg.self, cfg.imsi, po), cfg.t_ss, false, 0};
      out.push_back(Transmit{slss, po, Duration::zero()});
      s.peer = PeerTiming{cfg.target->id, po, Duration::zero(), Duration::zero()};
      if (cfg.send_data) {
        send_data_at(po + cfg.t_ss, Duration::zero());
      } else {
        out.push_back(SetTimer{TimerKind::DataDone, po + cfg.t_ss});
        s.phase = SrcPhase::SendingData;
      }
      return;
    }
    // TimeRequest sweep.
    if (!cfg.target) {
      s.plan = SweepPlan{now + cfg.lead, cfg.retry_gap, cfg.immediate_attempts};
    } else if (s.peer) {
      const PagingTarget& t = *cfg.target;
      const Duration lead_w = window_lead(t.window, kSlotLength, t.alignment);
      const auto tiles = ceil_div(cfg.sweep_span, t.window);
      const Duration margin = (t.window * tiles) / 2 + lead_w - t.window / 2;
      const SimTime po = slot_at_or_after(t.schedule, now + cfg.lead + margin);
      const SimTime centre = po - lead_w + t.window / 2;
      s.plan = coarse_sweep(centre, cfg.sweep_span, t.window, cfg.burst());
    } else {
      s.plan = cold_start_sweep(now + cfg.lead, cfg.target->schedule.period, cfg.target->window);
    }
    s.attempt = 1;
    emit_attempt();
  }

  void finish_exchange(SimTime now) {
    s.current.reset();
    ++s.exchanges;
    if (cfg.max_exchanges && s.exchanges >= *cfg.max_exchanges) {
      s.phase = SrcPhase::Done;
      for (auto seq : s.pending) out.push_back(Record{OutcomeKind::DataDropped, std::nullopt, 0, seq});
      s.pending.clear();
      return;
    }
    s.phase = s.peer ? SrcPhase::Synced : SrcPhase::Idle;
    if (!s.pending.empty()) {
      const auto seq = s.pending.front();
      s.pending.pop_front();
      begin_exchange(seq, now);
    }
  }

  void on_timer(const TimerFired& t, const Event& e) {
    switch (t.kind) {
      case TimerKind::Boot:
        if (s.booted) bad(e);
        s.booted = true;
        if (cfg.initial_coarse_error && cfg.target) {
          s.peer = PeerTiming{cfg.target->id, t.now, *cfg.initial_coarse_error, Duration::zero()};
          s.phase = SrcPhase::Synced;
        }
        return;
      case TimerKind::ResponseTimeout:
        if (s.phase != SrcPhase::Sweeping) bad(e);
        if (s.attempt < s.plan.max_attempts) {
          ++s.attempt;
          emit_attempt();
          return;
        }
        out.push_back(Record{OutcomeKind::SyncFailed, cfg.target ? std::optional(cfg.target->id) : std::nullopt,
                             s.attempt, 0});
        if (cfg.send_data && s.current) out.push_back(Record{OutcomeKind::DataDropped, std::nullopt, 0, *s.current});
        s.peer.reset();  // stale timing: next exchange starts cold
        finish_exchange(t.now);
        return;
      case TimerKind::DataDone:
        if (s.phase != SrcPhase::SendingData) bad(e);
        finish_exchange(t.now);
        return;
      default:
        bad(e);
    }
  }

  void on_message(const MessageReceived& m, const Event& e) {
    if (m.msg.kind != MessageKind::TimeRsp || s.phase != SrcPhase::Sweeping) bad(e);
    if (m.msg.dst && *m.msg.dst != cfg.self) return;  // someone else's exchange
    const SimTime req_end = s.plan.candidate(s.attempt) + cfg.burst();
    Duration delay = (m.rx_start - req_end) / 2;
    if (delay < Duration::zero()) delay = Duration::zero();
    const Duration adjust = (m.msg.timing->sender_local - m.rx_start) + delay;
    out.push_back(CancelTimer{TimerKind::ResponseTimeout});
    out.push_back(Sleep{});
    out.push_back(ResyncClock{adjust});
    const SimTime now = m.now + adjust;
    s.peer = PeerTiming{m.msg.src, now, Duration::zero(), delay};
    out.push_back(Record{OutcomeKind::SyncAchieved, m.msg.src, s.attempt, s.current.value_or(0)});
    if (cfg.send_data && s.current) {
      send_data_at(m.msg.timing->sender_local + cfg.t_rsp + cfg.data_gap, delay);
      return;
    }
    finish_exchange(now);
  }

  void on_data(const DataArrived& d) {
    if (!s.booted) throw ProtocolViolation("FlexiSrc received data before boot");
    switch (s.phase) {
      case SrcPhase::Idle:
      case SrcPhase::Synced: begin_exchange(d.seq, d.now); return;
      case SrcPhase::Sweeping:
      case SrcPhase::SendingData: s.pending.push_back(d.seq); return;
      case SrcPhase::Done: out.push_back(Record{OutcomeKind::DataDropped, std::nullopt, 0, d.seq}); return;
    }
  }

  void run(const Event& e) {
    std::visit(overloaded{
                   [&](const TimerFired& t) { on_timer(t, e); },
                   [&](const MessageReceived& m) { on_message(m, e); },
                   [&](const DataArrived& d) { on_data(d); },
               },
               e);
  }
};

// ---------------------------------------------------------------- DST

struct DstStep {
  const DstConfig& cfg;
  DstState s;
  std::vector<Action> out;

  [[noreturn]] void bad(const Event& e) { violation("FlexiDst", to_string(s.phase), describe(e)); }

  void schedule_window(SimTime now) {
    const bool ssw = cfg.handshake != Handshake::Direct;
    const Duration lead_w = ssw ? window_lead(cfg.window, kSlotLength, cfg.alignment) : Duration::zero();
    const SimTime po = slot_at_or_after(cfg.schedule, now + lead_w);
    const SimTime start = po - lead_w;
    SimTime end = po + kSlotLength;
    if (ssw) {
      out.push_back(Listen{start, cfg.window, Purpose::Sync, KindSet{MessageKind::Slss}, true, std::nullopt});
      end = std::max(end, start + cfg.window);
    }
    if (cfg.listen_po) {
      out.push_back(Listen{po, kSlotLength, Purpose::Data, KindSet{MessageKind::SlData}, false, po + s.peer_delay});
    }
    out.push_back(SetTimer{TimerKind::WindowEnd, end});
    ++s.windows_opened;
  }

  void respond(SimTime now) {
    Message rsp{MessageKind::TimeRsp, cfg.self, s.requester, payload(cfg.self, cfg.imsi, now, cfg.sl_drx_cycle),
                cfg.t_rsp, false, 0};
    out.push_back(Transmit{rsp, now, Duration::zero()});
    out.push_back(Record{OutcomeKind::ResponseSent, s.requester, 0, 0});
    if (!cfg.expect_data) {
      s.phase = DstPhase::Listening;
      return;
    }
    const SimTime at = now + cfg.t_rsp + cfg.data_gap;
    out.push_back(Listen{at, cfg.data_len, Purpose::Data, KindSet{MessageKind::SlData}, false, at});
    out.push_back(SetTimer{TimerKind::DataTimeout, at + cfg.data_len + cfg.response_guard});
    s.phase = DstPhase::AwaitData;
  }

  void on_slss(const MessageReceived& m) {
    if (!slss_matches(m.msg, cfg.self)) {
      out.push_back(Record{OutcomeKind::FalseAlarmRejected, m.msg.src, 0, 0});
      return;
    }
    if (s.phase != DstPhase::Listening) return;  // busy with an exchange
    if (cfg.handshake == Handshake::SlssOnly) {
      const Duration delay = cfg.ranging && m.delay_estimate ? *m.delay_estimate : Duration::zero();
      const Duration adjust = (m.msg.timing->sender_local - m.rx_start) + delay;
      out.push_back(ResyncClock{adjust});
      s.peer_delay = delay;
      const auto attempts = static_cast<int>(s.windows_opened - s.windows_at_last_sync);
      s.windows_at_last_sync = s.windows_opened;
      out.push_back(Record{OutcomeKind::SyncAchieved, m.msg.src, attempts, 0});
      if (cfg.expect_data) {
        const SimTime now = m.now + adjust;
        const SimTime expected = m.rx_start + adjust + m.msg.on_air;
        out.push_back(Listen{now, (expected + cfg.data_len) - now, Purpose::Data, KindSet{MessageKind::SlData}, false,
                             expected});
        out.push_back(SetTimer{TimerKind::DataTimeout, expected + cfg.data_len + cfg.response_guard});
        s.requester = m.msg.src;
        s.phase = DstPhase::AwaitData;
      }
      return;
    }
    if (cfg.handshake != Handshake::TimeRequest) return;
    s.requester = m.msg.src;
    if (m.msg.carries_request) {
      respond(m.now);
      return;
    }
    out.push_back(Listen{m.now, cfg.t_req, Purpose::Sync, KindSet{MessageKind::TimeReq}, false, std::nullopt});
    out.push_back(SetTimer{TimerKind::RequestTimeout, m.now + cfg.t_req + cfg.response_guard});
    s.phase = DstPhase::AwaitReq;
  }

  void on_message(const MessageReceived& m, const Event& e) {
    if (s.phase == DstPhase::Off) bad(e);
    switch (m.msg.kind) {
      case MessageKind::Slss: on_slss(m); return;
      case MessageKind::TimeReq:
        if (s.phase != DstPhase::AwaitReq) bad(e);
        if ((m.msg.dst && *m.msg.dst != cfg.self) || m.msg.src != s.requester) return;
        out.push_back(CancelTimer{TimerKind::RequestTimeout});
        respond(m.now);
        return;
      case MessageKind::SlData:
        if (m.msg.dst && *m.msg.dst != cfg.self) return;
        if (s.phase == DstPhase::AwaitData) {
          out.push_back(CancelTimer{TimerKind::DataTimeout});
          s.phase = DstPhase::Listening;
        }
        out.push_back(Record{OutcomeKind::DataReceived, m.msg.src, 0, m.msg.data_seq});
        return;
      case MessageKind::TimeRsp: bad(e);
    }
  }

  void on_timer(const TimerFired& t, const Event& e) {
    switch (t.kind) {
      case TimerKind::Boot:
        if (s.phase != DstPhase::Off) bad(e);
        s.phase = DstPhase::Listening;
        schedule_window(t.now);
        return;
      case TimerKind::WindowEnd:
        if (s.phase == DstPhase::Off) bad(e);
        schedule_window(t.now);
        return;
      case TimerKind::RequestTimeout:
        if (s.phase != DstPhase::AwaitReq) bad(e);
        out.push_back(Record{OutcomeKind::RequestMissed, s.requester, 0, 0});
        s.phase = DstPhase::Listening;
        return;
      case TimerKind::DataTimeout:
        if (s.phase != DstPhase::AwaitData) bad(e);
        out.push_back(Record{OutcomeKind::DataMissed, s.requester, 0, 0});
        s.phase = DstPhase::Listening;
        return;
      default:
        bad(e);
    }
  }

  void run(const Event& e) {
    std::visit(overloaded{
                   [&](const TimerFired& t) { on_timer(t, e); },
                   [&](const MessageReceived& m) { on_message(m, e); },
                   [&](const DataArrived&) { bad(e); },
               },
               e);
  }
};

// ---------------------------------------------------------------- beacons

struct TxBeaconStep {
  const TxBeaconConfig& cfg;
  TxBeaconState s;
  std::vector<Action> out;

  void run(const Event& e) {
    const auto* t = std::get_if<TimerFired>(&e);
    const bool ok = t && ((t->kind == TimerKind::Boot && s.phase == BeaconPhase::Off) ||
                          (t->kind == TimerKind::BeaconDue && s.phase == BeaconPhase::Active));
    if (!ok) violation("TxBeacon", to_string(s.phase), describe(e));
    s.phase = BeaconPhase::Active;
    const SimTime at = next_slot_start(cfg.schedule, t->now);
    Message slss{MessageKind::Slss, cfg.self, std::nullopt, payload(cfg.self, cfg.imsi, at, cfg.schedule.period),
                 cfg.t_ss, false, 0};
    out.push_back(Transmit{slss, at, Duration::zero()});
    out.push_back(SetTimer{TimerKind::BeaconDue, at + cfg.t_ss});
    ++s.sent;
  }
};

struct RxBeaconStep {
  const RxBeaconConfig& cfg;
  RxBeaconState s;
  std::vector<Action> out;

  [[noreturn]] void bad(const Event& e) { violation("RxBeacon", to_string(s.phase), describe(e)); }

  void respond(SimTime now) {
    Message rsp{MessageKind::TimeRsp, cfg.self, s.requester, payload(cfg.self, cfg.imsi, now), cfg.t_rsp, false, 0};
    out.push_back(Transmit{rsp, now, Duration::zero()});
    out.push_back(Record{OutcomeKind::ResponseSent, s.requester, 0, 0});
    ++s.answered;
    s.phase = BeaconPhase::Active;
  }

  void run(const Event& e) {
    if (const auto* t = std::get_if<TimerFired>(&e)) {
      if (t->kind == TimerKind::Boot && s.phase == BeaconPhase::Off) {
        s.phase = BeaconPhase::Active;
        out.push_back(Listen{t->now, std::nullopt, Purpose::Sync, KindSet{MessageKind::Slss}, false, std::nullopt});
        return;
      }
      if (t->kind == TimerKind::RequestTimeout && s.phase == BeaconPhase::AwaitReq) {
        out.push_back(Record{OutcomeKind::RequestMissed, s.requester, 0, 0});
        s.phase = BeaconPhase::Active;
        return;
      }
      bad(e);
    }
    const auto* m = std::get_if<MessageReceived>(&e);
    if (!m || s.phase == BeaconPhase::Off) bad(e);
    if (m->msg.kind == MessageKind::Slss) {
      if (!slss_matches(m->msg, cfg.self)) {
        out.push_back(Record{OutcomeKind::FalseAlarmRejected, m->msg.src, 0, 0});
        return;
      }
      if (s.phase != BeaconPhase::Active) return;
      s.requester = m->msg.src;
      if (m->msg.carries_request) {
        respond(m->now);
        return;
      }
      out.push_back(Listen{m->now, cfg.t_req, Purpose::Sync, KindSet{MessageKind::TimeReq}, false, std::nullopt});
      out.push_back(SetTimer{TimerKind::RequestTimeout, m->now + cfg.t_req + cfg.response_guard});
      s.phase = BeaconPhase::AwaitReq;
      return;
    }
    if (m->msg.kind == MessageKind::TimeReq && s.phase == BeaconPhase::AwaitReq) {
      if ((m->msg.dst && *m->msg.dst != cfg.self) || m->msg.src != s.requester) return;
      out.push_back(CancelTimer{TimerKind::RequestTimeout});
      respond(m->now);
      return;
    }
    bad(e);
  }
};

}  // namespace

// ---------------------------------------------------------------- names

std::string to_string(Role role) {
  switch (role) {
    case Role::FlexiSrc: return "FlexiSrc";
    case Role::FlexiDst: return "FlexiDst";
    case Role::TxBeacon: return "TxBeacon";
    case Role::RxBeacon: return "RxBeacon";
  }
  return "?";
}

std::string to_string(Handshake h) {
  switch (h) {
    case Handshake::Direct: return "direct";
    case Handshake::SlssOnly: return "slss_only";
    case Handshake::TimeRequest: return "time_request";
  }
  return "?";
}

std::string to_string(SrcPhase p) {
  switch (p) {
    case SrcPhase::Idle: return "Idle";
    case SrcPhase::Sweeping: return "Sweeping";
    case SrcPhase::Synced: return "Synced";
    case SrcPhase::SendingData: return "SendingData";
    case SrcPhase::Done: return "Done";
  }
  return "?";
}

std::string to_string(DstPhase p) {
  switch (p) {
    case DstPhase::Off: return "Off";
    case DstPhase::Listening: return "Listening";
    case DstPhase::AwaitReq: return "AwaitReq";
    case DstPhase::AwaitData: return "AwaitData";
  }
  return "?";
}

std::string to_string(BeaconPhase p) {
  switch (p) {
    case BeaconPhase::Off: return "Off";
    case BeaconPhase::Active: return "Active";
    case BeaconPhase::AwaitReq: return "AwaitReq";
  }
  return "?";
}

std::string to_string(TimerKind k) {
  switch (k) {
    case TimerKind::Boot: return "Boot";
    case TimerKind::WindowEnd: return "WindowEnd";
    case TimerKind::ResponseTimeout: return "ResponseTimeout";
    case TimerKind::RequestTimeout: return "RequestTimeout";
    case TimerKind::DataDone: return "DataDone";
    case TimerKind::DataTimeout: return "DataTimeout";
    case TimerKind::BeaconDue: return "BeaconDue";
  }
  return "?";
}

std::string to_string(Purpose p) { return p == Purpose::Sync ? "sync" : "data"; }

std::string to_string(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::SyncAchieved: return "SyncAchieved";
    case OutcomeKind::SyncFailed: return "SyncFailed";
    case OutcomeKind::FastPath: return "FastPath";
    case OutcomeKind::FalseAlarmRejected: return "FalseAlarmRejected";
    case OutcomeKind::ResponseSent: return "ResponseSent";
    case OutcomeKind::DataReceived: return "DataReceived";
    case OutcomeKind::DataDropped: return "DataDropped";
    case OutcomeKind::DataMissed: return "DataMissed";
    case OutcomeKind::RequestMissed: return "RequestMissed";
  }
  return "?";
}

// ---------------------------------------------------------------- validation

void SrcConfig::validate() const {
  require_positive(t_ss, "t_ss");
  require_positive(t_rsp, "t_rsp");
  require_positive(data_len, "data_len");
  if (!piggyback) require_positive(t_req, "t_req");
  require_non_negative(data_gap, "data_gap");
  require_non_negative(lead, "lead");
  require_non_negative(response_guard, "response_guard");
  if (handshake != Handshake::TimeRequest && !target) {
    throw std::invalid_argument("a sender without handshake needs the receiver's paging schedule");
  }
  const Duration turn = burst() + t_rsp + response_guard;
  if (target) {
    target->schedule.validate();
    if (target->window < kSlotLength) throw std::invalid_argument("receiver window must be at least one slot");
    if (!(target->alignment >= 0.0 && target->alignment <= 1.0)) throw std::invalid_argument("alignment out of [0,1]");
    if (handshake == Handshake::TimeRequest) {
      if (target->window < turn) throw std::invalid_argument("receiver window shorter than one request/response turn");
      if (sweep_span < target->window) throw std::invalid_argument("sweep span must cover one window");
    }
  } else {
    if (immediate_attempts < 1) throw std::invalid_argument("immediate_attempts must be at least 1");
    if (immediate_attempts > 1 && retry_gap < turn) throw std::invalid_argument("retry_gap shorter than one turn");
  }
  if (initial_coarse_error && *initial_coarse_error < Duration::zero()) {
    throw std::invalid_argument("initial coarse error must not be negative");
  }
  if (max_exchanges && *max_exchanges == 0) throw std::invalid_argument("max_exchanges must be positive");
}

void DstConfig::validate() const {
  schedule.validate();
  require_positive(t_rsp, "t_rsp");
  require_positive(t_req, "t_req");
  require_positive(data_len, "data_len");
  require_non_negative(data_gap, "data_gap");
  require_non_negative(response_guard, "response_guard");
  if (handshake != Handshake::Direct) {
    if (window < kSlotLength) throw std::invalid_argument("SSW must be at least one slot");
    if (window > schedule.period) throw std::invalid_argument("SSW longer than its period");
    window_lead(window, kSlotLength, alignment);
  }
}

void TxBeaconConfig::validate() const {
  schedule.validate();
  require_positive(t_ss, "t_ss");
  if (schedule.period <= t_ss) throw std::invalid_argument("beacon period must exceed t_ss");
}

void RxBeaconConfig::validate() const {
  require_positive(t_req, "t_req");
  require_positive(t_rsp, "t_rsp");
  require_non_negative(response_guard, "response_guard");
}

Role role_of(const RoleConfig& config) {
  return std::visit(overloaded{
                        [](const SrcConfig&) { return Role::FlexiSrc; },
                        [](const DstConfig&) { return Role::FlexiDst; },
                        [](const TxBeaconConfig&) { return Role::TxBeacon; },
                        [](const RxBeaconConfig&) { return Role::RxBeacon; },
                    },
                    config);
}

DeviceId self_of(const RoleConfig& config) {
  return std::visit([](const auto& c) { return c.self; }, config);
}

RoleState initial_state(const RoleConfig& config) {
  return std::visit(overloaded{
                        [](const SrcConfig&) -> RoleState { return SrcState{}; },
                        [](const DstConfig&) -> RoleState { return DstState{}; },
                        [](const TxBeaconConfig&) -> RoleState { return TxBeaconState{}; },
                        [](const RxBeaconConfig&) -> RoleState { return RxBeaconState{}; },
                    },
                    config);
}

std::string phase_name(const RoleState& state) {
  return std::visit([](const auto& s) { return to_string(s.phase); }, state);
}

StepResult step(const RoleConfig& config, const RoleState& state, const Event& event) {
  if (config.index() != state.index()) throw std::invalid_argument("role state does not match its config");
  return std::visit(
      overloaded{
          [&](const SrcConfig& c) {
            SrcStep st{c, std::get<SrcState>(state), {}};
            st.run(event);
            return StepResult{std::move(st.s), std::move(st.out)};
          },
          [&](const DstConfig& c) {
            DstStep st{c, std::get<DstState>(state), {}};
            st.run(event);
            return StepResult{std::move(st.s), std::move(st.out)};
          },
          [&](const TxBeaconConfig& c) {
            TxBeaconStep st{c, std::get<TxBeaconState>(state), {}};
            st.run(event);
            return StepResult{std::move(st.s), std::move(st.out)};
          },
          [&](const RxBeaconConfig& c) {
            RxBeaconStep st{c, std::get<RxBeaconState>(state), {}};
            st.run(event);
            return StepResult{std::move(st.s), std::move(st.out)};
          },
      },
      config);
}

}  // namespace sidesync::protocol
