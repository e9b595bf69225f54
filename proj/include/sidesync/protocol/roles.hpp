#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sidesync/protocol/ids.hpp"
#include "sidesync/protocol/message.hpp"
#include "sidesync/protocol/paging.hpp"
#include "sidesync/timebase.hpp"

// Pure transition functions for the four device roles. All times seen and
// produced here are in the owning device's local clock; the simulator maps
// them to global time.
namespace sidesync::protocol {

class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Role { FlexiSrc, FlexiDst, TxBeacon, RxBeacon };

std::string to_string(Role role);

/// How a sender obtains timing before sending data.
///  Direct:      no sync signalling, data straight on the PO (legacy).
///  SlssOnly:    SLSS on the PO followed by data; the receiver resyncs from it.
///  TimeRequest: SLSS + TimeREQ until a TimeRSP arrives, then data.
enum class Handshake { Direct, SlssOnly, TimeRequest };

std::string to_string(Handshake h);

/// What the sender knows about where the receiver listens.
struct PagingTarget {
  DeviceId id{};
  SlotSchedule schedule{};  ///< receiver POs in the sender's local frame (as believed)
  Duration window{};        ///< receiver SSW length
  double alignment = 0.5;

  bool operator==(const PagingTarget&) const = default;
};

struct SrcConfig {
  DeviceId self{};
  Imsi imsi{};
  /// Absent: the peer listens all the time (RX beacon), attempts start at once.
  std::optional<PagingTarget> target;
  bool dst_identity_known = true;
  Handshake handshake = Handshake::TimeRequest;
  bool piggyback = false;
  bool send_data = true;
  /// Treat the link as fine-synced whenever peer timing is present.
  bool assume_fine = false;

  Duration t_ss = Duration::from_ms(1);
  Duration t_req = Duration::from_ms(1);
  Duration t_rsp = Duration::from_ms(1);
  Duration data_len = Duration::from_ms(1);
  Duration data_gap = Duration::from_ms(1);
  /// Minimum distance between an event and the first transmission it causes.
  Duration lead = Duration::from_ms(1);
  /// Extra listen time after the TimeRSP slot before giving up on an attempt.
  Duration response_guard = Duration::from_us(100);
  /// Width of a coarse-timing sweep; one SSW per attempt.
  Duration sweep_span = Duration::from_ms(72);
  /// Spacing and count of attempts towards an always-listening peer.
  Duration retry_gap = Duration::from_ms(5);
  int immediate_attempts = 1;

  /// Used to decide whether remembered peer timing is still fine.
  Drift x_src{};
  Drift x_dst{};
  Duration t_cp = kNormalCyclicPrefix;
  Duration t_slsw = kLegacySyncWindow;
  /// Present: the device starts coarse-synced to the target with this residual.
  std::optional<Duration> initial_coarse_error;
  std::optional<std::uint64_t> max_exchanges;

  Duration burst() const { return piggyback ? t_ss : t_ss + t_req; }
  void validate() const;
  bool operator==(const SrcConfig&) const = default;
};

struct DstConfig {
  DeviceId self{};
  Imsi imsi{};
  SlotSchedule schedule{};
  Duration sl_drx_cycle = Duration::from_ms(1280);
  Handshake handshake = Handshake::TimeRequest;
  Duration window = Duration::from_ms(72);
  double alignment = 0.5;
  bool listen_po = true;
  bool expect_data = true;
  /// Apply the reported propagation delay when resyncing from an SLSS.
  bool ranging = false;

  Duration t_req = Duration::from_ms(1);
  Duration t_rsp = Duration::from_ms(1);
  Duration data_len = Duration::from_ms(1);
  Duration data_gap = Duration::from_ms(1);
  Duration response_guard = Duration::from_us(100);

  void validate() const;
  bool operator==(const DstConfig&) const = default;
};

struct TxBeaconConfig {
  DeviceId self{};
  Imsi imsi{};
  SlotSchedule schedule{};  ///< one SLSS per period
  Duration t_ss = Duration::from_ms(1);

  void validate() const;
  bool operator==(const TxBeaconConfig&) const = default;
};

struct RxBeaconConfig {
  DeviceId self{};
  Imsi imsi{};
  Duration t_req = Duration::from_ms(1);
  Duration t_rsp = Duration::from_ms(1);
  Duration response_guard = Duration::from_us(100);

  void validate() const;
  bool operator==(const RxBeaconConfig&) const = default;
};

using RoleConfig = std::variant<SrcConfig, DstConfig, TxBeaconConfig, RxBeaconConfig>;

Role role_of(const RoleConfig& config);
DeviceId self_of(const RoleConfig& config);

// ---- state ----

struct PeerTiming {
  DeviceId peer{};
  SimTime synced_at{};  ///< local time of the last resync to this peer
  Duration residual{};  ///< error left right after that resync
  Duration delay{};     ///< one-way propagation estimate, used as timing advance

  bool operator==(const PeerTiming&) const = default;
};

enum class SrcPhase { Idle, Sweeping, Synced, SendingData, Done };
std::string to_string(SrcPhase p);

struct SrcState {
  SrcPhase phase = SrcPhase::Idle;
  bool booted = false;
  int attempt = 0;
  SweepPlan plan{};
  std::optional<PeerTiming> peer;
  std::optional<std::uint64_t> current;
  std::deque<std::uint64_t> pending;
  std::uint64_t exchanges = 0;

  bool operator==(const SrcState&) const = default;
};

enum class DstPhase { Off, Listening, AwaitReq, AwaitData };
std::string to_string(DstPhase p);

struct DstState {
  DstPhase phase = DstPhase::Off;
  std::optional<DeviceId> requester;
  Duration peer_delay{};
  std::uint64_t windows_opened = 0;
  std::uint64_t windows_at_last_sync = 0;

  bool operator==(const DstState&) const = default;
};

enum class BeaconPhase { Off, Active, AwaitReq };
std::string to_string(BeaconPhase p);

struct TxBeaconState {
  BeaconPhase phase = BeaconPhase::Off;
  std::uint64_t sent = 0;

  bool operator==(const TxBeaconState&) const = default;
};

struct RxBeaconState {
  BeaconPhase phase = BeaconPhase::Off;
  std::optional<DeviceId> requester;
  std::uint64_t answered = 0;

  bool operator==(const RxBeaconState&) const = default;
};

using RoleState = std::variant<SrcState, DstState, TxBeaconState, RxBeaconState>;

RoleState initial_state(const RoleConfig& config);
std::string phase_name(const RoleState& state);

// ---- events ----

enum class TimerKind : std::uint8_t { Boot, WindowEnd, ResponseTimeout, RequestTimeout, DataDone, DataTimeout, BeaconDue };
std::string to_string(TimerKind k);

struct TimerFired {
  TimerKind kind = TimerKind::Boot;
  SimTime now{};
};

struct MessageReceived {
  Message msg;
  SimTime rx_start{};  ///< local time the first symbol arrived
  SimTime now{};       ///< local time reception completed
  /// True propagation delay, supplied only when ranging is available.
  std::optional<Duration> delay_estimate;
};

struct DataArrived {
  SimTime now{};
  std::uint64_t seq = 0;
};

using Event = std::variant<TimerFired, MessageReceived, DataArrived>;

// ---- actions ----

enum class Purpose : std::uint8_t { Sync, Data };
std::string to_string(Purpose p);

struct Transmit {
  Message msg;
  SimTime at{};
  /// Sent this much earlier than `at` so it lands at `at` in the peer's frame.
  Duration timing_advance{};
};

struct Listen {
  SimTime start{};
  std::optional<Duration> length;  ///< absent: until replaced
  Purpose purpose = Purpose::Sync;
  KindSet accepts{};
  /// Own transmissions inside the window push its end back by their length.
  bool extend_on_tx = false;
  /// SLData is only decodable if it starts within t_cp of this instant.
  std::optional<SimTime> expected_arrival;
};

struct SetTimer {
  TimerKind kind = TimerKind::Boot;
  SimTime at{};
};

struct CancelTimer {
  TimerKind kind = TimerKind::Boot;
};

struct ResyncClock {
  Duration adjustment{};  ///< added to the local clock
};

/// Drop all open listen windows.
struct Sleep {};

enum class OutcomeKind {
  SyncAchieved,
  SyncFailed,
  FastPath,
  FalseAlarmRejected,
  ResponseSent,
  DataReceived,
  DataDropped,
  DataMissed,
  RequestMissed,
};
std::string to_string(OutcomeKind k);

struct Record {
  OutcomeKind kind = OutcomeKind::SyncAchieved;
  std::optional<DeviceId> peer;
  int attempts = 0;
  std::uint64_t data_seq = 0;
};

using Action = std::variant<Transmit, Listen, SetTimer, CancelTimer, ResyncClock, Sleep, Record>;

struct StepResult {
  RoleState state;
  std::vector<Action> actions;
};

/// Deterministic transition. Throws ProtocolViolation for an event the
/// current phase cannot accept and std::invalid_argument when config and
/// state belong to different roles.
StepResult step(const RoleConfig& config, const RoleState& state, const Event& event);

}  // namespace sidesync::protocol
