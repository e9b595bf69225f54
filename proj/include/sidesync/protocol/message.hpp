#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>

#include "sidesync/protocol/ids.hpp"
#include "sidesync/timebase.hpp"

namespace sidesync::protocol {

enum class MessageKind : std::uint8_t { Slss, TimeReq, TimeRsp, SlData };

std::string to_string(MessageKind kind);

/// Small set of message kinds, used by listen windows to say what they decode.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<MessageKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }
  constexpr bool contains(MessageKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool operator==(const KindSet&) const = default;

 private:
  static constexpr std::uint8_t bit(MessageKind k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

/// Timing carried in SLSS and TimeRSP: the sender's local time at the start
/// of the transmission plus, when known, its paging descriptor.
struct TimingPayload {
  SimTime sender_local{};
  DeviceId sender{};
  std::optional<Imsi> sender_imsi;
  std::optional<Duration> sl_drx_cycle;

  bool operator==(const TimingPayload&) const = default;
};

struct Message {
  MessageKind kind = MessageKind::Slss;
  DeviceId src{};
  std::optional<DeviceId> dst;  ///< absent for broadcast
  std::optional<TimingPayload> timing;
  Duration on_air{};
  bool carries_request = false;  ///< SLSS with a piggybacked TimeREQ
  std::uint64_t data_seq = 0;

  /// Throws std::invalid_argument on a malformed message.
  void validate() const;
  bool operator==(const Message&) const = default;
};

/// Pseudo-unique SLSS filter: broadcast SLSS match everyone, addressed SLSS
/// only their destination. Throws std::invalid_argument for non-SLSS input.
bool slss_matches(const Message& msg, DeviceId expected_dst);

}  // namespace sidesync::protocol
