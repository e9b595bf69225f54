#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sidesync/power_model.hpp"
#include "sidesync/timebase.hpp"

namespace sidesync::netsim {

/// Radio states in ascending priority. When intervals overlap, the device
/// is charged for the highest one; Busy means the radio is lent to the
/// primary RAT and is not charged to sidelink operation.
enum class RadioState : std::uint8_t { Sleep, RxData, RxSync, Busy, TxData, TxSync };
inline constexpr std::size_t kRadioStates = 6;

std::string to_string(RadioState s);

struct Segment {
  SimTime start{};
  SimTime end{};
  RadioState state = RadioState::Sleep;

  bool operator==(const Segment&) const = default;
};

struct Dwell {
  std::array<std::int64_t, kRadioStates> ns{};

  std::int64_t of(RadioState s) const { return ns[static_cast<std::size_t>(s)]; }
  std::int64_t tx() const { return of(RadioState::TxSync) + of(RadioState::TxData); }
  std::int64_t rx() const { return of(RadioState::RxSync) + of(RadioState::RxData); }
  std::int64_t total() const;
};

struct EnergyReport {
  Dwell dwell;
  double joules_tx = 0.0;
  double joules_rx = 0.0;
  double joules_sleep = 0.0;
  double joules_tx_sync = 0.0;
  double joules_rx_sync = 0.0;
  std::vector<Segment> timeline;  ///< filled only on request

  double joules_total() const { return joules_tx + joules_rx + joules_sleep; }
  double joules_sync() const { return joules_tx_sync + joules_rx_sync; }
};

/// Activity intervals of one device, settled into integer-ns dwell times
/// over [0, horizon) once the run is over.
class EnergyLedger {
 public:
  /// Empty and inverted intervals are ignored.
  void add(RadioState state, SimTime start, SimTime end);
  const std::vector<Segment>& raw() const { return raw_; }

  EnergyReport settle(const power::RadioPowerProfile& profile, Duration horizon, bool keep_timeline = false) const;

 private:
  std::vector<Segment> raw_;
};

enum class PowerComponent { Tx, Rx, Sleep, Total, Sync };

/// joules / horizon for one component.
double ledger_power(const EnergyReport& report, PowerComponent component, Duration horizon);

}  // namespace sidesync::netsim
