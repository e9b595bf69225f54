#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sidesync/power_model.hpp"
#include "sidesync/protocol/ids.hpp"
#include "sidesync/timebase.hpp"

namespace sidesync::protocol {

enum class Coverage { HC, OOC, PC, COOS };

std::string to_string(Coverage c);
Coverage parse_coverage(std::string_view name);

/// Clock parameters of a device. Unset fields are drawn by the scenario
/// builder from the run's seed.
struct ClockParams {
  std::optional<Duration> initial_offset;
  std::optional<Drift> drift;

  bool operator==(const ClockParams&) const = default;
};

struct DeviceConfig {
  DeviceId id{};
  Imsi imsi{};
  power::PowerClassId power_class = power::PowerClassId::PC1;
  power::RadioPowerProfile radio{};
  ClockParams clock{};
  Duration sl_drx_cycle = Duration::from_ms(1280);
  Coverage coverage = Coverage::OOC;
  /// Residual error of a coarse sync source, when the device has one.
  std::optional<Duration> coarse_sync_error;

  /// Throws std::invalid_argument.
  void validate() const;
  bool operator==(const DeviceConfig&) const = default;
};

}  // namespace sidesync::protocol
