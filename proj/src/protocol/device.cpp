#include "sidesync/protocol/device.hpp"

#include <stdexcept>

#include "sidesync/protocol/paging.hpp"

namespace sidesync::protocol {

std::string to_string(Coverage c) {
  switch (c) {
    case Coverage::HC: return "HC";
    case Coverage::OOC: return "OOC";
    case Coverage::PC: return "PC";
    case Coverage::COOS: return "COOS";
  }
  return "?";
}

Coverage parse_coverage(std::string_view name) {
  for (auto c : {Coverage::HC, Coverage::OOC, Coverage::PC, Coverage::COOS}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown coverage '" + std::string(name) + "'");
}

void DeviceConfig::validate() const {
  radio.validate();
  if (sl_drx_cycle < kSlotLength || sl_drx_cycle.ns() % kSlotLength.ns() != 0) {
    throw std::invalid_argument("sl_drx_cycle must be a positive whole number of milliseconds");
  }
  if (clock.initial_offset && *clock.initial_offset < Duration::zero()) {
    throw std::invalid_argument("initial clock offset must not be negative");
  }
  if (clock.drift && clock.drift->abs().ppb() >= 1'000'000'000) throw std::invalid_argument("drift out of range");
  if (coarse_sync_error && *coarse_sync_error < Duration::zero()) {
    throw std::invalid_argument("coarse sync error must not be negative");
  }
}

}  // namespace sidesync::protocol
