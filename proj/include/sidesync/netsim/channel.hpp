#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sidesync/protocol/ids.hpp"
#include "sidesync/protocol/message.hpp"
#include "sidesync/timebase.hpp"

namespace sidesync::netsim {

using protocol::DeviceId;

struct Position {
  double x = 0.0;  // m
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

double distance(Position a, Position b);

/// Geometric channel: a link exists iff the devices are within comm_range,
/// and its delay is the time of flight rounded to 1 ns.
struct ChannelModel {
  std::map<DeviceId, Position> positions;
  double comm_range_m = 10'000.0;

  void validate() const;
  /// Propagation delay, or nullopt when out of range. Throws
  /// std::out_of_range for unregistered devices.
  std::optional<Duration> link_delay(DeviceId a, DeviceId b) const;
};

struct Delivery {
  DeviceId to{};
  SimTime arrival{};  ///< global time the first symbol reaches `to`
  Duration delay{};
  double distance_m = 0.0;
};

/// Arrivals of a transmission at every other in-range device, in device id
/// order. Whether anyone is listening is decided by the receiver.
std::vector<Delivery> deliver(const ChannelModel& channel, DeviceId sender, const protocol::Message& msg,
                              SimTime tx_start);

enum class CollisionPolicy { AllLost, CaptureStrongest };

struct Arrival {
  SimTime start{};
  SimTime end{};
  double distance_m = 0.0;
};

/// Survival of each arrival at one receiver. AllLost drops anything that
/// overlaps another arrival; CaptureStrongest keeps an arrival only if it is
/// strictly closer than everything it overlaps.
std::vector<bool> detect_collision(const std::vector<Arrival>& arrivals, CollisionPolicy policy);

}  // namespace sidesync::netsim
