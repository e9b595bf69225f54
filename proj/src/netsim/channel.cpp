#include "sidesync/netsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace sidesync::netsim {

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ChannelModel::validate() const {
  if (!(comm_range_m >= 0.0) || !std::isfinite(comm_range_m)) throw std::invalid_argument("comm_range must be finite and non-negative");
  for (const auto& [id, p] : positions) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("device position must be finite");
  }
}

std::optional<Duration> ChannelModel::link_delay(DeviceId a, DeviceId b) const {
  const double d = distance(positions.at(a), positions.at(b));
  if (d > comm_range_m) return std::nullopt;
  return time_of_flight(d);
}

std::vector<Delivery> deliver(const ChannelModel& channel, DeviceId sender, const protocol::Message& msg,
                              SimTime tx_start) {
  msg.validate();
  const Position from = channel.positions.at(sender);
  std::vector<Delivery> out;
  for (const auto& [id, pos] : channel.positions) {
    if (id == sender) continue;
    const double d = distance(from, pos);
    if (d > channel.comm_range_m) continue;
    const Duration delay = time_of_flight(d);
    out.push_back({id, tx_start + delay, delay, d});
  }
  return out;
}

std::vector<bool> detect_collision(const std::vector<Arrival>& arrivals, CollisionPolicy policy) {
  std::vector<bool> ok(arrivals.size(), true);
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    for (std::size_t j = 0; j < arrivals.size(); ++j) {
      if (i == j) continue;
      const auto& a = arrivals[i];
      const auto& b = arrivals[j];
      if (!(a.start < b.end && b.start < a.end)) continue;
      if (policy == CollisionPolicy::AllLost || !(a.distance_m < b.distance_m)) {
        ok[i] = false;
        break;
      }
    }
  }
  return ok;
}

}  // namespace sidesync::netsim
