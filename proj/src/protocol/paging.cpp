#include "sidesync/protocol/paging.hpp"

#include <cmath>
#include <stdexcept>

namespace sidesync::protocol {

void SlotSchedule::validate() const {
  if (period <= Duration::zero()) throw std::invalid_argument("slot period must be positive");
  if (anchor < Duration::zero() || anchor >= period) throw std::invalid_argument("slot anchor must lie in [0, period)");
}

SlotSchedule paging_schedule(Imsi imsi, Duration sl_drx_cycle) {
  if (sl_drx_cycle < kSlotLength || sl_drx_cycle.ns() % kSlotLength.ns() != 0) {
    throw std::invalid_argument("SL-DRX cycle must be a positive whole number of milliseconds");
  }
  const auto slots = static_cast<std::uint64_t>(sl_drx_cycle.ns() / kSlotLength.ns());
  const auto index = static_cast<std::int64_t>(raw(imsi) % slots);
  return {sl_drx_cycle, kSlotLength * index};
}

SimTime next_slot_start(const SlotSchedule& schedule, SimTime after) {
  schedule.validate();
  const SimTime first = SimTime::zero() + schedule.anchor;
  if (after < first) return first;
  const std::int64_t k = (after - first).ns() / schedule.period.ns() + 1;
  return first + schedule.period * k;
}

SimTime slot_at_or_after(const SlotSchedule& schedule, SimTime t) {
  if (t == SimTime::zero()) {
    schedule.validate();
    return SimTime::zero() + schedule.anchor;
  }
  return next_slot_start(schedule, t - Duration::from_ns(1));
}

ScheduleSlot next_sl_po(Imsi imsi, Duration sl_drx_cycle, SimTime after_local) {
  return {SlotKind::SlPo, next_slot_start(paging_schedule(imsi, sl_drx_cycle), after_local), kSlotLength};
}

Duration window_lead(Duration t_win, Duration slot_length, double alignment) {
  if (!(alignment >= 0.0 && alignment <= 1.0)) throw std::invalid_argument("alignment must lie in [0, 1]");
  if (t_win < slot_length) throw std::invalid_argument("window must be at least as long as its slot");
  const double free_ns = static_cast<double>((t_win - slot_length).ns());
  return Duration::from_ns(std::llround(alignment * free_ns));
}

ScheduleSlot ssw_for_po(const ScheduleSlot& po, Duration t_win, double alignment) {
  if (t_win < kSlotLength) throw std::invalid_argument("t_win must be at least one slot");
  const Duration lead = window_lead(t_win, po.length, alignment);
  if (po.start.since_epoch() < lead) throw std::invalid_argument("sync window would start before the epoch");
  return {SlotKind::Ssw, po.start - lead, t_win};
}

double expected_attempts(Duration sl_drx_cycle, Duration t_win) {
  if (t_win < kSlotLength || t_win > sl_drx_cycle) throw std::invalid_argument("expected_attempts requires 1 ms <= t_win <= cycle");
  return (static_cast<double>(ceil_div(sl_drx_cycle, t_win)) + 1.0) / 2.0;
}

SimTime SweepPlan::candidate(int attempt) const {
  if (attempt < 1 || attempt > max_attempts) throw std::out_of_range("sweep attempt out of range");
  return first + step * (attempt - 1);
}

SweepPlan cold_start_sweep(SimTime origin, Duration sl_drx_cycle, Duration ssw_length) {
  if (ssw_length <= Duration::zero() || ssw_length > sl_drx_cycle) throw std::invalid_argument("SSW must fit in the cycle");
  return {origin, ssw_length, static_cast<int>(ceil_div(sl_drx_cycle, ssw_length))};
}

SweepPlan coarse_sweep(SimTime predicted_centre, Duration span, Duration ssw_length, Duration burst) {
  if (ssw_length <= Duration::zero() || span < ssw_length) throw std::invalid_argument("sweep span must hold at least one SSW");
  const auto tiles = ceil_div(span, ssw_length);
  const Duration inset = burst < ssw_length ? (ssw_length - burst) / 2 : Duration::zero();
  const Duration back = (ssw_length * tiles) / 2;
  if (predicted_centre.since_epoch() < back) throw std::invalid_argument("sweep would start before the epoch");
  return {predicted_centre - back + inset, ssw_length, static_cast<int>(tiles)};
}

bool intervals_overlap(SimTime a_start, Duration a_len, SimTime b_start, Duration b_len) {
  return a_start < b_start + b_len && b_start < a_start + a_len;
}

}  // namespace sidesync::protocol
