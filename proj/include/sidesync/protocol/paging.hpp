#pragma once

#include <cstdint>

#include "sidesync/protocol/ids.hpp"
#include "sidesync/timebase.hpp"

namespace sidesync::protocol {

inline constexpr Duration kSlotLength = Duration::from_ms(1);

/// Periodic slots at local times t with t ≡ anchor (mod period).
struct SlotSchedule {
  Duration period{};
  Duration anchor{};

  void validate() const;
  bool operator==(const SlotSchedule&) const = default;
};

/// SL-PO pattern of a device: the millisecond index of each paging occasion
/// is congruent to the IMSI modulo the cycle length in milliseconds.
SlotSchedule paging_schedule(Imsi imsi, Duration sl_drx_cycle);

/// Start of the first slot strictly after `after`.
SimTime next_slot_start(const SlotSchedule& schedule, SimTime after);

/// Start of the first slot at or after `t`.
SimTime slot_at_or_after(const SlotSchedule& schedule, SimTime t);

enum class SlotKind { SlPo, Ssw };

struct ScheduleSlot {
  SlotKind kind = SlotKind::SlPo;
  SimTime start{};
  Duration length{};

  SimTime end() const { return start + length; }
  bool operator==(const ScheduleSlot&) const = default;
};

/// Earliest 1 ms paging occasion starting strictly after `after_local`.
/// Consecutive results are exactly one cycle apart.
ScheduleSlot next_sl_po(Imsi imsi, Duration sl_drx_cycle, SimTime after_local);

/// Sync window of length t_win placed so that the PO sits at `alignment`
/// of the free space: 0 puts the PO first, 0.5 centres it, 1 puts it last.
ScheduleSlot ssw_for_po(const ScheduleSlot& po, Duration t_win, double alignment = 0.5);

/// Distance from a window's start to the start of the slot it was built around.
Duration window_lead(Duration t_win, Duration slot_length, double alignment);

/// Mean number of sweep attempts for a uniformly random DST phase:
/// (ceil(cycle / t_win) + 1) / 2.
double expected_attempts(Duration sl_drx_cycle, Duration t_win);

/// Candidate transmission instants of a sweep: first + (k − 1)·step for
/// k = 1..max_attempts.
struct SweepPlan {
  SimTime first{};
  Duration step{};
  int max_attempts = 1;

  SimTime candidate(int attempt) const;
  bool operator==(const SweepPlan&) const = default;
};

/// Sweep with no timing knowledge: one window length per attempt until a
/// whole cycle is covered.
SweepPlan cold_start_sweep(SimTime origin, Duration sl_drx_cycle, Duration ssw_length);

/// Sweep across `span` centred on a predicted SSW centre, one SSW per
/// attempt, each burst centred in its tile.
SweepPlan coarse_sweep(SimTime predicted_centre, Duration span, Duration ssw_length, Duration burst);

/// True when [a_start, a_start + a_len) and [b_start, b_start + b_len) share
/// a point of positive measure.
bool intervals_overlap(SimTime a_start, Duration a_len, SimTime b_start, Duration b_len);

}  // namespace sidesync::protocol
