#include "sidesync/timebase.hpp"

#include <cmath>
#include <limits>

namespace sidesync {

namespace {

constexpr std::int64_t kPpbScale = 1'000'000'000;

std::int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw TimeOverflow("time value out of range");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t round_to_int64(double v, const char* what) {
  if (!std::isfinite(v) || std::fabs(v) >= 9.2e18) throw TimeOverflow(what);
  return static_cast<std::int64_t>(std::llround(v));
}

}  // namespace

Duration Duration::from_seconds(double s) { return Duration{round_to_int64(s * 1e9, "duration out of range")}; }

std::int64_t ceil_div(Duration d, Duration step) {
  if (d.ns() <= 0 || step.ns() <= 0) throw std::invalid_argument("ceil_div requires positive durations");
  return (d.ns() + step.ns() - 1) / step.ns();
}

Drift Drift::from_ppm(double ppm) { return Drift{round_to_int64(ppm * 1e3, "drift out of range")}; }

Duration Drift::apply(Duration elapsed) const {
  const __int128 scaled = static_cast<__int128>(elapsed.ns()) * ppb_;
  return Duration::from_ns(narrow(scaled / kPpbScale));
}

DriftingClock::DriftingClock(Duration offset_at_last_sync, Drift drift, SimTime last_sync)
    : offset_(offset_at_last_sync), drift_(drift), last_sync_(last_sync) {
  if (drift.abs().ppb() >= kPpbScale) throw std::invalid_argument("clock drift must be below 1e6 ppm");
}

SimTime DriftingClock::local_time(SimTime now) const {
  const Duration elapsed = now - last_sync_;
  const std::int64_t local = detail::checked_add(detail::checked_add(now.ns(), offset_.ns()), drift_.apply(elapsed).ns());
  if (local < 0) throw TimeOverflow("local clock reading is negative");
  return SimTime::from_ns(local);
}

Duration DriftingClock::offset_at(SimTime now) const { return local_time(now) - now; }

void DriftingClock::resync(SimTime now, Duration new_offset) {
  offset_ = new_offset;
  last_sync_ = now;
}

SimTime DriftingClock::global_time_for(SimTime local) const {
  // Invert the affine map, then walk the last few nanoseconds lost to truncation.
  const __int128 rel = static_cast<__int128>(local.ns()) - offset_.ns() - last_sync_.ns();
  const __int128 guess = static_cast<__int128>(last_sync_.ns()) + rel * kPpbScale / (kPpbScale + drift_.ppb());
  std::int64_t g = guess < 0 ? 0 : narrow(guess);
  auto reading = [this](std::int64_t t) -> __int128 {
    const __int128 elapsed = static_cast<__int128>(t) - last_sync_.ns();
    return static_cast<__int128>(t) + offset_.ns() + elapsed * drift_.ppb() / kPpbScale;
  };
  const __int128 target = local.ns();
  while (reading(g) < target) ++g;
  while (g > 0 && reading(g - 1) >= target) --g;
  return SimTime::from_ns(g);
}

SimTime local_time(const DriftingClock& clock, SimTime now) { return clock.local_time(now); }

Duration sync_offset(const DriftingClock& a, const DriftingClock& b, SimTime t) {
  return (a.local_time(t) - b.local_time(t)).abs();
}

void SyncBudget::validate() const {
  if (eps_coarse < Duration::zero() || t_coarse < Duration::zero() || t_d < Duration::zero() ||
      t_cp < Duration::zero() || t_slsw < Duration::zero()) {
    throw std::invalid_argument("sync budget durations must be non-negative");
  }
  if (x_src.ppb() < 0 || x_dst.ppb() < 0) throw std::invalid_argument("clock inaccuracies must be non-negative");
  if (t_cp > t_slsw) throw std::invalid_argument("t_cp must not exceed t_slsw");
}

Duration total_sync_error(const SyncBudget& budget) {
  budget.validate();
  return budget.eps_coarse + budget.x_src.apply(budget.t_coarse) + budget.x_dst.apply(budget.t_coarse) + budget.t_d;
}

std::string to_string(SyncLevel level) {
  switch (level) {
    case SyncLevel::Fine: return "fine";
    case SyncLevel::Coarse: return "coarse";
    case SyncLevel::OutOfSync: return "out_of_sync";
  }
  return "unknown";
}

SyncLevel classify_sync(Duration delta_sync, Duration t_cp, Duration t_slsw) {
  if (t_cp > t_slsw) throw std::invalid_argument("t_cp must not exceed t_slsw");
  if (delta_sync < Duration::zero()) throw std::invalid_argument("delta_sync must be an absolute value");
  if (delta_sync < t_cp) return SyncLevel::Fine;
  if (delta_sync <= t_slsw) return SyncLevel::Coarse;
  return SyncLevel::OutOfSync;
}

double max_legacy_range(Duration t_cp) {
  if (t_cp < Duration::zero()) throw std::invalid_argument("t_cp must be non-negative");
  return kSpeedOfLight * t_cp.seconds();
}

Duration time_of_flight(double distance_m) {
  if (!(distance_m >= 0.0)) throw std::invalid_argument("distance must be non-negative");
  return Duration::from_seconds(distance_m / kSpeedOfLight);
}

}  // namespace sidesync
