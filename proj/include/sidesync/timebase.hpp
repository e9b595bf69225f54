#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sidesync {

/// Raised when time arithmetic leaves the representable range. Every
/// Duration/SimTime operation is checked; nothing wraps or saturates.
class TimeOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

namespace detail {

constexpr std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r{};
  if (__builtin_add_overflow(a, b, &r)) throw TimeOverflow("time addition overflow");
  return r;
}

constexpr std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r{};
  if (__builtin_sub_overflow(a, b, &r)) throw TimeOverflow("time subtraction overflow");
  return r;
}

constexpr std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r{};
  if (__builtin_mul_overflow(a, b, &r)) throw TimeOverflow("time multiplication overflow");
  return r;
}

}  // namespace detail

/// Signed span of time in integer nanoseconds.
class Duration {
 public:
  constexpr Duration() = default;

  static constexpr Duration from_ns(std::int64_t ns) { return Duration{ns}; }
  static constexpr Duration from_us(std::int64_t us) { return Duration{detail::checked_mul(us, 1'000)}; }
  static constexpr Duration from_ms(std::int64_t ms) { return Duration{detail::checked_mul(ms, 1'000'000)}; }
  static constexpr Duration from_s(std::int64_t s) { return Duration{detail::checked_mul(s, 1'000'000'000)}; }
  /// Rounds to the nearest nanosecond.
  static Duration from_seconds(double s);
  static constexpr Duration zero() { return Duration{0}; }
  static constexpr Duration max() { return Duration{INT64_MAX}; }

  constexpr std::int64_t ns() const { return ns_; }
  double seconds() const { return static_cast<double>(ns_) * 1e-9; }

  constexpr Duration abs() const { return ns_ < 0 ? Duration{detail::checked_sub(0, ns_)} : *this; }

  constexpr Duration operator+(Duration o) const { return Duration{detail::checked_add(ns_, o.ns_)}; }
  constexpr Duration operator-(Duration o) const { return Duration{detail::checked_sub(ns_, o.ns_)}; }
  constexpr Duration operator-() const { return Duration{detail::checked_sub(0, ns_)}; }
  constexpr Duration operator*(std::int64_t k) const { return Duration{detail::checked_mul(ns_, k)}; }
  /// Integer division, truncating toward zero.
  constexpr Duration operator/(std::int64_t k) const {
    if (k == 0) throw std::invalid_argument("duration divided by zero");
    return Duration{ns_ / k};
  }
  constexpr Duration& operator+=(Duration o) { return *this = *this + o; }
  constexpr Duration& operator-=(Duration o) { return *this = *this - o; }

  constexpr auto operator<=>(const Duration&) const = default;

 private:
  constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}
  std::int64_t ns_ = 0;
};

/// Number of whole `step`s that fit in `d`, rounded up. Both must be positive.
std::int64_t ceil_div(Duration d, Duration step);

/// Global (true) simulation time in nanoseconds since the epoch. Never negative.
class SimTime {
 public:
  constexpr SimTime() = default;
  static constexpr SimTime from_ns(std::int64_t ns) {
    if (ns < 0) throw TimeOverflow("SimTime cannot be negative");
    return SimTime{ns};
  }
  static constexpr SimTime zero() { return SimTime{0}; }
  static constexpr SimTime max() { return SimTime{INT64_MAX}; }

  constexpr std::int64_t ns() const { return ns_; }
  constexpr Duration since_epoch() const { return Duration::from_ns(ns_); }

  constexpr SimTime operator+(Duration d) const { return from_ns(detail::checked_add(ns_, d.ns())); }
  constexpr SimTime operator-(Duration d) const { return from_ns(detail::checked_sub(ns_, d.ns())); }
  constexpr Duration operator-(SimTime o) const { return Duration::from_ns(detail::checked_sub(ns_, o.ns_)); }
  constexpr SimTime& operator+=(Duration d) { return *this = *this + d; }

  constexpr auto operator<=>(const SimTime&) const = default;

 private:
  constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
  std::int64_t ns_ = 0;
};

namespace literals {

constexpr Duration operator""_ns(unsigned long long v) { return Duration::from_ns(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_us(unsigned long long v) { return Duration::from_us(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_ms(unsigned long long v) { return Duration::from_ms(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_s(unsigned long long v) { return Duration::from_s(static_cast<std::int64_t>(v)); }
constexpr Duration operator""_min(unsigned long long v) { return Duration::from_s(static_cast<std::int64_t>(v) * 60); }
constexpr Duration operator""_h(unsigned long long v) { return Duration::from_s(static_cast<std::int64_t>(v) * 3600); }

}  // namespace literals

/// Crystal frequency error, held as integer parts-per-billion so that
/// drift·elapsed is computed exactly.
class Drift {
 public:
  constexpr Drift() = default;
  static constexpr Drift from_ppb(std::int64_t ppb) { return Drift{ppb}; }
  /// Rounds to the nearest ppb.
  static Drift from_ppm(double ppm);

  constexpr std::int64_t ppb() const { return ppb_; }
  double ppm() const { return static_cast<double>(ppb_) * 1e-3; }

  /// drift·elapsed, truncated toward zero.
  Duration apply(Duration elapsed) const;

  constexpr Drift operator+(Drift o) const { return Drift{detail::checked_add(ppb_, o.ppb_)}; }
  constexpr Drift abs() const { return ppb_ < 0 ? Drift{-ppb_} : *this; }
  constexpr auto operator<=>(const Drift&) const = default;

 private:
  constexpr explicit Drift(std::int64_t ppb) : ppb_(ppb) {}
  std::int64_t ppb_ = 0;
};

/// A device's local clock: local(t) = t + offset + drift·(t − last_sync).
///
/// |drift| must stay below 10^6 ppm so local time is monotone in t.
class DriftingClock {
 public:
  DriftingClock() = default;
  DriftingClock(Duration offset_at_last_sync, Drift drift, SimTime last_sync = SimTime::zero());

  Duration offset_at_last_sync() const { return offset_; }
  Drift drift() const { return drift_; }
  SimTime last_sync() const { return last_sync_; }

  /// Local reading at global time `now`. Throws TimeOverflow when the reading
  /// would be negative or unrepresentable.
  SimTime local_time(SimTime now) const;

  /// local_time(now) − now.
  Duration offset_at(SimTime now) const;

  /// Afterwards local_time(now) − now == new_offset exactly. Drift is a
  /// property of the crystal and is kept.
  void resync(SimTime now, Duration new_offset);

  /// Smallest global time g >= 0 with local_time(g) >= local.
  SimTime global_time_for(SimTime local) const;

  bool operator==(const DriftingClock&) const = default;

 private:
  Duration offset_{};
  Drift drift_{};
  SimTime last_sync_{};
};

SimTime local_time(const DriftingClock& clock, SimTime now);

/// |local_a(t) − local_b(t)|.
Duration sync_offset(const DriftingClock& a, const DriftingClock& b, SimTime t);

/// Inputs to the total synchronization error budget.
struct SyncBudget {
  Duration eps_coarse{};
  Drift x_src{};
  Drift x_dst{};
  Duration t_coarse{};  ///< time since the last coarse sync
  Duration t_d{};       ///< time of flight
  Duration t_cp{};
  Duration t_slsw{};

  void validate() const;
};

/// eps_coarse + x_src·t_coarse + x_dst·t_coarse + t_d.
Duration total_sync_error(const SyncBudget& budget);

enum class SyncLevel { Fine, Coarse, OutOfSync };

std::string to_string(SyncLevel level);

/// Fine below t_cp, Coarse on [t_cp, t_slsw], OutOfSync above.
SyncLevel classify_sync(Duration delta_sync, Duration t_cp, Duration t_slsw);

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

/// Range at which one-way time of flight consumes the whole cyclic prefix.
double max_legacy_range(Duration t_cp);

/// distance/c, rounded to the nearest nanosecond.
Duration time_of_flight(double distance_m);

/// Normal LTE cyclic prefix at 15 kHz subcarrier spacing.
inline constexpr Duration kNormalCyclicPrefix = Duration::from_ns(4'690);
inline constexpr Duration kLegacySyncWindow = Duration::from_ms(5);

}  // namespace sidesync
