#include "sidesync/power_model.hpp"

#include <cmath>
#include <stdexcept>

namespace sidesync::power {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

double sync_exchange_energy(const RadioPowerProfile& profile, Duration t_ss, Duration t_req, Duration t_rsp) {
  return profile.p_tx * (t_ss + t_req).seconds() + profile.p_rx * t_rsp.seconds();
}

}  // namespace

void RadioPowerProfile::validate() const {
  require(finite_non_negative(p_tx) && finite_non_negative(p_rx) && finite_non_negative(p_sleep),
          "radio powers must be finite and non-negative");
  require(p_sleep <= p_rx, "sleep power must not exceed receive power");
}

void FlexiSyncParams::validate() const {
  require(n_attempts >= 1, "n_attempts must be at least 1");
  require(t_data > Duration::zero(), "t_data must be positive");
  require(t_ss > Duration::zero() && t_req > Duration::zero() && t_rsp > Duration::zero() && t_win > Duration::zero(),
          "flexi-sync durations must be positive");
  require(t_win >= t_ss, "t_win must fit at least one SLSS");
}

void BeaconParams::validate() const {
  require(t_sync > Duration::zero(), "t_sync must be positive");
  require(n_attempts >= 1, "n_attempts must be at least 1");
  require(t_ss >= Duration::zero() && t_req >= Duration::zero() && t_rsp >= Duration::zero() &&
              t_win >= Duration::zero(),
          "beacon durations must be non-negative");
}

const PowerClass& power_class(PowerClassId id) {
  for (const auto& pc : kPowerClasses) {
    if (pc.id == id) return pc;
  }
  throw std::invalid_argument("unknown power class");
}

PowerClassId parse_power_class(std::string_view name) {
  for (const auto& pc : kPowerClasses) {
    if (pc.name == name) return pc.id;
  }
  throw std::invalid_argument("unknown power class: " + std::string(name));
}

void BatteryModel::validate() const {
  require(std::isfinite(capacity_wh) && capacity_wh > 0.0, "battery capacity must be positive");
  require(std::isfinite(baseline_avg_power) && baseline_avg_power > 0.0, "baseline power must be positive");
}

BatteryModel BatteryModel::calibrated(double capacity_wh, double baseline_days) {
  require(baseline_days > 0.0, "baseline lifetime must be positive");
  BatteryModel m{capacity_wh, capacity_wh / (baseline_days * 24.0)};
  m.validate();
  return m;
}

double p_src_flexi(const RadioPowerProfile& profile, const FlexiSyncParams& p) {
  profile.validate();
  p.validate();
  return p.n_attempts / p.t_data.seconds() * sync_exchange_energy(profile, p.t_ss, p.t_req, p.t_rsp);
}

double p_dst_flexi(const RadioPowerProfile& profile, const FlexiSyncParams& p) {
  profile.validate();
  p.validate();
  const double t_win_eff = p.t_win.seconds() / p.n_attempts;
  return (profile.p_rx * t_win_eff + profile.p_tx * p.t_rsp.seconds()) / p.t_data.seconds();
}

double p_rx_beacon(const RadioPowerProfile& profile, const BeaconParams& b) {
  profile.validate();
  b.validate();
  return b.n_attempts / b.t_sync.seconds() * sync_exchange_energy(profile, b.t_ss, b.t_req, b.t_rsp);
}

double p_tx_beacon(const RadioPowerProfile& profile, const BeaconParams& b) {
  profile.validate();
  b.validate();
  return b.n_attempts / b.t_sync.seconds() * profile.p_rx * b.t_win.seconds();
}

Duration optimal_window(Duration t_sync, Drift x_src, Drift x_dst, Duration eps_coarse, Duration t_d) {
  require(t_sync >= Duration::zero(), "t_sync must be non-negative");
  SyncBudget budget{};
  budget.eps_coarse = eps_coarse;
  budget.x_src = x_src;
  budget.x_dst = x_dst;
  budget.t_coarse = t_sync;
  budget.t_d = t_d;
  return total_sync_error(budget);
}

BeaconThreshold beacon_power_threshold(double p_rx, const BeaconParams& b) {
  require(finite_non_negative(p_rx), "receive power must be finite and non-negative");
  require(b.t_ss + b.t_req > Duration::zero(), "t_ss + t_req must be positive");
  const double value = p_rx * (b.t_win - b.t_rsp).seconds() / (b.t_ss + b.t_req).seconds();
  if (value < 0.0) return {0.0, true};
  return {value, false};
}

double battery_life(const BatteryModel& battery, double sync_overhead_power) {
  battery.validate();
  require(sync_overhead_power >= 0.0, "overhead power must be non-negative");
  if (std::isinf(sync_overhead_power)) return 0.0;
  return battery.capacity_wh / (battery.baseline_avg_power + sync_overhead_power) / 24.0;
}

Duration beacon_crossover_interval(const RadioPowerProfile& profile, BeaconParams b, Drift x_src, Drift x_dst,
                                   Duration lo, Duration hi, Duration tolerance) {
  require(lo > Duration::zero() && hi > lo, "crossover bracket must satisfy 0 < lo < hi");
  require(tolerance > Duration::zero(), "tolerance must be positive");
  auto gap = [&](Duration t_sync) {
    b.t_sync = t_sync;
    b.t_win = optimal_window(t_sync, x_src, x_dst);
    return p_rx_beacon(profile, b) - p_tx_beacon(profile, b);
  };
  double g_lo = gap(lo);
  const double g_hi = gap(hi);
  if (std::signbit(g_lo) == std::signbit(g_hi)) throw std::domain_error("beacon costs do not cross on the bracket");
  while (hi - lo > tolerance) {
    const Duration mid = lo + (hi - lo) / 2;
    const double g_mid = gap(mid);
    if (g_mid == 0.0) return mid;
    if (std::signbit(g_mid) == std::signbit(g_lo)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

}  // namespace sidesync::power
