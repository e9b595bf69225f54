#pragma once

#include <array>
#include <string>
#include <string_view>

#include "sidesync/timebase.hpp"

// Closed-form average power of the synchronization schemes, the beacon
// power threshold and battery-life projection. Powers are watts; durations
// enter as exact nanosecond counts and are converted to seconds once.
namespace sidesync::power {

struct RadioPowerProfile {
  double p_tx = 0.100;
  double p_rx = 0.080;
  double p_sleep = 0.0;

  void validate() const;
  bool operator==(const RadioPowerProfile&) const = default;
};

/// Flexi-sync parameters. `t_win` is the total window; the DST listens for
/// t_win / n_attempts per data exchange.
struct FlexiSyncParams {
  int n_attempts = 1;
  Duration t_data = Duration::from_s(2 * 3600);
  Duration t_ss = Duration::from_ms(1);
  Duration t_req = Duration::from_ms(1);
  Duration t_rsp = Duration::from_ms(1);
  Duration t_win = Duration::from_ms(72);

  void validate() const;
  Duration effective_window() const { return t_win / n_attempts; }
  bool operator==(const FlexiSyncParams&) const = default;
};

struct BeaconParams {
  Duration t_sync = Duration::from_s(500);
  int n_attempts = 1;
  Duration t_ss = Duration::from_ms(1);
  Duration t_req = Duration::from_ms(1);
  Duration t_rsp = Duration::from_ms(1);
  Duration t_win = Duration::from_ms(5);

  void validate() const;
  bool operator==(const BeaconParams&) const = default;
};

enum class PowerClassId { PC1, PC2 };

struct PowerClass {
  PowerClassId id;
  std::string_view name;
  double erp_dbm;
  double band_low_mhz;
  double band_high_mhz;
  std::string_view region;
};

inline constexpr std::array<PowerClass, 2> kPowerClasses{{
    {PowerClassId::PC1, "PC1", 14.0, 865.0, 868.0, "Europe"},
    {PowerClassId::PC2, "PC2", 23.0, 902.0, 928.0, "North America"},
}};

const PowerClass& power_class(PowerClassId id);
PowerClassId parse_power_class(std::string_view name);

struct BatteryModel {
  double capacity_wh = 5.0;
  double baseline_avg_power = 0.0;  ///< W, legacy operation without sync overhead

  void validate() const;
  /// Baseline chosen so that battery_life(model, 0) == baseline_days.
  static BatteryModel calibrated(double capacity_wh, double baseline_days);
};

/// Legacy lifetime the default battery model is calibrated against.
inline constexpr double kLegacyBatteryDays = 328.3;

/// (N_A / T_data) · (P_TX (t_SS + t_req) + P_RX t_rsp)
double p_src_flexi(const RadioPowerProfile& profile, const FlexiSyncParams& p);

/// (1 / T_data) · (P_RX t_win / N_A + P_TX t_rsp)
double p_dst_flexi(const RadioPowerProfile& profile, const FlexiSyncParams& p);

/// (N_A / T_sync) · (P_TX (t_SS + t_req) + P_RX t_rsp)
double p_rx_beacon(const RadioPowerProfile& profile, const BeaconParams& b);

/// (N_A / T_sync) · P_RX t_win
double p_tx_beacon(const RadioPowerProfile& profile, const BeaconParams& b);

/// Listening window that absorbs the error accumulated over one sync
/// interval: eps_coarse + (x_src + x_dst)·t_sync + t_d.
Duration optimal_window(Duration t_sync, Drift x_src, Drift x_dst, Duration eps_coarse = {}, Duration t_d = {});

struct BeaconThreshold {
  double p_tx = 0.0;     ///< W
  bool clamped = false;  ///< the unclamped solution was negative
};

/// Transmit power at which RX- and TX-beacon sync cost the same:
/// P_RX (t_win − t_rsp) / (t_SS + t_req).
BeaconThreshold beacon_power_threshold(double p_rx, const BeaconParams& b);

/// Lifetime in days for the baseline plus `sync_overhead_power`.
double battery_life(const BatteryModel& battery, double sync_overhead_power);

/// Sync interval at which the RX-beacon cost equals the TX-beacon cost when
/// the TX-beacon window follows optimal_window(). Found by bisection on
/// [lo, hi]; throws if the costs do not cross on that bracket.
Duration beacon_crossover_interval(const RadioPowerProfile& profile, BeaconParams b, Drift x_src, Drift x_dst,
                                   Duration lo, Duration hi, Duration tolerance);

}  // namespace sidesync::power
