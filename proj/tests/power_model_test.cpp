#include <gtest/gtest.h>

#include <cmath>

#include "sidesync/power_model.hpp"
#include "support/gen.hpp"

using namespace sidesync;
using namespace sidesync::literals;
using namespace sidesync::power;

namespace {

// Hand evaluation in plain doubles, independent of the library's Duration
// plumbing. Arguments in watts and seconds.
double src_oracle(double p_tx, double p_rx, int n_a, double t_data, double t_ss, double t_req, double t_rsp) {
  return n_a / t_data * (p_tx * (t_ss + t_req) + p_rx * t_rsp);
}

double dst_oracle(double p_tx, double p_rx, int n_a, double t_data, double t_win, double t_rsp) {
  return (p_rx * t_win / n_a + p_tx * t_rsp) / t_data;
}

FlexiSyncParams flexi_at(int n_a) {
  FlexiSyncParams p;
  p.n_attempts = n_a;
  return p;
}

}  // namespace

TEST(FlexiPower, TableTwoEndpoints) {
  const RadioPowerProfile r;
  // (0.1·2 ms + 0.08·1 ms) / 7200 s and (0.08·72 ms + 0.1·1 ms) / 7200 s
  const double src_expected = 0.00028 / 7200.0;
  const double dst_expected = 0.00586 / 7200.0;
  EXPECT_NEAR(src_expected, 3.88888889e-8, 1e-16);  // frozen
  EXPECT_NEAR(dst_expected, 8.13888889e-7, 1e-15);  // frozen
  EXPECT_NEAR(p_src_flexi(r, flexi_at(1)), src_expected, src_expected * 1e-12);
  EXPECT_NEAR(p_dst_flexi(r, flexi_at(1)), dst_expected, dst_expected * 1e-12);
}

TEST(FlexiPower, AttemptsTradeSrcForDst) {
  const RadioPowerProfile r;
  const double base = p_src_flexi(r, flexi_at(1));
  double prev_dst = INFINITY;
  for (int n = 1; n <= 10; ++n) {
    EXPECT_NEAR(p_src_flexi(r, flexi_at(n)), n * base, base * 1e-12);
    const double dst = p_dst_flexi(r, flexi_at(n));
    EXPECT_LT(dst, prev_dst);
    prev_dst = dst;
  }
}

TEST(FlexiPowerProperty, MatchesHandOracle) {
  gen::Gen g(21);
  for (int i = 0; i < 500; ++i) {
    SCOPED_TRACE(i);
    RadioPowerProfile r{g.real(0.0, 0.3), g.real(0.01, 0.2), 0.0};
    FlexiSyncParams p;
    p.n_attempts = static_cast<int>(g.integer(1, 12));
    p.t_data = g.ms(1000, 10'000'000);
    p.t_ss = g.ms(1, 3);
    p.t_req = g.ms(1, 3);
    p.t_rsp = g.ms(1, 3);
    p.t_win = g.ms(3, 200);
    const double src = src_oracle(r.p_tx, r.p_rx, p.n_attempts, p.t_data.seconds(), p.t_ss.seconds(), p.t_req.seconds(),
                                  p.t_rsp.seconds());
    const double dst = dst_oracle(r.p_tx, r.p_rx, p.n_attempts, p.t_data.seconds(), p.t_win.seconds(), p.t_rsp.seconds());
    EXPECT_NEAR(p_src_flexi(r, p), src, std::abs(src) * 1e-9 + 1e-30);
    EXPECT_NEAR(p_dst_flexi(r, p), dst, std::abs(dst) * 1e-9 + 1e-30);
  }
}

TEST(BeaconPower, ThresholdIs160mW) {
  BeaconParams b;  // t_win 5 ms, 1 ms slots
  const auto th = beacon_power_threshold(0.08, b);
  // 0.08 · (5 − 1) / (1 + 1)
  EXPECT_NEAR(th.p_tx, 0.16, 1e-6);
  EXPECT_FALSE(th.clamped);
}

TEST(BeaconPower, ThresholdClampsWhenWindowShorterThanResponse) {
  BeaconParams b;
  b.t_win = 500_us;
  const auto th = beacon_power_threshold(0.08, b);
  EXPECT_EQ(th.p_tx, 0.0);
  EXPECT_TRUE(th.clamped);
}

TEST(BeaconPower, CostsEqualAtThreshold) {
  BeaconParams b;
  RadioPowerProfile r;
  r.p_tx = beacon_power_threshold(r.p_rx, b).p_tx;
  EXPECT_NEAR(p_rx_beacon(r, b), p_tx_beacon(r, b), 1e-15);
  // 0.08 · 5 ms / 500 s
  EXPECT_NEAR(p_tx_beacon(r, b), 8e-7, 1e-15);
}

TEST(BeaconPower, OptimalWindowCoversDrift) {
  EXPECT_EQ(optimal_window(500_s, Drift::from_ppm(5.0), Drift::from_ppm(5.0)), 5_ms);
  EXPECT_EQ(optimal_window(350_s, Drift::from_ppm(5.0), Drift::from_ppm(5.0)), 3500_us);
  EXPECT_EQ(optimal_window(350_s, Drift::from_ppm(5.0), Drift::from_ppm(5.0), 10_us, 7_us), 3517_us);
}

TEST(BeaconPower, CrossoverAt350s) {
  const RadioPowerProfile r;
  const auto x = Drift::from_ppm(5.0);
  const Duration t = beacon_crossover_interval(r, BeaconParams{}, x, x, 10_s, 5000_s, 1_ms);
  // P_TX (t_ss + t_req) + P_RX t_rsp = P_RX · 10 ppm · T  ⇒  T = 0.00028 / 8e-7
  EXPECT_NEAR(t.seconds(), 0.00028 / 8e-7, 1.0);
  EXPECT_NEAR(t.seconds(), 350.0, 1.0);
}

TEST(BeaconPower, RxBeaconCheaperBeyondCrossover) {
  const RadioPowerProfile r;
  const auto x = Drift::from_ppm(5.0);
  for (std::int64_t s = 351; s <= 5000; s += 7) {
    BeaconParams b;
    b.t_sync = Duration::from_s(s);
    b.t_win = optimal_window(b.t_sync, x, x);
    EXPECT_LT(p_rx_beacon(r, b), p_tx_beacon(r, b)) << s;
  }
}

TEST(Battery, CalibratedBaseline) {
  const auto m = BatteryModel::calibrated(5.0, kLegacyBatteryDays);
  EXPECT_NEAR(m.baseline_avg_power, 5.0 / (328.3 * 24.0), 1e-15);
  EXPECT_NEAR(m.baseline_avg_power, 634.6e-6, 0.1e-6);
  EXPECT_NEAR(battery_life(m, 0.0), 328.3, 1e-9);
}

TEST(Battery, FlexiOverheadAtFourAttempts) {
  const RadioPowerProfile r;
  const auto m = BatteryModel::calibrated(5.0, kLegacyBatteryDays);
  const double overhead = p_src_flexi(r, flexi_at(4)) + p_dst_flexi(r, flexi_at(4));
  const double oracle = 5.0 / (5.0 / (328.3 * 24.0) + overhead) / 24.0;
  EXPECT_NEAR(battery_life(m, overhead), oracle, 1e-9);
  EXPECT_NEAR(oracle, 328.109, 1e-3);  // frozen
  EXPECT_LT(1.0 - oracle / 328.3, 0.001);
}

TEST(PowerClass, Table) {
  EXPECT_EQ(power_class(PowerClassId::PC2).erp_dbm, 23.0);
  EXPECT_EQ(parse_power_class("PC1"), PowerClassId::PC1);
  EXPECT_THROW(parse_power_class("PC9"), std::invalid_argument);
}

TEST(Validation, RejectsBadInputs) {
  RadioPowerProfile bad{-0.1, 0.08, 0.0};
  EXPECT_THROW(p_src_flexi(bad, FlexiSyncParams{}), std::invalid_argument);
  EXPECT_THROW(p_src_flexi(RadioPowerProfile{}, flexi_at(0)), std::invalid_argument);
  EXPECT_THROW(BatteryModel::calibrated(0.0, 328.3), std::invalid_argument);
}
