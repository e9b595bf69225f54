#include <gtest/gtest.h>

#include "sidesync/experiment/config.hpp"
#include "support/gen.hpp"

using namespace sidesync;
using namespace sidesync::literals;
using namespace sidesync::experiment;
using netsim::SyncMethod;
using protocol::DeviceId;

namespace {

// Path reported for a config that should be rejected.
std::string error_path(std::string_view json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

}  // namespace

TEST(DurationText, Units) {
  EXPECT_EQ(parse_duration_text("72ms"), 72_ms);
  EXPECT_EQ(parse_duration_text("4.69us"), 4690_ns);
  EXPECT_EQ(parse_duration_text("2h"), 2_h);
  EXPECT_EQ(parse_duration_text("8min"), 8_min);
  EXPECT_EQ(parse_duration_text("1.5s"), 1500_ms);
  EXPECT_EQ(parse_duration_text("17ns"), 17_ns);
  EXPECT_EQ(parse_duration_text("0s"), 0_ns);
  EXPECT_EQ(parse_duration_text("-1s"), -1_s);  // offsets may be negative
  for (const char* bad : {"", "ms", "5", "5 ms", "5m", "0.5ns", "1e3ms", "1.2.3s"}) {
    EXPECT_THROW(parse_duration_text(bad), std::invalid_argument) << bad;
  }
}

TEST(DurationTextProperty, IntegerNanosecondsRoundTrip) {
  gen::Gen g(71);
  const std::pair<const char*, std::int64_t> units[] = {{"ns", 1}, {"us", 1'000}, {"ms", 1'000'000}, {"s", 1'000'000'000}};
  for (int i = 0; i < 1000; ++i) {
    const auto& [unit, scale] = units[g.integer(0, 3)];
    const std::int64_t n = g.integer(0, 1'000'000);
    EXPECT_EQ(parse_duration_text(std::to_string(n) + unit).ns(), n * scale);
  }
}

TEST(Config, EmptyObjectIsEvaluationDefaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.scenario.method, SyncMethod::FlexiCoarse);
  EXPECT_EQ(c.scenario.flexi.t_data, 2_h);
  EXPECT_EQ(c.scenario.flexi.t_win, 72_ms);
  EXPECT_EQ(c.scenario.beacon.t_sync, 500_s);
  ASSERT_EQ(c.scenario.devices.size(), 2u);
  EXPECT_EQ(c.scenario.devices[1].config.imsi, protocol::Imsi{2002});
  EXPECT_EQ(c.scenario.devices[1].config.sl_drx_cycle, 2_h);
  ASSERT_EQ(c.scenario.flows.size(), 1u);
  EXPECT_EQ(c.scenario.flows[0].src, DeviceId{1});
  EXPECT_EQ(c.effective_horizon(), 2_h * 100);
  EXPECT_EQ(c.effective_beacon().t_win, 5_ms);
}

TEST(Config, ReadsNestedSections) {
  const auto c = parse_config(R"({
    "method": "tx_beacon", "seed": 9, "horizon": "3h",
    "radio": {"p_tx": 0.2},
    "beacon": {"t_sync": "350s", "optimal_window": false, "t_win": "7ms"},
    "drift": {"x_src_ppm": 2.5},
    "devices": [
      {"id": 5, "imsi": 77, "sl_drx_cycle": "1280ms", "drift_ppm": -1.5, "offset": "11s",
       "position": [3, 4], "busy": {"period": "1s", "length": "100ms", "phase": "5ms"}},
      {"id": 6, "radio": {"p_tx": 0.05, "p_rx": 0.02, "p_sleep": 0.001}}
    ],
    "flows": [{"src": 5, "dst": 6, "period": "10min", "first_at": "1min", "one_shot": true}]
  })");
  EXPECT_EQ(c.scenario.method, SyncMethod::TxBeacon);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.effective_horizon(), 3_h);
  EXPECT_EQ(c.radio.p_tx, 0.2);
  EXPECT_EQ(c.radio.p_rx, 0.08);
  EXPECT_EQ(c.effective_beacon().t_win, 7_ms);
  EXPECT_EQ(c.scenario.x_src, Drift::from_ppm(2.5));
  const auto& d = c.scenario.devices;
  EXPECT_EQ(d[0].config.imsi, protocol::Imsi{77});
  EXPECT_EQ(d[0].config.sl_drx_cycle, 1280_ms);
  EXPECT_EQ(d[0].config.clock.drift, Drift::from_ppb(-1500));
  EXPECT_EQ(d[0].config.clock.initial_offset, 11_s);
  EXPECT_EQ(d[0].position, (netsim::Position{3, 4}));
  EXPECT_EQ(d[0].busy, (netsim::BusyPattern{1_s, 100_ms, 5_ms}));
  EXPECT_EQ(d[0].config.radio.p_tx, 0.2);  // inherits the global radio
  EXPECT_EQ(d[1].config.radio.p_tx, 0.05);
  EXPECT_EQ(d[1].config.imsi, protocol::Imsi{6});
  EXPECT_EQ(c.scenario.flows[0].period, 10_min);
  EXPECT_TRUE(c.scenario.flows[0].one_shot);
}

TEST(Config, OptimalBeaconWindowFollowsInterval) {
  const auto c = parse_config(R"({"beacon": {"t_sync": "350s"}})");
  EXPECT_EQ(c.effective_beacon().t_win, 3500_us);
  EXPECT_EQ(c.resolved_scenario().beacon.t_win, 3500_us);
}

TEST(Config, IntegerNanosecondsAccepted) {
  EXPECT_EQ(parse_config(R"({"flexi": {"t_win": 72000000}})").scenario.flexi.t_win, 72_ms);
}

TEST(Config, ErrorsNameTheOffendingKey) {
  EXPECT_EQ(error_path(R"({"bogus": 1})"), "bogus");
  EXPECT_EQ(error_path(R"({"flexi": {"t_wn": "1ms"}})"), "flexi.t_wn");
  EXPECT_EQ(error_path(R"({"flexi": {"t_win": "72 parsecs"}})"), "flexi.t_win");
  EXPECT_EQ(error_path(R"({"flexi": {"n_attempts": 1.5}})"), "flexi.n_attempts");
  EXPECT_EQ(error_path(R"({"radio": {"p_tx": "loud"}})"), "radio.p_tx");
  EXPECT_EQ(error_path(R"({"method": "gps"})"), "method");
  EXPECT_EQ(error_path(R"({"devices": [{"id": 1}, {"id": 2, "colour": "red"}]})"), "devices[1].colour");
  EXPECT_EQ(error_path(R"({"devices": [{"id": 1, "position": [1]}, {"id": 2}]})"), "devices[0].position");
  EXPECT_EQ(error_path(R"({"channel": {"collisions": "maybe"}})"), "channel.collisions");
  EXPECT_EQ(error_path("[1, 2]"), "");
  EXPECT_NE(error_path("{"), "<accepted>");
}

TEST(Config, SemanticErrorsAreConfigErrors) {
  EXPECT_THROW(parse_config(R"({"radio": {"p_tx": -1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"flexi": {"n_attempts": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"flows": [{"src": 1, "dst": 3}]})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"devices": [{"id": 1}, {"id": 1}]})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, SerializeRoundTrips) {
  const char* texts[] = {
      "{}",
      R"({"method": "rx_beacon", "beacon": {"t_sync": "100s"}, "piggyback": true})",
      R"({"devices": [{"id": 1, "radio": {"p_tx": 0.3}, "busy": {"period": "2s", "length": "1s"}},
                      {"id": 2, "sl_drx_cycle": "1280ms", "coverage": "HC", "coarse_sync_error": "3us"},
                      {"id": 3, "position": [0, 50]}],
          "flows": [{"src": 1, "dst": 2}, {"src": 3, "dst": 2, "first_at": "2s"}], "horizon": "1h"})",
  };
  for (const char* t : texts) {
    SCOPED_TRACE(t);
    const auto c = parse_config(t);
    const auto s = serialize_config(c);
    EXPECT_EQ(parse_config(s), c);
    EXPECT_EQ(serialize_config(parse_config(s)), s);
  }
}
