#include <gtest/gtest.h>

#include "sidesync/netsim/channel.hpp"
#include "sidesync/netsim/energy.hpp"
#include "sidesync/netsim/event_queue.hpp"
#include "sidesync/netsim/scenario.hpp"
#include "support/gen.hpp"

using namespace sidesync;
using namespace sidesync::literals;
using namespace sidesync::netsim;
using protocol::DeviceId;

namespace {

SimTime at(Duration d) { return SimTime::zero() + d; }

}  // namespace

TEST(EventQueue, OrdersByTimeThenInsertion) {
  EventQueue<int> q;
  q.push(at(5_ms), 1);
  q.push(at(1_ms), 2);
  q.push(at(5_ms), 3);
  q.push(at(1_ms), 4);
  std::vector<int> order;
  while (!q.empty()) order.push_back(q.pop().payload);
  EXPECT_EQ(order, (std::vector<int>{2, 4, 1, 3}));
  EXPECT_EQ(q.last_popped(), at(5_ms));
  EXPECT_THROW(q.push(at(4_ms), 9), std::logic_error);
  EXPECT_THROW(q.pop(), std::logic_error);
}

TEST(EventQueueProperty, PopsNonDecreasing) {
  gen::Gen g(51);
  EventQueue<std::int64_t> q;
  SimTime now{};
  for (int i = 0; i < 20'000; ++i) {
    if (q.empty() || g.integer(0, 2) > 0) {
      q.push(now + g.ns(0, 1'000'000), i);
    } else {
      const auto e = q.pop();
      ASSERT_GE(e.at, now);
      now = e.at;
    }
  }
}

TEST(Channel, DelayIsTimeOfFlight) {
  ChannelModel ch;
  ch.positions[DeviceId{1}] = {0, 0};
  ch.positions[DeviceId{2}] = {1200, 1600};  // 2 km
  ch.positions[DeviceId{3}] = {20'000, 0};
  EXPECT_EQ(ch.link_delay(DeviceId{1}, DeviceId{2}), 6671_ns);
  EXPECT_FALSE(ch.link_delay(DeviceId{1}, DeviceId{3}).has_value());
  EXPECT_THROW(ch.link_delay(DeviceId{1}, DeviceId{9}), std::out_of_range);
  const protocol::Message m{protocol::MessageKind::SlData, DeviceId{1}, DeviceId{2}, std::nullopt, 1_ms, false, 0};
  const auto out = deliver(ch, DeviceId{1}, m, at(1_s));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].to, DeviceId{2});
  EXPECT_EQ(out[0].arrival, at(1_s + 6671_ns));
  EXPECT_NEAR(out[0].distance_m, 2000.0, 1e-9);
}

TEST(Collision, AllLostAndCapture) {
  const std::vector<Arrival> a{{at(0_ns), at(1_ms), 500.0}, {at(500_us), at(1500_us), 100.0}, {at(2_ms), at(3_ms), 50.0}};
  EXPECT_EQ(detect_collision(a, CollisionPolicy::AllLost), (std::vector<bool>{false, false, true}));
  EXPECT_EQ(detect_collision(a, CollisionPolicy::CaptureStrongest), (std::vector<bool>{false, true, true}));
  // Touching end to start is not an overlap.
  const std::vector<Arrival> b{{at(0_ns), at(1_ms), 5.0}, {at(1_ms), at(2_ms), 5.0}};
  EXPECT_EQ(detect_collision(b, CollisionPolicy::AllLost), (std::vector<bool>{true, true}));
}

TEST(Energy, PriorityResolvesOverlap) {
  EnergyLedger l;
  l.add(RadioState::RxData, at(0_ns), at(10_ms));
  l.add(RadioState::RxSync, at(5_ms), at(20_ms));
  l.add(RadioState::TxSync, at(8_ms), at(9_ms));
  l.add(RadioState::Busy, at(15_ms), at(30_ms));
  const power::RadioPowerProfile p{0.1, 0.08, 0.001};
  const auto r = l.settle(p, 100_ms, true);
  EXPECT_EQ(r.dwell.of(RadioState::RxData), (5_ms).ns());
  EXPECT_EQ(r.dwell.of(RadioState::RxSync), (9_ms).ns());  // 5–8 and 9–15
  EXPECT_EQ(r.dwell.of(RadioState::TxSync), (1_ms).ns());
  EXPECT_EQ(r.dwell.of(RadioState::Busy), (15_ms).ns());
  EXPECT_EQ(r.dwell.of(RadioState::Sleep), (70_ms).ns());
  EXPECT_EQ(r.dwell.total(), (100_ms).ns());
  EXPECT_NEAR(r.joules_rx, 0.08 * 0.014, 1e-15);
  EXPECT_NEAR(r.joules_tx_sync, 0.1 * 0.001, 1e-15);
  EXPECT_NEAR(r.joules_sleep, 0.001 * 0.070, 1e-15);
  ASSERT_EQ(r.timeline.size(), 6u);
  EXPECT_EQ(r.timeline[2], (Segment{at(8_ms), at(9_ms), RadioState::TxSync}));
}

TEST(Energy, ClipsToHorizonAndIgnoresEmpty) {
  EnergyLedger l;
  l.add(RadioState::TxData, at(90_ms), at(200_ms));
  l.add(RadioState::RxData, at(5_ms), at(5_ms));
  const auto r = l.settle(power::RadioPowerProfile{}, 100_ms);
  EXPECT_EQ(r.dwell.tx(), (10_ms).ns());
  EXPECT_EQ(l.raw().size(), 1u);
  EXPECT_THROW(l.add(RadioState::Sleep, at(0_ns), at(1_ms)), std::invalid_argument);
}

// Dwell always partitions the horizon and joules follow P·t per state.
TEST(EnergyProperty, ConservesTime) {
  gen::Gen g(52);
  for (int i = 0; i < 300; ++i) {
    SCOPED_TRACE(i);
    EnergyLedger l;
    const int n = static_cast<int>(g.integer(0, 40));
    for (int k = 0; k < n; ++k) {
      const auto s = static_cast<RadioState>(g.integer(1, 5));
      const SimTime a = g.at(0, 2'000'000'000);
      l.add(s, a, a + g.ns(0, 300'000'000));
    }
    const power::RadioPowerProfile p{g.real(0, 0.3), g.real(0.01, 0.2), 0.0};
    const Duration horizon = g.ns(1, 2'500'000'000);
    const auto r = l.settle(p, horizon);
    EXPECT_EQ(r.dwell.total(), horizon.ns());
    EXPECT_NEAR(r.joules_tx, p.p_tx * r.dwell.tx() * 1e-9, 1e-12);
    EXPECT_NEAR(r.joules_rx, p.p_rx * r.dwell.rx() * 1e-9, 1e-12);
  }
}

TEST(Busy, PeriodicPattern) {
  const BusyPattern b{100_ms, 10_ms, 5_ms};
  EXPECT_TRUE(b.busy_at(at(5_ms)));
  EXPECT_FALSE(b.busy_at(at(15_ms)));
  EXPECT_TRUE(b.busy_at(at(110_ms)));
  EXPECT_TRUE(b.overlaps(at(0_ns), at(6_ms)));
  EXPECT_FALSE(b.overlaps(at(15_ms), at(105_ms)));
  EXPECT_THROW((BusyPattern{10_ms, 20_ms, 0_ns}.validate()), std::invalid_argument);
}

TEST(Scenario, MethodNames) {
  for (auto m : {SyncMethod::FlexiCoarse, SyncMethod::FlexiColdStart, SyncMethod::TxBeacon, SyncMethod::RxBeacon,
                 SyncMethod::Legacy}) {
    EXPECT_EQ(parse_sync_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_sync_method("gps"), std::invalid_argument);
}

namespace {

ScenarioConfig pair(SyncMethod m) {
  ScenarioConfig c;
  c.method = m;
  DeviceSetup a, b;
  a.config.id = DeviceId{1};
  a.config.imsi = protocol::Imsi{1001};
  b.config.id = DeviceId{2};
  b.config.imsi = protocol::Imsi{2002};
  b.position = {100, 0};
  c.devices = {a, b};
  c.flows = {FlowConfig{DeviceId{1}, DeviceId{2}, std::nullopt, std::nullopt, false}};
  return c;
}

}  // namespace

TEST(Scenario, RolesFollowMethod) {
  using protocol::Role;
  const std::pair<SyncMethod, std::pair<Role, Role>> cases[] = {
      {SyncMethod::FlexiCoarse, {Role::FlexiSrc, Role::FlexiDst}},
      {SyncMethod::FlexiColdStart, {Role::FlexiSrc, Role::FlexiDst}},
      {SyncMethod::Legacy, {Role::FlexiSrc, Role::FlexiDst}},
      {SyncMethod::TxBeacon, {Role::FlexiDst, Role::TxBeacon}},
      {SyncMethod::RxBeacon, {Role::FlexiSrc, Role::RxBeacon}},
  };
  for (const auto& [m, roles] : cases) {
    SCOPED_TRACE(to_string(m));
    const auto b = build_scenario(pair(m), 1);
    EXPECT_EQ(protocol::role_of(b.devices[0].role), roles.first);
    EXPECT_EQ(protocol::role_of(b.devices[1].role), roles.second);
  }
}

TEST(Scenario, DrawsStayInsideBounds) {
  gen::Gen g(53);
  for (int i = 0; i < 200; ++i) {
    SCOPED_TRACE(i);
    auto c = pair(SyncMethod::FlexiCoarse);
    c.x_src = Drift::from_ppm(g.real(0, 20));
    c.x_dst = Drift::from_ppm(g.real(0, 20));
    c.eps_coarse = g.ns(0, 1'000'000);
    const auto b = build_scenario(c, static_cast<std::uint64_t>(i));
    const auto& src = b.devices[0].clock;
    const auto& dst = b.devices[1].clock;
    EXPECT_LE(src.drift().abs().ppb(), c.x_src.ppb() / 2);
    EXPECT_LE(dst.drift().abs().ppb(), c.x_dst.ppb() / 2);
    EXPECT_LE((src.offset_at_last_sync() - dst.offset_at_last_sync()).abs(), c.eps_coarse);
    EXPECT_GE(dst.offset_at_last_sync(), 10_s);
    const auto& f = b.flows.at(0);
    EXPECT_EQ(f.period, c.flexi.t_data);
    EXPECT_GE(*f.first_at, 1_ms);
    EXPECT_LT(*f.first_at, c.flexi.t_data);
  }
}

TEST(Scenario, SeedDeterminesDraws) {
  const auto c = pair(SyncMethod::FlexiColdStart);
  const auto a = build_scenario(c, 9), b = build_scenario(c, 9), d = build_scenario(c, 10);
  EXPECT_EQ(a.devices[1].clock, b.devices[1].clock);
  EXPECT_EQ(a.flows[0], b.flows[0]);
  EXPECT_NE(a.devices[1].clock, d.devices[1].clock);
}

TEST(Scenario, RejectsBadTopologies) {
  auto c = pair(SyncMethod::FlexiCoarse);
  c.flows.push_back(FlowConfig{DeviceId{1}, DeviceId{7}, std::nullopt, std::nullopt, false});
  EXPECT_THROW(c.validate(), ScenarioError);
  c = pair(SyncMethod::FlexiCoarse);
  c.devices.push_back(c.devices[0]);
  EXPECT_THROW(c.validate(), ScenarioError);
  c = pair(SyncMethod::FlexiCoarse);
  c.flows[0].dst = DeviceId{1};
  EXPECT_THROW(c.validate(), ScenarioError);
}
