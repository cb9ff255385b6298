#include <gtest/gtest.h>

#include <thread>

#include "orgym/ran/e2_node.hpp"
#include "orgym/ric/ric_service.hpp"
#include "orgym/xapp/logic.hpp"
#include "orgym/xapp/runtime.hpp"
#include "orgym/xapp/sm_connector.hpp"
#include "support.hpp"

using namespace orgym;
using namespace orgym::xapp;
using namespace std::chrono_literals;

namespace {

constexpr const char* kNode = "gnb:311-048-01000501";

KpmRecord rec(SliceId slice, SchedulingPolicy policy, std::uint64_t buffer, std::uint64_t tx_bytes,
              std::uint32_t tx_tbs, std::uint32_t slice_rbgs, std::uint64_t ts = 1000) {
  KpmRecord r;
  r.timestamp_ms = ts;
  r.bs_id = kNode;
  r.ue_id = static_cast<UeId>(slice + 1);
  r.slice_id = slice;
  r.dl_buffer_bytes = buffer;
  r.tx_bytes = tx_bytes;
  r.tx_tbs = tx_tbs;
  r.policy = policy;
  r.slice_rbg_count = slice_rbgs;
  return r;
}

ControlAction three_slices(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
  ControlAction action;
  action.slice_allocation = pack_allocation({{0, a}, {1, b}, {2, c}}, a + b + c);
  action.slice_scheduling_policy.assign(3, SchedulingPolicy::RoundRobin);
  return action;
}

template <typename Pred>
bool eventually(Pred pred, std::chrono::milliseconds timeout = 5s) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    if (pred()) return true;
    std::this_thread::sleep_for(2ms);
  }
  return pred();
}

}  // namespace

TEST(RewardSpec, PerSliceObjectives) {
  KpmRecord a = rec(0, SchedulingPolicy::RoundRobin, 100, 1000, 4, 10);
  KpmRecord b = rec(0, SchedulingPolicy::RoundRobin, 300, 3000, 8, 10);
  std::vector<const KpmRecord*> both = {&a, &b};
  RewardSpec spec{{2.0, 0.5, 1.0}};
  EXPECT_DOUBLE_EQ(spec.reward(0, both), 4000.0);  // 2 * mean tx_bytes
  EXPECT_DOUBLE_EQ(spec.reward(1, both), 3.0);     // 0.5 * mean tx_tbs
  EXPECT_DOUBLE_EQ(spec.reward(2, both), -200.0);  // -mean buffer
  EXPECT_DOUBLE_EQ(spec.reward(7, both), 2000.0);  // eMBB objective, default weight
}

TEST(PackAllocation, ContiguousFromZero) {
  auto a = pack_allocation({{0, 4}, {1, 0}, {2, 3}}, 10);
  EXPECT_EQ(a.ranges.size(), 2u);
  EXPECT_EQ(a.ranges.at(0), (RbgRange{0, 3}));
  EXPECT_EQ(a.ranges.at(2), (RbgRange{4, 6}));
  EXPECT_EQ(a.total_rbgs, 10u);
}

TEST(SlicePressure, MeanBufferPerRbg) {
  auto alloc = three_slices(10, 5, 0).slice_allocation;
  std::vector<KpmRecord> w = {rec(0, SchedulingPolicy::RoundRobin, 100, 0, 0, 10),
                              rec(0, SchedulingPolicy::RoundRobin, 300, 0, 0, 10),
                              rec(1, SchedulingPolicy::RoundRobin, 50, 0, 0, 5),
                              rec(2, SchedulingPolicy::RoundRobin, 70, 0, 0, 0)};
  auto p = slice_pressure(w, alloc);
  EXPECT_DOUBLE_EQ(p.at(0), 20.0);
  EXPECT_DOUBLE_EQ(p.at(1), 10.0);
  EXPECT_DOUBLE_EQ(p.at(2), 70.0);  // no RBGs counts as one
}

TEST(HillClimb, MovesOneRbgFromLeastToMostPressured) {
  auto alloc = three_slices(10, 8, 7).slice_allocation;
  auto moved = hill_climb_step({{0, 5.0}, {1, 100.0}, {2, 40.0}}, alloc);
  ASSERT_TRUE(moved);
  EXPECT_EQ(moved->rbg_count(0), 9u);
  EXPECT_EQ(moved->rbg_count(1), 9u);
  EXPECT_EQ(moved->rbg_count(2), 7u);
  EXPECT_EQ(moved->allocated_rbgs(), 25u);
  EXPECT_FALSE(validate_allocation(*moved, 25));
}

TEST(HillClimb, Gates) {
  auto alloc = three_slices(10, 8, 7).slice_allocation;
  EXPECT_FALSE(hill_climb_step({{0, 10.0}, {1, 14.9}}, alloc));          // ratio below 1.5
  EXPECT_TRUE(hill_climb_step({{0, 10.0}, {1, 15.0}}, alloc));           // exactly 1.5
  EXPECT_FALSE(hill_climb_step({{0, 0.0}, {1, 0.0}, {2, 0.0}}, alloc));  // nothing queued
  EXPECT_TRUE(hill_climb_step({{0, 0.0}, {1, 1.0}}, alloc));             // idle donor
  EXPECT_FALSE(hill_climb_step({{0, 1.0}}, alloc));
  auto thin = three_slices(1, 12, 12).slice_allocation;
  EXPECT_FALSE(hill_climb_step({{0, 1.0}, {1, 100.0}}, thin));  // donor keeps its last RBG
}

TEST(HillClimb, ConservesRbgsOverRandomWalks) {
  test::Rng rng(4);
  auto alloc = three_slices(9, 8, 8).slice_allocation;
  for (int i = 0; i < 2000; ++i) {
    std::map<SliceId, double> p;
    for (SliceId s = 0; s < 3; ++s) p[s] = static_cast<double>(test::uniform(rng, 0, 1000));
    if (auto next = hill_climb_step(p, alloc)) alloc = *next;
    ASSERT_EQ(alloc.allocated_rbgs(), 25u);
    ASSERT_FALSE(validate_allocation(alloc, 25));
    for (SliceId s = 0; s < 3; ++s) ASSERT_GE(alloc.rbg_count(s), 1u);
  }
}

TEST(SchedLogic, TriesUntriedArmsInCodeOrderThenExploits) {
  auto initial = three_slices(10, 8, 7);
  SchedLogic logic(initial, 25, 0.0, 1);
  auto window = [](SchedulingPolicy p, std::uint64_t tx) {
    return std::vector<KpmRecord>{rec(0, p, 0, tx, 1, 10)};
  };
  auto a1 = logic.decide(window(SchedulingPolicy::RoundRobin, 100));
  ASSERT_TRUE(a1);
  EXPECT_EQ(a1->slice_scheduling_policy[0], SchedulingPolicy::Waterfilling);
  logic.on_outcome(*a1, true);
  auto a2 = logic.decide(window(SchedulingPolicy::Waterfilling, 300));
  ASSERT_TRUE(a2);
  EXPECT_EQ(a2->slice_scheduling_policy[0], SchedulingPolicy::ProportionallyFair);
  logic.on_outcome(*a2, true);
  auto a3 = logic.decide(window(SchedulingPolicy::ProportionallyFair, 200));
  ASSERT_TRUE(a3);
  EXPECT_EQ(a3->slice_scheduling_policy[0], SchedulingPolicy::Waterfilling);  // best mean
  EXPECT_EQ(a3->slice_allocation, initial.slice_allocation);                  // echoed unchanged
  EXPECT_DOUBLE_EQ(logic.arms(0)[1].mean(), 300.0);
  logic.on_outcome(*a3, true);
  EXPECT_FALSE(logic.decide(window(SchedulingPolicy::Waterfilling, 300)));  // no change
}

TEST(SchedLogic, RejectedActionIsForgotten) {
  auto initial = three_slices(10, 8, 7);
  SchedLogic logic(initial, 25, 0.0, 1);
  std::vector<KpmRecord> w = {rec(0, SchedulingPolicy::RoundRobin, 0, 5, 1, 10)};
  auto a = logic.decide(w);
  ASSERT_TRUE(a);
  logic.on_outcome(*a, false);
  EXPECT_EQ(logic.current(), initial);
}

TEST(SchedLogic, LearnsAllocationFromReports) {
  SchedLogic logic(three_slices(10, 8, 7), 25, 0.0, 1);
  std::vector<KpmRecord> w = {rec(0, SchedulingPolicy::RoundRobin, 0, 1, 1, 5),
                              rec(1, SchedulingPolicy::RoundRobin, 0, 1, 1, 10),
                              rec(2, SchedulingPolicy::RoundRobin, 0, 1, 1, 10)};
  auto a = logic.decide(w);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->slice_allocation, pack_allocation({{0, 5}, {1, 10}, {2, 10}}, 25));
}

TEST(SchedSlicingLogic, ShiftsRbgsTowardBackloggedSlice) {
  SchedSlicingLogic logic(three_slices(10, 8, 7), 25, 0.0, 1);
  ControlAction last = logic.current();
  for (int step = 0; step < 5; ++step) {
    std::vector<KpmRecord> w;
    for (SliceId s = 0; s < 3; ++s) {
      const auto n = last.slice_allocation.rbg_count(s);
      w.push_back(rec(s, last.slice_scheduling_policy[s], s == 2 ? 50000 : 10, 100, 1, n));
    }
    auto a = logic.decide(w);
    ASSERT_TRUE(a);
    logic.on_outcome(*a, true);
    last = *a;
  }
  EXPECT_EQ(last.slice_allocation.rbg_count(2), 12u);
  EXPECT_EQ(last.slice_allocation.allocated_rbgs(), 25u);
}

TEST(XappConfig, ParsesAndValidates) {
  auto c = parse_xapp_config(R"({"ric": "127.0.0.1:4560", "node": "gnb:311-048-01000501", "logic": "sched",
                                 "report-period-ms": 100, "control-period-ms": 500, "epsilon": 0.2})");
  EXPECT_EQ(c.logic, "sched");
  EXPECT_EQ(c.report_period_ms, 100u);
  EXPECT_EQ(c.control_period_ms, 500u);
  auto key_of = [](const char* text) {
    try {
      parse_xapp_config(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<accepted>");
  };
  EXPECT_EQ(key_of(R"({"report-period-ms": 5})"), "report-period-ms");
  EXPECT_EQ(key_of(R"({"report-period-ms": 2000, "control-period-ms": 2000})"), "report-period-ms");
  EXPECT_EQ(key_of(R"({"control-period-ms": 300})"), "control-period-ms");
  EXPECT_EQ(key_of(R"({"logic": "magic"})"), "logic");
  EXPECT_EQ(key_of(R"({"node": "bs1"})"), "node");
  EXPECT_EQ(key_of(R"({"colour": 1})"), "colour");
  EXPECT_EQ(key_of(R"({"epsilon": 2})"), "epsilon");
}

TEST(XappConfig, DefaultRequestIdIsStableAndPositive) {
  auto a = default_request_id("gnb:311-048-01000501");
  EXPECT_EQ(a, default_request_id("gnb:311-048-01000501"));
  EXPECT_NE(a, default_request_id("gnb:311-048-01000502"));
  EXPECT_GT(a, 0u);
  EXPECT_LT(a, 1u << 31);
}

TEST(XappConfig, FormatAllocation) {
  SliceAllocation a{{{0, {0, 3}}, {1, {5, 7}}}, 8};
  EXPECT_EQ(format_allocation(a), "{0:[0,3],1:[5,7]}");
}

TEST(SmConnector, MisuseErrors) {
  SmConnector c;
  EXPECT_THROW(c.subscribe(kNode, 250, 1, [](const auto&) {}), SdkError);
  EXPECT_THROW(c.send_control(kNode, three_slices(10, 8, 7), 25), SdkError);
  EXPECT_THROW(c.connect("inproc://no-ric-here"), e2::ConnectionRefused);
}

namespace {

struct Loop {
  explicit Loop(const std::string& name) : log("RIC", LogLevel::Warn) {
    config.e2_listen = "inproc://" + name + "-e2";
    config.xapp_listen = "inproc://" + name + "-xapp";
    ric = std::make_unique<ric::RicService>(config, log);
    ric->start();
    auto scenario = parse_scenario_config(test::three_slice_scenario_json());
    ran::E2NodeAgent::Options opts;
    node = std::make_unique<ran::E2NodeAgent>(ran::Cell(scenario, 0, 3), opts);
    node->connect(ric->e2_endpoint());
    initial = scenario.initial_action();
  }

  XappConfig xapp_config(const std::string& logic) const {
    XappConfig c;
    c.ric = ric->xapp_endpoint();
    c.node = kNode;
    c.logic = logic;
    return c;
  }

  EventLog log;
  ric::RicConfig config;
  std::unique_ptr<ric::RicService> ric;
  std::unique_ptr<ran::E2NodeAgent> node;
  ControlAction initial;
};

}  // namespace

TEST(XappRuntime, WindowsAndControls) {
  Loop loop("runtime");
  auto dir = test::fresh_dir("xapp-runtime");
  auto config = loop.xapp_config("sched-slicing");
  config.kpm_log = dir / "kpm.csv";
  XappRuntime::Options opts;
  opts.initial_action = loop.initial;
  opts.control_log = dir / "controls.csv";
  XappRuntime rt(config, std::move(opts));
  rt.start();
  for (int t = 1; t <= 4000; ++t) {
    if (loop.node->tick() > 0) {
      ASSERT_TRUE(rt.wait_processed(static_cast<std::uint64_t>(t / 250), 5s));
    }
  }
  rt.stop();
  EXPECT_EQ(rt.processed(), 16u);
  auto controls = rt.controls();
  ASSERT_FALSE(controls.empty());
  EXPECT_LE(controls.size(), 4u);
  for (const auto& c : controls) {
    EXPECT_EQ(c.outcome.status, ControlStatus::Applied);
    EXPECT_EQ(c.timestamp_ms % 1000, 0u);
  }
  EXPECT_EQ(read_kpm_csv_file(dir / "kpm.csv").size(), 16u * 6u);
  auto trace = test::read_file(dir / "controls.csv");
  EXPECT_EQ(trace.substr(0, kControlCsvHeader.size()), kControlCsvHeader);
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), static_cast<long>(controls.size() + 1));
}

TEST(XappRuntime, StartFailsWithoutNode) {
  Loop loop("runtime-no-node");
  auto config = loop.xapp_config("none");
  config.node = "gnb:311-048-01000599";
  XappRuntime rt(config, {});
  EXPECT_THROW(rt.start(), SubscriptionRejected);
}

TEST(XappRuntime, ReconnectsAfterRicRestart) {
  Loop loop("runtime-reconnect");
  XappRuntime::Options opts;
  opts.backoff_min = 10ms;
  opts.backoff_max = 40ms;
  XappRuntime rt(loop.xapp_config("none"), std::move(opts));
  rt.start();
  loop.ric->stop();
  loop.ric = std::make_unique<ric::RicService>(loop.config, loop.log);
  loop.ric->start();
  loop.node->disconnect();
  loop.node->connect(loop.ric->e2_endpoint());
  ASSERT_TRUE(eventually([&] { return rt.reconnects() == 1 && loop.node->subscription_count() == 1; }));
  for (int t = 0; t < 250; ++t) loop.node->tick();
  EXPECT_TRUE(rt.wait_processed(1, 5s));
  rt.stop();
}
