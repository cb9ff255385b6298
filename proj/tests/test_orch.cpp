#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "orgym/core/kpm_csv.hpp"
#include "orgym/orch/batch.hpp"
#include "orgym/orch/compare.hpp"
#include "orgym/orch/experiment.hpp"
#include "orgym/orch/summary.hpp"
#include "support.hpp"

using namespace orgym;
using namespace orgym::orch;
namespace fs = std::filesystem;

namespace {

ExperimentSpec base_spec(const fs::path& out, double duration_s, const std::string& logic = "none",
                         Transport transport = Transport::Inproc) {
  ExperimentSpec spec;
  spec.scenario = parse_scenario_config(test::three_slice_scenario_json());
  if (!logic.empty()) {
    xapp::XappConfig x;
    x.logic = logic;
    spec.xapp = x;
  }
  spec.duration_s = duration_s;
  spec.seed = 5;
  spec.out = out;
  spec.transport = transport;
  return spec;
}

std::size_t data_lines(const fs::path& csv) {
  auto text = test::read_file(csv);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

int run_org(const std::string& args) {
  int status = std::system((std::string(ORGYM_ORG_BIN) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Summary, MedianAndMean) {
  EXPECT_DOUBLE_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median_of({4, 1, 3, 2}), 2.5);
  EXPECT_DOUBLE_EQ(median_of({}), 0.0);
  EXPECT_DOUBLE_EQ(mean_of({1, 2, 6}), 3.0);
}

TEST(Summary, AggregatesPerSlice) {
  std::vector<KpmRecord> rows;
  for (std::uint32_t i = 0; i < 4; ++i) {
    KpmRecord r;
    r.slice_id = static_cast<SliceId>(i % 2);
    r.tx_tbs = 10 * (i + 1);
    r.tx_bytes = 100;
    r.dl_buffer_bytes = i;
    rows.push_back(r);
  }
  auto s = summarize_records(rows, 250);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].samples, 2u);
  EXPECT_DOUBLE_EQ(s[0].mean_tx_tbs_rate, (40.0 + 120.0) / 2.0);  // TBs per window / 0.25 s
  EXPECT_DOUBLE_EQ(s[1].median_dl_buffer_bytes, 2.0);
  EXPECT_EQ(s[1].total_tx_bytes, 200u);
  EXPECT_TRUE(std::is_sorted(s[0].tx_tbs_rate_cdf.begin(), s[0].tx_tbs_rate_cdf.end()));
}

TEST(Experiment, SixtySecondsGivesSixTimesTwoFortyRows) {
  auto dir = test::fresh_dir("exp-60s");
  auto result = run_experiment(base_spec(dir, 60.0));
  const auto node = NodeId::for_base_station(1);
  EXPECT_EQ(result.ticks, 60000u);
  EXPECT_EQ(data_lines(dir / node_metrics_file(node)), 6u * 240u);
  EXPECT_EQ(data_lines(dir / xapp_kpm_file(node)), 6u * 240u);
  EXPECT_EQ(data_lines(dir / xapp_controls_file(node)), 0u);
  for (const char* f : {"ric.log", "run.json", "summary.json"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  auto ric_log = test::read_file(dir / "ric.log");
  EXPECT_NE(ric_log.find("RIC:node_connected node=gnb:311-048-01000501"), std::string::npos);
}

TEST(Experiment, ZeroDurationWritesHeadersOnly) {
  auto dir = test::fresh_dir("exp-zero");
  auto result = run_experiment(base_spec(dir, 0.0));
  EXPECT_EQ(result.ticks, 0u);
  const auto node = NodeId::for_base_station(1);
  EXPECT_EQ(test::read_file(dir / node_metrics_file(node)), std::string(kKpmCsvHeader) + "\n");
  EXPECT_EQ(test::read_file(dir / xapp_controls_file(node)), std::string(xapp::kControlCsvHeader) + "\n");
}

TEST(Experiment, NoXappStillLogsNodes) {
  auto dir = test::fresh_dir("exp-no-xapp");
  run_experiment(base_spec(dir, 2.0, ""));
  EXPECT_EQ(data_lines(dir / node_metrics_file(NodeId::for_base_station(1))), 6u * 8u);
  EXPECT_FALSE(fs::exists(dir / xapp_kpm_file(NodeId::for_base_station(1))));
}

TEST(Experiment, DeterministicAcrossTransports) {
  auto a = test::fresh_dir("exp-det-a"), b = test::fresh_dir("exp-det-b");
  run_experiment(base_spec(a, 20.0, "sched-slicing", Transport::Inproc));
  run_experiment(base_spec(b, 20.0, "sched-slicing", Transport::Tcp));
  const auto node = NodeId::for_base_station(1);
  for (const auto& f : {node_metrics_file(node), xapp_kpm_file(node), xapp_controls_file(node)}) {
    EXPECT_EQ(test::read_file(a / f), test::read_file(b / f)) << f;
  }
  EXPECT_GT(data_lines(a / xapp_controls_file(node)), 0u);
}

TEST(Experiment, SeedChangesOutput) {
  auto a = test::fresh_dir("exp-seed-a"), b = test::fresh_dir("exp-seed-b");
  auto sa = base_spec(a, 5.0), sb = base_spec(b, 5.0);
  sb.seed = 6;
  run_experiment(sa);
  run_experiment(sb);
  const auto f = node_metrics_file(NodeId::for_base_station(1));
  EXPECT_NE(test::read_file(a / f), test::read_file(b / f));
}

TEST(Experiment, SummaryIsRecomputableFromCsvs) {
  auto dir = test::fresh_dir("exp-summary");
  auto spec = base_spec(dir, 10.0, "sched");
  spec.scenario = parse_scenario_config(test::three_slice_scenario_json(3));
  auto result = run_experiment(spec);
  EXPECT_EQ(summary_to_json(summarize_run_dir(dir)), test::read_file(dir / "summary.json"));
  EXPECT_EQ(summary_to_json(result.summary), test::read_file(dir / "summary.json"));
  EXPECT_EQ(metrics_files(dir).size(), 3u);
}

TEST(Experiment, RejectsNegativeDuration) {
  auto dir = test::fresh_dir("exp-neg");
  EXPECT_THROW(run_experiment(base_spec(dir, -1.0)), ConfigError);
}

namespace {

fs::path write_batch_inputs(const fs::path& dir, bool break_second) {
  test::write_file(dir / "good.json", test::three_slice_scenario_json());
  test::write_file(dir / "bad.json", R"({"slice-allocation": "{0:[0,3],1:[3,7]}", "slice-scheduling-policy": [0,0],
                                         "slice-users": "{0:[1],1:[2]}"})");
  test::write_file(dir / "xapp.json", R"({"logic": "sched"})");
  test::write_file(dir / "batch.json", fmt::format(R"({{
    "out": "runs",
    "jobs": [
      {{"name": "sched", "scenario": "good.json", "xapp": "xapp.json", "duration-s": 3, "seeds": [1, 2, 3]}},
      {{"name": "logger", "scenario": "{}", "xapp": "none", "duration-s": 3, "seeds": [1, 2, 3]}}
    ]}})",
                                                   break_second ? "bad.json" : "good.json"));
  return dir / "batch.json";
}

}  // namespace

TEST(Batch, TwoJobsThreeSeeds) {
  auto dir = test::fresh_dir("batch-ok");
  auto spec = load_batch_file(write_batch_inputs(dir, false));
  auto report = run_batch(spec, Transport::Inproc);
  ASSERT_EQ(report.runs.size(), 6u);
  EXPECT_EQ(report.failures(), 0u);
  for (const auto& r : report.runs) {
    EXPECT_TRUE(fs::exists(dir / "runs" / r.job / std::to_string(r.seed) / "summary.json"));
  }
  EXPECT_TRUE(fs::exists(dir / "runs" / "batch_report.json"));

  // Rerunning the same batch reproduces every CSV byte.
  const auto f = node_metrics_file(NodeId::for_base_station(1));
  auto before = test::read_file(dir / "runs" / "sched" / "2" / f);
  run_batch(spec, Transport::Inproc);
  EXPECT_EQ(test::read_file(dir / "runs" / "sched" / "2" / f), before);
}

TEST(Batch, FailingJobIsIsolated) {
  auto dir = test::fresh_dir("batch-isolation");
  auto report = run_batch(load_batch_file(write_batch_inputs(dir, true)), Transport::Inproc);
  ASSERT_EQ(report.runs.size(), 6u);
  EXPECT_EQ(report.failures(), 3u);
  for (const auto& r : report.runs) EXPECT_EQ(r.ok, r.job == "sched") << r.job << " " << r.error;
}

TEST(Batch, MalformedFilesAreRejected) {
  auto dir = test::fresh_dir("batch-bad");
  EXPECT_THROW(parse_batch("[]", dir), BatchError);
  EXPECT_THROW(parse_batch(R"({"jobs": [{"name": "a", "scenario": "s", "xapp": "none", "duration-s": 0, "seeds": [1]}]})", dir),
               BatchError);
  EXPECT_THROW(parse_batch(R"({"jobs": [
      {"name": "a", "scenario": "s", "xapp": "none", "duration-s": 1, "seeds": [1]},
      {"name": "a", "scenario": "s", "xapp": "none", "duration-s": 1, "seeds": [2]}]})", dir),
               BatchError);
  EXPECT_THROW(parse_batch(R"({"jobs": [{"name": "a", "scenario": "s", "xapp": "none", "duration-s": 1, "seeds": [1, 1]}]})", dir),
               BatchError);
  EXPECT_THROW(load_batch_file(dir / "missing.json"), BatchError);
}

TEST(Compare, ReflexiveAndErrors) {
  auto dir = test::fresh_dir("compare");
  run_experiment(base_spec(dir / "run", 5.0));
  auto c = compare_runs(dir / "run", dir / "run", 1, "tx_tbs", dir / "cdf");
  EXPECT_EQ(c.pooled_a.median, c.pooled_b.median);
  EXPECT_EQ(c.pooled_a.mean, c.pooled_b.mean);
  EXPECT_EQ(c.dominant, Side::Tie);
  ASSERT_EQ(c.per_seed.size(), 1u);
  EXPECT_EQ(test::read_file(dir / "cdf" / "cdf_a.txt"), test::read_file(dir / "cdf" / "cdf_b.txt"));
  EXPECT_NE(format_comparison(c).find("median difference (b - a): 0.000"), std::string::npos);

  EXPECT_THROW(compare_runs(dir / "run", dir / "run", 9, "tx_tbs"), EmptyData);
  EXPECT_THROW(compare_runs(dir / "run", dir / "run", 1, "bs_id"), std::invalid_argument);

  fs::create_directories(dir / "broken");
  test::write_file(dir / "broken" / "gnb_x_metrics.csv",
                   "timestamp_ms,bs_id,ue_id,slice_id,dl_buffer_bytes,tx_bytes,tbs,dl_cqi,granted_rbgs,policy,slice_rbg_count\n");
  try {
    compare_runs(dir / "run", dir / "broken", 1, "tx_tbs");
    FAIL();
  } catch (const CsvSchemaError& e) {
    EXPECT_EQ(e.column(), "tbs");
  }
}

TEST(Compare, CdfFormat) {
  EXPECT_EQ(format_cdf({1, 2, 4, 8}), "1 0.25\n2 0.5\n4 0.75\n8 1\n");
}

TEST(Cli, ExitCodes) {
  auto dir = test::fresh_dir("cli");
  test::write_file(dir / "scenario.json", test::three_slice_scenario_json());
  test::write_file(dir / "bad.json", R"({"slice-allocation": "{0:[0,30]}", "slice-scheduling-policy": [0], "slice-users": "{0:[1]}"})");
  const auto scenario = (dir / "scenario.json").string();
  EXPECT_EQ(run_org(fmt::format("run --scenario {} --xapp none --duration 1 --seed 3 --out {}", scenario,
                                (dir / "ok").string())), 0);
  EXPECT_EQ(run_org(fmt::format("run --scenario {} --xapp none --duration 1 --out {}", (dir / "bad.json").string(),
                                (dir / "bad").string())), 2);
  EXPECT_EQ(run_org("run --duration 1"), 2);
  EXPECT_EQ(run_org(fmt::format("compare {} {} --slice 0 --metric tx_tbs --out {}", (dir / "ok").string(),
                                (dir / "ok").string(), (dir / "cmp").string())), 0);
  EXPECT_EQ(run_org(fmt::format("compare {} {} --slice 7 --metric tx_tbs --out {}", (dir / "ok").string(),
                                (dir / "ok").string(), (dir / "cmp").string())), 3);
  EXPECT_EQ(run_org(fmt::format("batch --jobs {}", (dir / "missing.json").string())), 2);
}
