#include "orgym/orch/batch.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace orgym::orch {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

BatchSpec parse_batch(std::string_view text, const std::filesystem::path& base_dir) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw BatchError("batch file is not a JSON object");
  if (!doc.contains("jobs") || !doc["jobs"].is_array()) throw BatchError("batch file needs a \"jobs\" array");
  std::filesystem::path default_out = base_dir / "batch-out";
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw BatchError("\"out\" must be a path");
    default_out = resolve(base_dir, doc["out"].get<std::string>());
  }

  BatchSpec spec;
  std::set<std::string> names;
  std::set<std::filesystem::path> dirs;
  for (const auto& j : doc["jobs"]) {
    try {
      BatchJob job;
      job.name = j.at("name").get<std::string>();
      if (job.name.empty() || job.name.find('/') != std::string::npos) {
        throw BatchError(fmt::format("invalid job name '{}'", job.name));
      }
      if (!names.insert(job.name).second) throw BatchError(fmt::format("duplicate job name '{}'", job.name));
      job.scenario = resolve(base_dir, j.at("scenario").get<std::string>());
      const auto xapp = j.at("xapp").get<std::string>();
      if (xapp != "none") job.xapp = resolve(base_dir, xapp);
      job.duration_s = j.at("duration-s").get<double>();
      if (!(job.duration_s > 0.0)) throw BatchError(fmt::format("job '{}': duration must be positive", job.name));
      job.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      if (job.seeds.empty()) throw BatchError(fmt::format("job '{}': no seeds", job.name));
      job.out = j.contains("out") ? resolve(base_dir, j["out"].get<std::string>()) : default_out;
      for (auto seed : job.seeds) {
        auto dir = (job.out / job.name / std::to_string(seed)).lexically_normal();
        if (!dirs.insert(dir).second) throw BatchError(fmt::format("run directory {} used twice", dir.string()));
      }
      spec.jobs.push_back(std::move(job));
    } catch (const json::exception& e) {
      throw BatchError(fmt::format("malformed job entry: {}", e.what()));
    }
  }
  return spec;
}

BatchSpec load_batch_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw BatchError(e.what());
  }
  return parse_batch(text, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::size_t BatchReport::failures() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.ok ? 0 : 1;
  return n;
}

BatchReport run_batch(const BatchSpec& spec, Transport transport) {
  BatchReport report;
  std::map<std::filesystem::path, BatchReport> per_root;
  for (const auto& job : spec.jobs) {
    for (auto seed : job.seeds) {
      BatchRun run;
      run.job = job.name;
      run.seed = seed;
      run.dir = job.out / job.name / std::to_string(seed);
      try {
        ExperimentSpec es;
        es.scenario = load_scenario_file(job.scenario.string());
        if (job.xapp) es.xapp = xapp::load_xapp_config(*job.xapp);
        es.duration_s = job.duration_s;
        es.seed = seed;
        es.out = run.dir;
        es.transport = transport;
        run.summary = run_experiment(es).summary;
        run.ok = true;
      } catch (const std::exception& e) {
        run.error = e.what();
      }
      per_root[job.out].runs.push_back(run);
      report.runs.push_back(std::move(run));
    }
  }
  for (const auto& [root, sub] : per_root) {
    std::filesystem::create_directories(root);
    std::ofstream out(root / "batch_report.json", std::ios::binary);
    out << batch_report_to_json(sub);
  }
  return report;
}

std::string batch_report_to_json(const BatchReport& report) {
  ordered_json doc;
  doc["runs"] = ordered_json::array();
  doc["failures"] = report.failures();
  for (const auto& r : report.runs) {
    ordered_json j;
    j["job"] = r.job;
    j["seed"] = r.seed;
    j["dir"] = r.dir.string();
    j["status"] = r.ok ? "ok" : "failed";
    if (!r.ok) j["error"] = r.error;
    if (r.summary) {
      ordered_json slices = ordered_json::array();
      for (const auto& s : r.summary->slices) {
        slices.push_back(ordered_json{{"slice", s.slice},
                                      {"samples", s.samples},
                                      {"mean-tx-tbs-rate", s.mean_tx_tbs_rate},
                                      {"median-tx-tbs-rate", s.median_tx_tbs_rate},
                                      {"mean-dl-buffer-bytes", s.mean_dl_buffer_bytes},
                                      {"median-dl-buffer-bytes", s.median_dl_buffer_bytes},
                                      {"total-tx-bytes", s.total_tx_bytes}});
      }
      j["slices"] = std::move(slices);
    }
    doc["runs"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

}  // namespace orgym::orch
