#include "orgym/core/kpm_csv.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace orgym {

namespace {

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& text, std::string_view column, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v > std::numeric_limits<T>::max()) {
    throw std::runtime_error(fmt::format("line {}: bad {} value '{}'", line_no, column, text));
  }
  return static_cast<T>(v);
}

}  // namespace

std::vector<std::string> kpm_columns() { return split(kKpmCsvHeader); }

std::string format_kpm_row(const KpmRecord& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", r.timestamp_ms, r.bs_id, r.ue_id,
                     static_cast<unsigned>(r.slice_id), r.dl_buffer_bytes, r.tx_bytes, r.tx_tbs,
                     static_cast<unsigned>(r.dl_cqi), r.granted_rbgs,
                     static_cast<unsigned>(policy_code(r.policy)), r.slice_rbg_count);
}

std::vector<KpmRecord> read_kpm_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw CsvSchemaError("timestamp_ms", "empty file: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto expected = kpm_columns();
  auto got = split(line);
  for (std::size_t i = 0; i < std::max(expected.size(), got.size()); ++i) {
    if (i >= got.size() || i >= expected.size() || got[i] != expected[i]) {
      std::string col = i < got.size() ? got[i] : expected[i];
      throw CsvSchemaError(col, fmt::format("column {} differs: expected '{}', found '{}'", i + 1,
                                            i < expected.size() ? expected[i] : "",
                                            i < got.size() ? got[i] : ""));
    }
  }

  std::vector<KpmRecord> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != expected.size()) {
      throw std::runtime_error(fmt::format("line {}: expected {} fields, found {}", line_no,
                                           expected.size(), f.size()));
    }
    KpmRecord r;
    r.timestamp_ms = parse_field<std::uint64_t>(f[0], "timestamp_ms", line_no);
    r.bs_id = f[1];
    r.ue_id = parse_field<UeId>(f[2], "ue_id", line_no);
    r.slice_id = parse_field<SliceId>(f[3], "slice_id", line_no);
    r.dl_buffer_bytes = parse_field<std::uint64_t>(f[4], "dl_buffer_bytes", line_no);
    r.tx_bytes = parse_field<std::uint64_t>(f[5], "tx_bytes", line_no);
    r.tx_tbs = parse_field<std::uint32_t>(f[6], "tx_tbs", line_no);
    r.dl_cqi = parse_field<std::uint8_t>(f[7], "dl_cqi", line_no);
    r.granted_rbgs = parse_field<std::uint32_t>(f[8], "granted_rbgs", line_no);
    auto policy = policy_from_code(parse_field<std::uint8_t>(f[9], "policy", line_no));
    if (!policy) throw std::runtime_error(fmt::format("line {}: bad policy '{}'", line_no, f[9]));
    r.policy = *policy;
    r.slice_rbg_count = parse_field<std::uint32_t>(f[10], "slice_rbg_count", line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<KpmRecord> read_kpm_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  return read_kpm_csv(in);
}

bool is_kpm_metric(std::string_view column) {
  for (const auto& c : kpm_columns()) {
    if (c == column) return c != "bs_id";
  }
  return false;
}

double kpm_metric(const KpmRecord& r, std::string_view column) {
  if (column == "timestamp_ms") return static_cast<double>(r.timestamp_ms);
  if (column == "ue_id") return r.ue_id;
  if (column == "slice_id") return r.slice_id;
  if (column == "dl_buffer_bytes") return static_cast<double>(r.dl_buffer_bytes);
  if (column == "tx_bytes") return static_cast<double>(r.tx_bytes);
  if (column == "tx_tbs") return r.tx_tbs;
  if (column == "dl_cqi") return r.dl_cqi;
  if (column == "granted_rbgs") return r.granted_rbgs;
  if (column == "policy") return policy_code(r.policy);
  if (column == "slice_rbg_count") return r.slice_rbg_count;
  throw std::invalid_argument(fmt::format("unknown metric '{}'", column));
}

KpmCsvWriter::KpmCsvWriter(const std::filesystem::path& path) : out_(path, std::ios::trunc) {
  if (!out_) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
  out_ << kKpmCsvHeader << '\n';
}

void KpmCsvWriter::write(const KpmRecord& r) { out_ << format_kpm_row(r) << '\n'; }

void KpmCsvWriter::write(const std::vector<KpmRecord>& rows) {
  for (const auto& r : rows) write(r);
}

}  // namespace orgym
