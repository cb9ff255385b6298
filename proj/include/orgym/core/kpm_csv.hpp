#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "orgym/core/types.hpp"

namespace orgym {

inline constexpr std::string_view kKpmCsvHeader =
    "timestamp_ms,bs_id,ue_id,slice_id,dl_buffer_bytes,tx_bytes,tx_tbs,dl_cqi,granted_rbgs,policy,"
    "slice_rbg_count";

std::vector<std::string> kpm_columns();

class CsvSchemaError : public std::runtime_error {
 public:
  CsvSchemaError(std::string column, const std::string& what)
      : std::runtime_error(what), column_(std::move(column)) {}
  /// First column that differs from the expected schema.
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

std::string format_kpm_row(const KpmRecord& r);

/// Reads a KPM CSV; throws CsvSchemaError if the header differs and
/// std::runtime_error on malformed rows.
std::vector<KpmRecord> read_kpm_csv(std::istream& in);
std::vector<KpmRecord> read_kpm_csv_file(const std::filesystem::path& path);

/// Numeric value of `column` in `r` (the bs_id column has no numeric value).
double kpm_metric(const KpmRecord& r, std::string_view column);
bool is_kpm_metric(std::string_view column);

/// Append-only writer that emits the header on open.
class KpmCsvWriter {
 public:
  explicit KpmCsvWriter(const std::filesystem::path& path);

  void write(const KpmRecord& r);
  void write(const std::vector<KpmRecord>& rows);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

}  // namespace orgym
