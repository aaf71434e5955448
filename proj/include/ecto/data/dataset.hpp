#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ecto::data {

/// Malformed input files, schema violations, or datasets too short to use.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Timestamp = std::chrono::sys_seconds;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// Accepts "YYYY-MM-DD HH:MM[:SS]" with either a space or 'T' separator.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp ts);

struct VariableGroup {
  std::string name;
  std::vector<std::size_t> members;  // exogenous column indices, ascending
};

/// Aligned target and exogenous series on a fixed time grid. Missing values
/// are NaN until repair_gaps() has run.
struct SeriesDataset {
  std::vector<Timestamp> timestamps;
  int resolution_minutes = 15;
  std::vector<double> target;                   // MW
  std::vector<std::string> exogenous_names;     // D names
  std::vector<std::vector<double>> exogenous;   // D columns, each of length n
  double rated_capacity = 1.0;                  // MW
  std::vector<VariableGroup> groups;
  std::string target_name = "power";
  std::string timestamp_name = "timestamp";

  std::size_t length() const { return target.size(); }
  std::size_t num_exogenous() const { return exogenous.size(); }
  std::size_t num_groups() const { return groups.size(); }
  /// Rows [begin, end) as an independent dataset with the same metadata.
  SeriesDataset slice(std::size_t begin, std::size_t end) const;
  bool has_missing() const;
  /// Checks column lengths, the group partition and timestamp ordering.
  void validate() const;
};

struct ExogenousColumn {
  std::string column;
  std::string group;  // empty: assigned by default_groups()
};

/// Column roles for CSV ingestion, stored as a small JSON document:
/// {"timestamp": "...", "target": "...", "resolution_minutes": 15,
///  "rated_capacity": 99.0, "exogenous": [{"column": "ws_10m", "group": "wind"}, ...]}
/// Exogenous entries may be plain strings, in which case the default
/// grouping is applied.
struct Schema {
  std::string timestamp_column = "timestamp";
  std::string target_column = "power";
  int resolution_minutes = 15;
  double rated_capacity = 1.0;
  std::vector<ExogenousColumn> exogenous;

  static Schema from_json(const nlohmann::json& doc);
  static Schema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void save(const std::filesystem::path& path) const;
};

/// Two groups: wind-speed channels ("wind") and every other atmospheric
/// variable including direction ("atmospheric"). A channel counts as wind
/// speed when its lowercased name contains "speed" or starts with "ws", and
/// does not mention direction.
std::vector<VariableGroup> default_groups(const std::vector<std::string>& names);

/// Builds groups from explicit labels, falling back to default_groups() when
/// every label is empty. Group order follows first appearance.
std::vector<VariableGroup> groups_from_labels(const std::vector<std::string>& names,
                                              const std::vector<std::string>& labels);

std::vector<std::vector<std::size_t>> group_members(const std::vector<VariableGroup>& groups);

/// Reads a CSV with a header row. Rows must be strictly increasing in time on
/// the declared resolution; skipped grid points become all-missing rows.
/// Empty cells and NaN/NA/null tokens are read as missing.
SeriesDataset load_csv(const std::filesystem::path& path, const Schema& schema);

/// Writes the canonical layout: timestamp, exogenous columns, target.
void write_csv(const SeriesDataset& dataset, const std::filesystem::path& path);
std::string to_csv(const SeriesDataset& dataset);
Schema schema_of(const SeriesDataset& dataset);

/// FNV-1a over the canonical CSV text.
std::uint64_t fingerprint(const SeriesDataset& dataset);

}  // namespace ecto::data
