#include "ecto/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ecto/util/io.hpp"

namespace ecto::data {

namespace {

int parse_int(std::string_view text, std::string_view what, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("bad " + std::string(what) + " in timestamp '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == ',' && !quoted) {
      cells.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  cells.push_back(trim(line.substr(start)));
  return cells;
}

bool is_missing_token(std::string_view cell) {
  if (cell.empty()) return true;
  std::string lower(cell);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower == "nan" || lower == "na" || lower == "null" || lower == "none";
}

double parse_cell(std::string_view cell, std::size_t row, std::string_view column) {
  if (is_missing_token(cell)) return kMissing;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    throw DataError("row " + std::to_string(row) + ", column '" + std::string(column) + "': cannot parse '" +
                    std::string(cell) + "' as a number");
  }
  return value;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_wind_speed_name(const std::string& name) {
  const auto n = lowercase(name);
  if (n.find("dir") != std::string::npos) return false;
  return n.find("speed") != std::string::npos || n.rfind("ws", 0) == 0;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  const auto whole = text;
  text = trim(text);
  // YYYY-MM-DD[ T]HH:MM[:SS]
  if (text.size() < 16 || text[4] != '-' || text[7] != '-' || (text[10] != ' ' && text[10] != 'T') ||
      text[13] != ':') {
    throw DataError("unrecognized timestamp '" + std::string(whole) + "'");
  }
  const int year = parse_int(text.substr(0, 4), "year", whole);
  const int month = parse_int(text.substr(5, 2), "month", whole);
  const int day = parse_int(text.substr(8, 2), "day", whole);
  const int hour = parse_int(text.substr(11, 2), "hour", whole);
  const int minute = parse_int(text.substr(14, 2), "minute", whole);
  int second = 0;
  if (text.size() > 16) {
    if (text[16] != ':' || text.size() < 19) throw DataError("unrecognized timestamp '" + std::string(whole) + "'");
    second = parse_int(text.substr(17, 2), "second", whole);
    if (text.size() > 19 && text.substr(19) != "Z") {
      throw DataError("unrecognized timestamp suffix in '" + std::string(whole) + "'");
    }
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
    throw DataError("invalid calendar value in timestamp '" + std::string(whole) + "'");
  }
  return std::chrono::sys_days{ymd} + std::chrono::hours{hour} + std::chrono::minutes{minute} +
         std::chrono::seconds{second};
}

std::string format_timestamp(Timestamp ts) {
  const auto days = std::chrono::floor<std::chrono::days>(ts);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{ts - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

SeriesDataset SeriesDataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > length()) throw DataError("slice out of range");
  SeriesDataset out = *this;
  out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                        timestamps.begin() + static_cast<std::ptrdiff_t>(end));
  out.target.assign(target.begin() + static_cast<std::ptrdiff_t>(begin),
                    target.begin() + static_cast<std::ptrdiff_t>(end));
  for (std::size_t d = 0; d < exogenous.size(); ++d) {
    out.exogenous[d].assign(exogenous[d].begin() + static_cast<std::ptrdiff_t>(begin),
                            exogenous[d].begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

bool SeriesDataset::has_missing() const {
  auto any_nan = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
  };
  if (any_nan(target)) return true;
  return std::any_of(exogenous.begin(), exogenous.end(), any_nan);
}

void SeriesDataset::validate() const {
  const std::size_t n = length();
  if (timestamps.size() != n) throw DataError("timestamp count does not match target length");
  if (exogenous_names.size() != exogenous.size()) throw DataError("exogenous names and columns differ in count");
  for (std::size_t d = 0; d < exogenous.size(); ++d) {
    if (exogenous[d].size() != n) throw DataError("exogenous column '" + exogenous_names[d] + "' has wrong length");
  }
  if (resolution_minutes <= 0) throw DataError("resolution must be positive");
  if (!(rated_capacity > 0.0)) throw DataError("rated capacity must be positive");
  for (std::size_t i = 1; i < n; ++i) {
    if (timestamps[i] <= timestamps[i - 1]) {
      throw DataError("timestamps not strictly increasing at row " + std::to_string(i));
    }
  }
  std::vector<int> seen(exogenous.size(), 0);
  for (const auto& g : groups) {
    if (g.members.empty()) throw DataError("group '" + g.name + "' is empty");
    for (auto m : g.members) {
      if (m >= exogenous.size()) throw DataError("group '" + g.name + "' references unknown variable");
      ++seen[m];
    }
  }
  for (std::size_t d = 0; d < seen.size(); ++d) {
    if (seen[d] != 1) {
      throw DataError("variable '" + exogenous_names[d] + "' belongs to " + std::to_string(seen[d]) +
                      " groups; groups must partition the exogenous set");
    }
  }
}

Schema Schema::from_json(const nlohmann::json& doc) {
  Schema s;
  try {
    s.timestamp_column = doc.value("timestamp", s.timestamp_column);
    s.target_column = doc.value("target", s.target_column);
    s.resolution_minutes = doc.value("resolution_minutes", s.resolution_minutes);
    s.rated_capacity = doc.value("rated_capacity", s.rated_capacity);
    if (!doc.contains("exogenous") || !doc.at("exogenous").is_array()) {
      throw DataError("schema needs an 'exogenous' array");
    }
    for (const auto& entry : doc.at("exogenous")) {
      if (entry.is_string()) {
        s.exogenous.push_back({entry.get<std::string>(), ""});
      } else {
        s.exogenous.push_back({entry.at("column").get<std::string>(), entry.value("group", std::string{})});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema: ") + e.what());
  }
  if (s.resolution_minutes <= 0) throw DataError("schema resolution_minutes must be positive");
  if (!(s.rated_capacity > 0.0)) throw DataError("schema rated_capacity must be positive");
  return s;
}

Schema Schema::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = util::read_file(path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("schema " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

nlohmann::json Schema::to_json() const {
  nlohmann::json exo = nlohmann::json::array();
  for (const auto& e : exogenous) exo.push_back({{"column", e.column}, {"group", e.group}});
  return {{"timestamp", timestamp_column},
          {"target", target_column},
          {"resolution_minutes", resolution_minutes},
          {"rated_capacity", rated_capacity},
          {"exogenous", exo}};
}

void Schema::save(const std::filesystem::path& path) const { util::write_file_atomic(path, to_json().dump(2) + "\n"); }

std::vector<VariableGroup> default_groups(const std::vector<std::string>& names) {
  VariableGroup wind{"wind", {}};
  VariableGroup atm{"atmospheric", {}};
  for (std::size_t d = 0; d < names.size(); ++d) (is_wind_speed_name(names[d]) ? wind : atm).members.push_back(d);
  std::vector<VariableGroup> out;
  if (!wind.members.empty()) out.push_back(std::move(wind));
  if (!atm.members.empty()) out.push_back(std::move(atm));
  return out;
}

std::vector<VariableGroup> groups_from_labels(const std::vector<std::string>& names,
                                              const std::vector<std::string>& labels) {
  if (labels.size() != names.size()) throw DataError("group labels and names differ in count");
  if (std::all_of(labels.begin(), labels.end(), [](const std::string& l) { return l.empty(); })) {
    return default_groups(names);
  }
  std::vector<VariableGroup> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t d = 0; d < names.size(); ++d) {
    if (labels[d].empty()) throw DataError("variable '" + names[d] + "' has no group while others do");
    auto [it, inserted] = index.try_emplace(labels[d], out.size());
    if (inserted) out.push_back({labels[d], {}});
    out[it->second].members.push_back(d);
  }
  return out;
}

std::vector<std::vector<std::size_t>> group_members(const std::vector<VariableGroup>& groups) {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(g.members);
  return out;
}

SeriesDataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + " is empty");
  const auto header_cells = split_csv_line(line);
  std::vector<std::string> header(header_cells.begin(), header_cells.end());
  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError("declared column '" + name + "' not found in " + path.string());
    return static_cast<std::size_t>(it - header.begin());
  };

  SeriesDataset ds;
  ds.resolution_minutes = schema.resolution_minutes;
  ds.rated_capacity = schema.rated_capacity;
  ds.target_name = schema.target_column;
  ds.timestamp_name = schema.timestamp_column;
  const std::size_t ts_col = column_of(schema.timestamp_column);
  const std::size_t target_col = column_of(schema.target_column);
  std::vector<std::size_t> exo_cols;
  std::vector<std::string> labels;
  for (const auto& e : schema.exogenous) {
    exo_cols.push_back(column_of(e.column));
    ds.exogenous_names.push_back(e.column);
    labels.push_back(e.group);
  }
  ds.groups = groups_from_labels(ds.exogenous_names, labels);
  ds.exogenous.assign(exo_cols.size(), {});

  const std::chrono::seconds step{static_cast<long long>(schema.resolution_minutes) * 60};
  std::size_t row = 1;  // 1-based file line of the header
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    const Timestamp ts = parse_timestamp(cells[ts_col]);
    if (!ds.timestamps.empty()) {
      const auto prev = ds.timestamps.back();
      if (ts == prev) throw DataError("duplicate timestamp " + format_timestamp(ts) + " at row " + std::to_string(row));
      if (ts < prev) throw DataError("timestamps go backwards at row " + std::to_string(row));
      const auto delta = ts - prev;
      if (delta % step != std::chrono::seconds{0}) {
        throw DataError("row " + std::to_string(row) + " is off the " + std::to_string(schema.resolution_minutes) +
                        "-minute grid (gap of " + std::to_string(delta.count()) + " s)");
      }
      // Skipped grid points become all-missing rows so gap repair sees them.
      for (auto t = prev + step; t < ts; t += step) {
        ds.timestamps.push_back(t);
        ds.target.push_back(kMissing);
        for (auto& col : ds.exogenous) col.push_back(kMissing);
      }
    }
    ds.timestamps.push_back(ts);
    ds.target.push_back(parse_cell(cells[target_col], row, schema.target_column));
    for (std::size_t d = 0; d < exo_cols.size(); ++d) {
      ds.exogenous[d].push_back(parse_cell(cells[exo_cols[d]], row, ds.exogenous_names[d]));
    }
  }
  if (ds.timestamps.empty()) throw DataError(path.string() + " has no data rows");
  ds.validate();
  return ds;
}

std::string to_csv(const SeriesDataset& dataset) {
  std::string out = dataset.timestamp_name;
  for (const auto& n : dataset.exogenous_names) out += "," + n;
  out += "," + dataset.target_name + "\n";
  for (std::size_t i = 0; i < dataset.length(); ++i) {
    out += format_timestamp(dataset.timestamps[i]);
    for (const auto& col : dataset.exogenous) {
      out += ',';
      if (!std::isnan(col[i])) out += util::format_double(col[i]);
    }
    out += ',';
    if (!std::isnan(dataset.target[i])) out += util::format_double(dataset.target[i]);
    out += '\n';
  }
  return out;
}

void write_csv(const SeriesDataset& dataset, const std::filesystem::path& path) {
  util::write_file_atomic(path, to_csv(dataset));
}

Schema schema_of(const SeriesDataset& dataset) {
  Schema s;
  s.timestamp_column = dataset.timestamp_name;
  s.target_column = dataset.target_name;
  s.resolution_minutes = dataset.resolution_minutes;
  s.rated_capacity = dataset.rated_capacity;
  std::vector<std::string> labels(dataset.num_exogenous());
  for (const auto& g : dataset.groups)
    for (auto m : g.members) labels[m] = g.name;
  for (std::size_t d = 0; d < dataset.num_exogenous(); ++d) s.exogenous.push_back({dataset.exogenous_names[d], labels[d]});
  return s;
}

std::uint64_t fingerprint(const SeriesDataset& dataset) {
  std::uint64_t h = util::fnv1a64(to_csv(dataset));
  h = util::fnv1a64(schema_of(dataset).to_json().dump(), h);
  return h;
}

}  // namespace ecto::data
