#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace slwlab {

// Flat key-value configuration document (TOML-subset on disk).
using ConfigValue = std::variant<bool, long long, double, std::string,
                                 std::vector<double>>;

// Insertion-ordered flat config; keys are unique.
class FlatConfig {
 public:
  void set(const std::string& key, ConfigValue v);
  bool has(const std::string& key) const;
  const ConfigValue& get(const std::string& key) const;
  const std::vector<std::pair<std::string, ConfigValue>>& items() const {
    return items_;
  }

  bool get_bool(const std::string& key) const;
  long long get_int(const std::string& key) const;
  double get_real(const std::string& key) const;  // accepts integer values too
  std::string get_string(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;

 private:
  std::vector<std::pair<std::string, ConfigValue>> items_;
};

std::string serialize_config_value(const ConfigValue& v);
// One `key = value` line per entry, LF endings.
std::string serialize_config_toml(const FlatConfig& cfg);
// Strict parser for the same subset: scalars, quoted strings, [..] arrays
// of numbers, # comments.  Throws naming the offending line.
FlatConfig parse_config_toml(const std::string& text);

struct Verdict {
  std::string name;
  bool pass = false;
  std::string details;
};

struct Table {
  std::string name;
  std::vector<std::string> headers;
  std::vector<std::vector<double>> columns;  // column-major, equal lengths

  void add_column(const std::string& header, std::vector<double> values);
  size_t rows() const;
};

// Structured study output.  Everything serialized here is a deterministic
// function of the config, so replays are byte-identical; timing and other
// environment-dependent facts belong in the run log, not in the report.
struct ExperimentReport {
  std::string study;
  FlatConfig config;
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, std::string>> notes;

  bool all_pass() const;
  std::string to_json() const;  // schema: 1
  // Writes report.json, config-echo.toml and tables/<name>.csv.
  void write(const std::filesystem::path& outdir) const;
};

std::string table_csv(const Table& t);

}  // namespace slwlab
