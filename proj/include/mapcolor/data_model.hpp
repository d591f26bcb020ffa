#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mapcolor {

// One input row. `value` is empty when the source held null or a non-numeric
// literal; `raw` keeps the source JSON text of such a value so validation can
// report it. Names are stored trimmed.
struct Record {
  std::string name;
  std::optional<double> value;
  std::string raw;

  bool operator==(const Record&) const = default;
};

struct Dataset {
  std::vector<Record> records;
  std::string value_field;
  std::optional<std::string> title;

  bool operator==(const Dataset&) const = default;

  // All values in record order. Throws DataInvalid when any record lacks a
  // usable value.
  std::vector<double> values() const;
};

struct DataSummary {
  int count = 0;
  double min = 0;
  double max = 0;
  double mean = 0;
  double range = 0;
  std::string value_field;
};

struct ValidationReport {
  std::vector<std::string> missing_values;
  std::vector<std::string> duplicate_names;
  std::vector<std::pair<std::string, std::string>> non_numeric;
  std::vector<std::pair<std::string, double>> outliers;
  bool is_clean = true;
};

struct GeometryJoin {
  std::vector<std::string> matched;
  std::vector<std::string> unmatched_data;
  std::vector<std::string> unmatched_features;
};

// Fence multiplier for the advisory outlier rule: [Q1 - m*IQR, Q3 + m*IQR].
inline constexpr double kOutlierFence = 3.0;

std::string trim(std::string_view text);

Dataset parse_dataset(std::string_view raw, std::string_view value_field);
std::string serialize_dataset(const Dataset& d);

ValidationReport validate_dataset(const Dataset& d);
DataSummary summarize(const Dataset& d);

// Linear-interpolation quantile (R type 7) of an already sorted sample.
double sorted_quantile(const std::vector<double>& sorted, double p);

GeometryJoin join_geometry(const Dataset& d, const nlohmann::json& features,
                           std::string_view name_property);

void to_json(nlohmann::json& j, const Dataset& d);
void from_json(const nlohmann::json& j, Dataset& d);
void to_json(nlohmann::json& j, const DataSummary& s);
void to_json(nlohmann::json& j, const ValidationReport& r);
void to_json(nlohmann::json& j, const GeometryJoin& g);

}  // namespace mapcolor
