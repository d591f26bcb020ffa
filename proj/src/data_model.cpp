#include "mapcolor/data_model.hpp"

#include "mapcolor/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace mapcolor {

using nlohmann::json;

std::string trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return std::string(text.substr(first, last - first + 1));
}

std::vector<double> Dataset::values() const {
  std::vector<double> out;
  out.reserve(records.size());
  std::vector<std::string> bad;
  for (const auto& r : records) {
    if (r.value) {
      out.push_back(*r.value);
    } else {
      bad.push_back(r.name);
    }
  }
  if (!bad.empty()) {
    throw Error(Errc::DataInvalid, "records without a usable numeric value",
                json{{"regions", bad}});
  }
  return out;
}

Dataset parse_dataset(std::string_view raw, std::string_view value_field) {
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw Error(Errc::MalformedInput, std::string("input is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::MalformedInput, "input must be a JSON array of objects");
  if (doc.empty()) throw Error(Errc::MalformedInput, "input array is empty");

  Dataset d;
  d.value_field = std::string(value_field);
  std::vector<std::size_t> missing_value_field;
  std::vector<std::size_t> missing_name;

  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    if (!item.is_object()) {
      throw Error(Errc::MalformedInput, "element " + std::to_string(i) + " is not an object",
                  json{{"index", i}});
    }
    Record rec;
    auto name_it = item.find("name");
    if (name_it == item.end()) {
      missing_name.push_back(i);
    } else if (!name_it->is_string()) {
      throw Error(Errc::MalformedInput, "field \"name\" of element " + std::to_string(i) +
                                            " is not a string",
                  json{{"index", i}});
    } else {
      rec.name = trim(name_it->get<std::string>());
    }

    auto value_it = item.find(value_field);
    if (value_it == item.end()) {
      missing_value_field.push_back(i);
    } else if (value_it->is_number()) {
      const double v = value_it->get<double>();
      if (std::isfinite(v)) {
        rec.value = v;
      } else {
        rec.raw = value_it->dump();
      }
    } else if (!value_it->is_null()) {
      rec.raw = value_it->dump();
    }
    d.records.push_back(std::move(rec));
  }

  if (!missing_name.empty()) {
    throw Error(Errc::MissingField, "field \"name\" absent",
                json{{"field", "name"}, {"indices", missing_name}});
  }
  if (!missing_value_field.empty()) {
    throw Error(Errc::MissingField, "field \"" + std::string(value_field) + "\" absent",
                json{{"field", value_field}, {"indices", missing_value_field}});
  }
  return d;
}

std::string serialize_dataset(const Dataset& d) {
  json arr = json::array();
  for (const auto& r : d.records) {
    json item;
    item["name"] = r.name;
    if (r.value) {
      item[d.value_field] = *r.value;
    } else if (!r.raw.empty()) {
      item[d.value_field] = json::parse(r.raw);
    } else {
      item[d.value_field] = nullptr;
    }
    arr.push_back(std::move(item));
  }
  return arr.dump();
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ValidationReport validate_dataset(const Dataset& d) {
  ValidationReport report;
  std::map<std::string, int> seen;
  for (const auto& r : d.records) {
    if (++seen[r.name] == 2) report.duplicate_names.push_back(r.name);
    if (!r.value) {
      if (r.raw.empty()) {
        report.missing_values.push_back(r.name);
      } else {
        report.non_numeric.emplace_back(r.name, r.raw);
      }
    }
  }

  std::vector<double> usable;
  for (const auto& r : d.records) {
    if (r.value) usable.push_back(*r.value);
  }
  if (usable.size() >= 4) {
    std::sort(usable.begin(), usable.end());
    const double q1 = sorted_quantile(usable, 0.25);
    const double q3 = sorted_quantile(usable, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - kOutlierFence * iqr;
    const double hi = q3 + kOutlierFence * iqr;
    for (const auto& r : d.records) {
      if (r.value && (*r.value < lo || *r.value > hi)) report.outliers.emplace_back(r.name, *r.value);
    }
  }

  report.is_clean = report.missing_values.empty() && report.duplicate_names.empty() &&
                    report.non_numeric.empty();
  return report;
}

DataSummary summarize(const Dataset& d) {
  const auto values = d.values();
  if (values.empty()) throw Error(Errc::MalformedInput, "dataset has no records");
  DataSummary s;
  s.value_field = d.value_field;
  s.count = static_cast<int>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  // Sorting first makes the sum independent of record order.
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double sum = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  s.mean = std::clamp(sum / static_cast<double>(s.count), s.min, s.max);
  s.range = s.max - s.min;
  return s;
}

GeometryJoin join_geometry(const Dataset& d, const json& features, std::string_view name_property) {
  if (!features.is_object() || features.value("type", "") != "FeatureCollection") {
    throw Error(Errc::InvalidGeoJSON, "expected a GeoJSON FeatureCollection");
  }
  auto feats = features.find("features");
  if (feats == features.end() || !feats->is_array()) {
    throw Error(Errc::InvalidGeoJSON, "FeatureCollection lacks a \"features\" array");
  }

  std::vector<std::string> feature_names;
  feature_names.reserve(feats->size());
  for (std::size_t i = 0; i < feats->size(); ++i) {
    const json& f = (*feats)[i];
    if (!f.is_object() || f.value("type", "") != "Feature") {
      throw Error(Errc::InvalidGeoJSON, "element " + std::to_string(i) + " is not a Feature");
    }
    auto props = f.find("properties");
    if (props == f.end() || !props->is_object()) {
      throw Error(Errc::InvalidGeoJSON, "feature " + std::to_string(i) + " has no properties");
    }
    auto name = props->find(name_property);
    if (name == props->end() || !name->is_string()) {
      throw Error(Errc::InvalidGeoJSON, "feature " + std::to_string(i) + " lacks string property \"" +
                                            std::string(name_property) + "\"");
    }
    feature_names.push_back(trim(name->get<std::string>()));
  }

  const std::set<std::string> feature_set(feature_names.begin(), feature_names.end());
  std::set<std::string> data_set;
  GeometryJoin join;
  for (const auto& r : d.records) {
    if (!data_set.insert(r.name).second) continue;
    (feature_set.count(r.name) ? join.matched : join.unmatched_data).push_back(r.name);
  }
  std::set<std::string> reported;
  for (const auto& name : feature_names) {
    if (!data_set.count(name) && reported.insert(name).second) join.unmatched_features.push_back(name);
  }
  return join;
}

void to_json(json& j, const Dataset& d) {
  json records = json::array();
  for (const auto& r : d.records) {
    json item{{"name", r.name}, {"value", r.value ? json(*r.value) : json(nullptr)}};
    if (!r.raw.empty()) item["raw"] = r.raw;
    records.push_back(std::move(item));
  }
  j = json{{"value_field", d.value_field}, {"records", std::move(records)}};
  if (d.title) j["title"] = *d.title;
}

void from_json(const json& j, Dataset& d) {
  d.value_field = j.at("value_field").get<std::string>();
  d.title.reset();
  if (j.contains("title")) d.title = j.at("title").get<std::string>();
  d.records.clear();
  for (const auto& item : j.at("records")) {
    Record r;
    r.name = item.at("name").get<std::string>();
    if (!item.at("value").is_null()) r.value = item.at("value").get<double>();
    r.raw = item.value("raw", "");
    d.records.push_back(std::move(r));
  }
}

void to_json(json& j, const DataSummary& s) {
  j = json{{"count", s.count}, {"min", s.min},     {"max", s.max},
           {"mean", s.mean},   {"range", s.range}, {"value_field", s.value_field}};
}

void to_json(json& j, const ValidationReport& r) {
  json non_numeric = json::array();
  for (const auto& [name, raw] : r.non_numeric) non_numeric.push_back({{"region", name}, {"raw", raw}});
  json outliers = json::array();
  for (const auto& [name, v] : r.outliers) outliers.push_back({{"region", name}, {"value", v}});
  j = json{{"missing_values", r.missing_values},
           {"duplicate_names", r.duplicate_names},
           {"non_numeric", std::move(non_numeric)},
           {"outliers", std::move(outliers)},
           {"is_clean", r.is_clean}};
}

void to_json(json& j, const GeometryJoin& g) {
  j = json{{"matched", g.matched},
           {"unmatched_data", g.unmatched_data},
           {"unmatched_features", g.unmatched_features}};
}

}  // namespace mapcolor
