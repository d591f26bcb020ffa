#include "mapcolor/error.hpp"
#include "mapcolor/session.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace mapcolor {

using nlohmann::json;

std::string format_legend_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string out = buf;
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "-0") out = "0";
  return out;
}

std::vector<LegendEntry> build_legend(const ClassBreaks& breaks, const ColorScheme& scheme) {
  const int k = breaks.k();
  if (scheme.k() != k) {
    throw Error(Errc::LengthMismatch,
                "scheme has " + std::to_string(scheme.k()) + " colours for " + std::to_string(k) + " classes");
  }
  std::vector<LegendEntry> out;
  for (int i = 0; i < k; ++i) {
    const auto lo = format_legend_number(breaks.bounds[static_cast<std::size_t>(i)]);
    const auto hi = format_legend_number(breaks.bounds[static_cast<std::size_t>(i) + 1]);
    out.push_back({"[" + lo + ", " + hi + (i == k - 1 ? "]" : ")"), format_hex(scheme.colors[static_cast<std::size_t>(i)])});
  }
  return out;
}

void to_json(json& j, const LegendEntry& e) { j = json{{"range", e.range}, {"color", e.color}}; }

void to_json(json& j, const StyledMap& m) {
  j = json{{"features", m.features}, {"legend", m.legend}, {"unmatched", m.unmatched}};
}

StyledMap render_styled_map(const Session& s, const json& features, std::string_view name_property) {
  if (!s.dataset || !s.classification) throw Error(Errc::StageIncomplete, "no classified data");
  const ColorScheme scheme = displayed_scheme(s);
  const auto& breaks = s.classification->chosen().breaks;
  const auto join = join_geometry(*s.dataset, features, name_property);
  const auto classes = assign_classes(*s.dataset, breaks);

  StyledMap out;
  out.legend = build_legend(breaks, scheme);
  out.unmatched = join.unmatched_features;
  out.features = {{"type", "FeatureCollection"}, {"features", json::array()}};
  for (const auto& feature : features.at("features")) {
    const auto& props = feature.value("properties", json::object());
    auto name_it = props.find(std::string(name_property));
    if (name_it == props.end() || !name_it->is_string()) continue;
    auto cls = classes.find(trim(name_it->get<std::string>()));
    if (cls == classes.end()) continue;
    json styled = feature;
    styled["properties"]["class_index"] = cls->second;
    styled["properties"]["fill"] = format_hex(scheme.colors[static_cast<std::size_t>(cls->second)]);
    out.features["features"].push_back(std::move(styled));
  }
  return out;
}

StyledMap render_styled_map(const Session& s) {
  if (!s.geometry) throw Error(Errc::StageIncomplete, "no geometry uploaded with the data");
  return render_styled_map(s, *s.geometry, s.name_property);
}

json export_bundle(const Session& s) {
  if (!s.color_concept) throw Error(Errc::StageIncomplete, "no colour concept yet");
  const StyledMap map = render_styled_map(s);
  const ColorScheme shown = displayed_scheme(s);
  json colors = json::array();
  for (auto c : shown.colors) colors.push_back(format_hex(c));
  json scheme{{"colors", colors},
              {"scheme_type", scheme_type_token(shown.scheme_type)},
              {"source", scheme_source_token(shown.source)},
              {"active", active_scheme_token(s.active_scheme)},
              {"match", nullptr},
              {"lint", s.lint ? json(*s.lint) : json(nullptr)}};
  if (s.match) {
    scheme["match"] = {{"palette", s.match->palette.name},
                       {"distance", s.match->distance},
                       {"reversed", s.match->reversed}};
  }
  return json{{"styled_map", map.features},
              {"legend", map.legend},
              {"concept", *s.color_concept},
              {"scheme", scheme},
              {"transcript", s.chat_history}};
}

void write_export_bundle(const json& bundle, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::pair<const char*, const char*> files[] = {{"styled_map", "styled_map.geojson"},
                                                       {"legend", "legend.json"},
                                                       {"concept", "concept.json"},
                                                       {"scheme", "scheme.json"},
                                                       {"transcript", "transcript.json"}};
  for (const auto& [key, name] : files) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::Internal, "cannot write " + (dir / name).string());
    out << bundle.at(key).dump(2) << "\n";
  }
}

}  // namespace mapcolor
