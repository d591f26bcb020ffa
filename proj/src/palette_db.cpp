#include "mapcolor/palette_db.hpp"

#include "mapcolor/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <tuple>

namespace mapcolor {

using nlohmann::json;

std::string_view scheme_type_token(SchemeType t) {
  return t == SchemeType::Sequential ? "sequential" : "diverging";
}

std::optional<SchemeType> parse_scheme_type(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "sequential") return SchemeType::Sequential;
  if (t == "diverging") return SchemeType::Diverging;
  return std::nullopt;
}

std::string_view scheme_source_token(SchemeSource s) {
  switch (s) {
    case SchemeSource::Generated: return "generated";
    case SchemeSource::Matched: return "matched";
    case SchemeSource::UserEdited: return "user_edited";
  }
  return "generated";
}

PaletteDB PaletteDB::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::CorruptPaletteFile, "cannot open palette file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

PaletteDB PaletteDB::from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::CorruptPaletteFile, std::string("palette file is not JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::CorruptPaletteFile, "palette file must hold a JSON array");

  PaletteDB db;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& entry : doc) {
    try {
      const auto type_text = entry.at("type").get<std::string>();
      if (type_text == "qualitative") continue;
      const auto type = parse_scheme_type(type_text);
      if (!type) throw Error(Errc::CorruptPaletteFile, "unknown palette type \"" + type_text + "\"");
      Palette p;
      p.name = entry.at("name").get<std::string>();
      p.type = *type;
      for (const auto& hex : entry.at("colors")) p.colors.push_back(parse_hex(hex.get<std::string>()));
      const int max_k = p.type == SchemeType::Sequential ? 9 : 11;
      if (p.k() < 3 || p.k() > max_k) {
        throw Error(Errc::CorruptPaletteFile,
                    "palette " + p.name + " has " + std::to_string(p.k()) + " colours, outside [3, " +
                        std::to_string(max_k) + "]");
      }
      if (!seen.emplace(p.name, p.k()).second) {
        throw Error(Errc::CorruptPaletteFile, "duplicate palette " + p.name + "/" + std::to_string(p.k()));
      }
      db.palettes_.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw Error(Errc::CorruptPaletteFile, std::string("malformed palette entry: ") + e.what());
    } catch (const Error& e) {
      if (e.code() == Errc::CorruptPaletteFile) throw;
      throw Error(Errc::CorruptPaletteFile, std::string("malformed palette entry: ") + e.what());
    }
  }
  if (db.size() != kReferenceSchemeCount) {
    std::cerr << "palette_db: loaded " << db.size() << " schemes; the ColorBrewer reference set has "
              << kReferenceSchemeCount << "\n";
  }
  return db;
}

const Palette* PaletteDB::find(std::string_view name, int k) const {
  for (const auto& p : palettes_) {
    if (p.name == name && p.k() == k) return &p;
  }
  return nullptr;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("MAPCOLOR_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return MAPCOLOR_DEFAULT_DATA_DIR;
}

double scheme_distance(const ColorScheme& a, const Palette& b, bool reversed) {
  if (a.k() != b.k()) {
    throw Error(Errc::LengthMismatch, "scheme has " + std::to_string(a.k()) + " colours, palette " + b.name +
                                          " has " + std::to_string(b.k()));
  }
  if (a.colors.empty()) return 0.0;
  const std::size_t n = a.colors.size();
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const RGBColor other = b.colors[reversed ? n - 1 - i : i];
    total += delta_e(rgb_to_lab(a.colors[i]), rgb_to_lab(other));
  }
  return total / static_cast<double>(n);
}

MatchResult match_scheme(const ColorScheme& candidate, const PaletteDB& db) {
  const Palette* best = nullptr;
  double best_distance = 0;
  bool best_reversed = false;
  for (const auto& p : db.palettes()) {
    if (p.type != candidate.scheme_type || p.k() != candidate.k()) continue;
    for (bool reversed : {false, true}) {
      const double d = scheme_distance(candidate, p, reversed);
      const bool better = best == nullptr ||
                          std::tie(d, p.name, reversed) < std::tie(best_distance, best->name, best_reversed);
      if (better) {
        best = &p;
        best_distance = d;
        best_reversed = reversed;
      }
    }
  }
  if (best == nullptr) {
    throw Error(Errc::NoCandidates, "no " + std::string(scheme_type_token(candidate.scheme_type)) +
                                        " palette with " + std::to_string(candidate.k()) + " colours");
  }
  return {*best, best_distance, best_reversed};
}

ColorScheme palette_as_scheme(const Palette& p, bool reversed, SchemeSource source) {
  ColorScheme s{p.colors, p.type, source};
  if (reversed) std::reverse(s.colors.begin(), s.colors.end());
  return s;
}

namespace {

json hex_list(const std::vector<RGBColor>& colors) {
  json out = json::array();
  for (auto c : colors) out.push_back(format_hex(c));
  return out;
}

std::vector<RGBColor> parse_hex_list(const json& j) {
  std::vector<RGBColor> out;
  for (const auto& h : j) out.push_back(parse_hex(h.get<std::string>()));
  return out;
}

}  // namespace

void to_json(json& j, const ColorScheme& s) {
  j = json{{"colors", hex_list(s.colors)},
           {"scheme_type", scheme_type_token(s.scheme_type)},
           {"source", scheme_source_token(s.source)}};
}

void from_json(const json& j, ColorScheme& s) {
  s.colors = parse_hex_list(j.at("colors"));
  s.scheme_type = parse_scheme_type(j.at("scheme_type").get<std::string>()).value_or(SchemeType::Sequential);
  const auto src = j.value("source", "generated");
  s.source = src == "matched" ? SchemeSource::Matched
             : src == "user_edited" ? SchemeSource::UserEdited
                                    : SchemeSource::Generated;
}

void to_json(json& j, const Palette& p) {
  j = json{{"name", p.name}, {"type", scheme_type_token(p.type)}, {"colors", hex_list(p.colors)}};
}

void from_json(const json& j, Palette& p) {
  p.name = j.at("name").get<std::string>();
  p.type = parse_scheme_type(j.at("type").get<std::string>()).value_or(SchemeType::Sequential);
  p.colors = parse_hex_list(j.at("colors"));
}

void to_json(json& j, const MatchResult& m) {
  j = json{{"palette", m.palette}, {"distance", m.distance}, {"reversed", m.reversed}};
}

void from_json(const json& j, MatchResult& m) {
  m.palette = j.at("palette").get<Palette>();
  m.distance = j.at("distance").get<double>();
  m.reversed = j.at("reversed").get<bool>();
}

}  // namespace mapcolor
