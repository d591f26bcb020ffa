#include "mapcolor/concept.hpp"

#include "mapcolor/data_model.hpp"
#include "mapcolor/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace mapcolor {

using nlohmann::json;

namespace {

std::string normalize_token(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || c == '-' || c == '_') {
      if (!out.empty() && out.back() != '_') out.push_back('_');
    } else if (std::isupper(c) && i > 0 && std::islower(static_cast<unsigned char>(text[i - 1]))) {
      out.push_back('_');
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      out.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string allowed_themes() {
  std::string out;
  for (Theme t : kAllThemes) {
    if (!out.empty()) out += ", ";
    out += theme_token(t);
  }
  return out;
}

// Integral JSON numbers only; 1.0 is accepted, 1.5 and "1" are not.
std::optional<int> as_level(const json& v) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 1e6) return static_cast<int>(d);
  }
  return std::nullopt;
}

constexpr const char* kLevelFields[] = {"temperature", "distance", "weight"};

json violations_json(const std::vector<Violation>& vs) {
  json out = json::array();
  for (const auto& v : vs) out.push_back({{"field", v.field}, {"message", v.message}});
  return out;
}

}  // namespace

std::string_view theme_token(Theme t) {
  switch (t) {
    case Theme::StrongContrast: return "strong_contrast";
    case Theme::Light: return "light";
    case Theme::Moderate: return "moderate";
    case Theme::Elegant: return "elegant";
    case Theme::Neutral: return "neutral";
  }
  return "moderate";
}

std::optional<Theme> parse_theme(std::string_view text) {
  const auto norm = normalize_token(text);
  for (Theme t : kAllThemes) {
    if (theme_token(t) == norm) return t;
  }
  return std::nullopt;
}

std::vector<Violation> validate_concept(const ColorConcept& c) {
  std::vector<Violation> out;
  const std::pair<const char*, int> levels[] = {
      {"temperature", c.temperature}, {"distance", c.distance}, {"weight", c.weight}};
  for (const auto& [field, level] : levels) {
    if (level < 0 || level > 2) {
      out.push_back({field, std::string(field) + " must be 0, 1 or 2, got " + std::to_string(level)});
    }
  }
  if (trim(c.rationale).empty()) out.push_back({"rationale", "rationale must not be empty"});
  return out;
}

std::vector<Violation> validate_concept_json(const json& j) {
  std::vector<Violation> out;
  if (!j.is_object()) return {{"", "concept must be a JSON object"}};

  if (auto it = j.find("theme"); it == j.end()) {
    out.push_back({"theme", "missing; allowed themes: " + allowed_themes()});
  } else if (!it->is_string() || !parse_theme(it->get<std::string>())) {
    out.push_back({"theme", "unknown theme " + it->dump() + "; allowed themes: " + allowed_themes()});
  }
  for (const char* field : kLevelFields) {
    auto it = j.find(field);
    if (it == j.end()) {
      out.push_back({field, "missing; expected 0, 1 or 2"});
      continue;
    }
    const auto level = as_level(*it);
    if (!level || *level < 0 || *level > 2) {
      out.push_back({field, std::string(field) + " must be 0, 1 or 2, got " + it->dump()});
    }
  }
  if (auto it = j.find("scheme_type"); it == j.end()) {
    out.push_back({"scheme_type", "missing; expected sequential or diverging"});
  } else if (!it->is_string() || !parse_scheme_type(it->get<std::string>())) {
    out.push_back({"scheme_type", "unknown scheme type " + it->dump() + "; expected sequential or diverging"});
  }
  if (auto it = j.find("rationale"); it == j.end() || !it->is_string() || trim(it->get<std::string>()).empty()) {
    out.push_back({"rationale", "rationale must be a non-empty string"});
  }
  return out;
}

ColorConcept concept_from_json(const json& j) {
  if (auto vs = validate_concept_json(j); !vs.empty()) {
    throw Error(Errc::ConceptInvalid, "colour concept failed validation: " + vs.front().message,
                json{{"violations", violations_json(vs)}});
  }
  ColorConcept c;
  c.theme = *parse_theme(j.at("theme").get<std::string>());
  c.temperature = *as_level(j.at("temperature"));
  c.distance = *as_level(j.at("distance"));
  c.weight = *as_level(j.at("weight"));
  c.scheme_type = *parse_scheme_type(j.at("scheme_type").get<std::string>());
  c.rationale = j.at("rationale").get<std::string>();
  return c;
}

void to_json(json& j, const ColorConcept& c) {
  j = json{{"theme", theme_token(c.theme)},
           {"temperature", c.temperature},
           {"distance", c.distance},
           {"weight", c.weight},
           {"scheme_type", scheme_type_token(c.scheme_type)},
           {"rationale", c.rationale}};
}

void from_json(const json& j, ColorConcept& c) { c = concept_from_json(j); }

ConceptPatch concept_patch_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::UnparseableResponse, "concept patch must be a JSON object");
  ConceptPatch p;
  if (auto it = j.find("theme"); it != j.end()) {
    if (!it->is_string() || !parse_theme(it->get<std::string>())) {
      throw Error(Errc::ConceptInvalid, "unknown theme " + it->dump() + "; allowed themes: " + allowed_themes(),
                  json{{"violations", json::array({{{"field", "theme"}, {"message", "unknown theme"}}})}});
    }
    p.theme = parse_theme(it->get<std::string>());
  }
  for (const char* field : kLevelFields) {
    auto it = j.find(field);
    if (it == j.end()) continue;
    const auto level = as_level(*it);
    if (!level || *level < 0 || *level > 2) {
      throw Error(Errc::PatchOutOfRange, std::string(field) + " must be 0, 1 or 2, got " + it->dump(),
                  json{{"field", field}});
    }
    if (std::string_view(field) == "temperature") p.temperature = level;
    if (std::string_view(field) == "distance") p.distance = level;
    if (std::string_view(field) == "weight") p.weight = level;
  }
  if (auto it = j.find("scheme_type"); it != j.end()) {
    if (!it->is_string() || !parse_scheme_type(it->get<std::string>())) {
      throw Error(Errc::ConceptInvalid, "unknown scheme type " + it->dump(),
                  json{{"violations", json::array({{{"field", "scheme_type"}, {"message", "unknown"}}})}});
    }
    p.scheme_type = parse_scheme_type(it->get<std::string>());
  }
  return p;
}

void to_json(json& j, const ConceptPatch& p) {
  j = json::object();
  if (p.theme) j["theme"] = theme_token(*p.theme);
  if (p.temperature) j["temperature"] = *p.temperature;
  if (p.distance) j["distance"] = *p.distance;
  if (p.weight) j["weight"] = *p.weight;
  if (p.scheme_type) j["scheme_type"] = scheme_type_token(*p.scheme_type);
}

ColorConcept apply_patch(ColorConcept c, const ConceptPatch& p) {
  if (p.theme) c.theme = *p.theme;
  if (p.temperature) c.temperature = *p.temperature;
  if (p.distance) c.distance = *p.distance;
  if (p.weight) c.weight = *p.weight;
  if (p.scheme_type) c.scheme_type = *p.scheme_type;
  return c;
}

bool LintReport::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const LintFinding& f) { return f.severity == Severity::Error; });
}

LintReport lint_scheme(const ColorScheme& s, const LintConfig& cfg) {
  LintReport report;
  const int k = s.k();
  if (k == 0) return report;
  std::vector<LabColor> lab;
  for (auto c : s.colors) lab.push_back(rgb_to_lab(c));
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
  };
  // Lightness may rise by less than the tolerance from `from` to `to`.
  auto check_step = [&](const char* rule, int from, int to) {
    if (lab[to].L > lab[from].L + cfg.lightness_tolerance) {
      report.findings.push_back({rule, Severity::Error,
                                 "lightness rises from class " + std::to_string(from) + " (L=" + fmt(lab[from].L) +
                                     ") to class " + std::to_string(to) + " (L=" + fmt(lab[to].L) + ")",
                                 {from, to}});
    }
  };

  if (s.scheme_type == SchemeType::Sequential) {
    for (int i = 0; i + 1 < k; ++i) check_step("R1", i, i + 1);
  } else {
    int brightest = 0;
    for (int i = 1; i < k; ++i) {
      if (lab[i].L > lab[brightest].L) brightest = i;
    }
    const bool central = k % 2 == 1 ? brightest == k / 2 : (brightest == k / 2 - 1 || brightest == k / 2);
    if (!central) {
      report.findings.push_back({"R2", Severity::Error,
                                 "lightest colour sits at class " + std::to_string(brightest) +
                                     " instead of the middle",
                                 {brightest}});
    }
    for (int i = brightest; i > 0; --i) check_step("R2", i, i - 1);
    for (int i = brightest; i + 1 < k; ++i) check_step("R2", i, i + 1);
  }

  for (int i = 0; i + 1 < k; ++i) {
    const double de = delta_e(lab[i], lab[i + 1]);
    if (de < cfg.min_adjacent_delta_e) {
      report.findings.push_back({"R3", Severity::Warning,
                                 "classes " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                     " differ by delta E " + fmt(de) + ", below " + fmt(cfg.min_adjacent_delta_e),
                                 {i, i + 1}});
    }
  }

  if (s.scheme_type == SchemeType::Sequential) {
    double sweep = 0;
    std::optional<double> prev_hue;
    std::vector<int> involved;
    for (int i = 0; i < k; ++i) {
      const auto lch = lab_to_lch(lab[i]);
      if (lch.C < cfg.achromatic_chroma) continue;
      if (prev_hue) {
        double dh = std::fmod(lch.h - *prev_hue + 540.0, 360.0) - 180.0;
        sweep += std::abs(dh);
      }
      prev_hue = lch.h;
      involved.push_back(i);
    }
    if (sweep > cfg.max_hue_sweep_degrees) {
      report.findings.push_back({"R4", Severity::Warning,
                                 "hue sweeps " + fmt(sweep) + " degrees across the ramp, above " +
                                     fmt(cfg.max_hue_sweep_degrees) + " (rainbow-like)",
                                 involved});
    }
  }
  return report;
}

void to_json(json& j, const LintFinding& f) {
  j = json{{"rule", f.rule},
           {"severity", f.severity == Severity::Error ? "error" : "warning"},
           {"message", f.message},
           {"classes", f.classes}};
}

void from_json(const json& j, LintFinding& f) {
  f.rule = j.at("rule").get<std::string>();
  f.severity = j.at("severity").get<std::string>() == "error" ? Severity::Error : Severity::Warning;
  f.message = j.at("message").get<std::string>();
  f.classes = j.at("classes").get<std::vector<int>>();
}

void to_json(json& j, const LintReport& r) {
  j = json{{"findings", r.findings}, {"has_errors", r.has_errors()}};
}

void from_json(const json& j, LintReport& r) { r.findings = j.at("findings").get<std::vector<LintFinding>>(); }

std::string concept_to_constraints(const ColorConcept& c) {
  static constexpr std::array<std::string_view, 5> kTheme{
      "Theme strong contrast: make neighbouring classes clearly distinct and span a wide lightness range, "
      "from a very light lowest class to a very dark highest class.",
      "Theme light: keep the palette airy, with high lightness and soft low-saturation colours; the darkest "
      "class should only be moderately dark.",
      "Theme moderate: use medium saturation and a balanced lightness range; avoid washed-out and extremely "
      "dark colours.",
      "Theme elegant: favour muted, soft tones with restrained saturation and smooth, harmonious transitions.",
      "Theme neutral: stay close to greys, beiges and desaturated hues and let lightness carry the ordering.",
  };
  static constexpr std::array<std::string_view, 3> kTemperature{
      "Temperature cold: prefer cool hues: blues, greens, purples; avoid reds, oranges and yellows.",
      "Temperature neutral: balance warm and cool hues, or use low-saturation hues without a strong warm or "
      "cool cast.",
      "Temperature warm: prefer warm hues: reds, oranges, yellows; avoid blues and greens.",
  };
  static constexpr std::array<std::string_view, 3> kDistance{
      "Distance near: give the high classes higher saturation and brightness so they advance and look "
      "prominent.",
      "Distance medium: keep saturation and brightness moderate so no class strongly advances or recedes.",
      "Distance far: use lower saturation and brightness so the map recedes and reads calmly.",
  };
  static constexpr std::array<std::string_view, 3> kWeight{
      "Weight light: keep the extremes light; the top class should stay mid-dark and the palette should feel "
      "fresh.",
      "Weight medium: use a moderate lightness range with a medium-dark top class.",
      "Weight heavy: use darker, heavier extremes; the top class should be very dark and saturated.",
  };
  static constexpr std::array<std::string_view, 2> kScheme{
      "Scheme sequential: order colours from light (lowest class) to dark (highest class) along one hue or a "
      "narrow hue range; never use rainbow sequences.",
      "Scheme diverging: use two contrasting hues meeting at a light, neutral midpoint; keep balanced "
      "midpoints and contrasting extremes, darkest at both ends.",
  };
  auto level = [](int v) { return static_cast<std::size_t>(std::clamp(v, 0, 2)); };

  std::string out = "Colour constraints:\n";
  out += "- " + std::string(kTheme[static_cast<std::size_t>(c.theme)]) + "\n";
  out += "- " + std::string(kTemperature[level(c.temperature)]) + "\n";
  out += "- " + std::string(kDistance[level(c.distance)]) + "\n";
  out += "- " + std::string(kWeight[level(c.weight)]) + "\n";
  out += "- " + std::string(kScheme[c.scheme_type == SchemeType::Sequential ? 0 : 1]) + "\n";
  return out;
}

}  // namespace mapcolor
