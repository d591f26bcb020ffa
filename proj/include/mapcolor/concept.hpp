#pragma once

#include "mapcolor/palette_db.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mapcolor {

enum class Theme { StrongContrast, Light, Moderate, Elegant, Neutral };

inline constexpr std::array<Theme, 5> kAllThemes{Theme::StrongContrast, Theme::Light, Theme::Moderate,
                                                 Theme::Elegant, Theme::Neutral};

std::string_view theme_token(Theme t);
// Case-insensitive; spaces, hyphens, underscores and CamelCase all accepted.
std::optional<Theme> parse_theme(std::string_view text);

// Mood levels are 0..2: temperature cold/neutral/warm, distance
// near/medium/far, weight light/medium/heavy.
struct ColorConcept {
  Theme theme = Theme::Moderate;
  int temperature = 1;
  int distance = 1;
  int weight = 1;
  SchemeType scheme_type = SchemeType::Sequential;
  std::string rationale;

  bool operator==(const ColorConcept&) const = default;
};

inline constexpr std::array<std::string_view, 3> kTemperatureLevels{"cold", "neutral", "warm"};
inline constexpr std::array<std::string_view, 3> kDistanceLevels{"near", "medium", "far"};
inline constexpr std::array<std::string_view, 3> kWeightLevels{"light", "medium", "heavy"};

struct Violation {
  std::string field;
  std::string message;
};

std::vector<Violation> validate_concept(const ColorConcept& c);
// Checks raw structured output before it becomes a ColorConcept.
std::vector<Violation> validate_concept_json(const nlohmann::json& j);
// Throws ConceptInvalid carrying the violations.
ColorConcept concept_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ColorConcept& c);
void from_json(const nlohmann::json& j, ColorConcept& c);

// Changed fields only.
struct ConceptPatch {
  std::optional<Theme> theme;
  std::optional<int> temperature;
  std::optional<int> distance;
  std::optional<int> weight;
  std::optional<SchemeType> scheme_type;

  bool empty() const { return !theme && !temperature && !distance && !weight && !scheme_type; }
};

// Throws PatchOutOfRange for levels outside 0..2 and ConceptInvalid for
// unknown theme or scheme tokens.
ConceptPatch concept_patch_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ConceptPatch& p);
ColorConcept apply_patch(ColorConcept c, const ConceptPatch& p);

enum class Severity { Error, Warning };

struct LintFinding {
  std::string rule;
  Severity severity = Severity::Warning;
  std::string message;
  std::vector<int> classes;
};

struct LintReport {
  std::vector<LintFinding> findings;

  bool clean() const { return findings.empty(); }
  bool has_errors() const;
};

struct LintConfig {
  double lightness_tolerance = 1.0;
  double min_adjacent_delta_e = 10.0;
  double max_hue_sweep_degrees = 150.0;
  // Colours below this chroma carry no meaningful hue for the sweep rule.
  double achromatic_chroma = 5.0;
};

// Rules, in order: R1 sequential lightness ramp, R2 diverging light midpoint,
// R3 adjacent distinguishability, R4 sequential hue sweep.
LintReport lint_scheme(const ColorScheme& s, const LintConfig& cfg = {});

void to_json(nlohmann::json& j, const LintFinding& f);
void from_json(const nlohmann::json& j, LintFinding& f);
void to_json(nlohmann::json& j, const LintReport& r);
void from_json(const nlohmann::json& j, LintReport& r);

std::string concept_to_constraints(const ColorConcept& c);

}  // namespace mapcolor
