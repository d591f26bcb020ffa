#pragma once

#include "mapcolor/colorspace.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mapcolor {

enum class SchemeType { Sequential, Diverging };
enum class SchemeSource { Generated, Matched, UserEdited };

std::string_view scheme_type_token(SchemeType t);
std::optional<SchemeType> parse_scheme_type(std::string_view text);
std::string_view scheme_source_token(SchemeSource s);

struct Palette {
  std::string name;
  SchemeType type = SchemeType::Sequential;
  std::vector<RGBColor> colors;

  int k() const { return static_cast<int>(colors.size()); }
};

// Colours ordered from the lowest class to the highest.
struct ColorScheme {
  std::vector<RGBColor> colors;
  SchemeType scheme_type = SchemeType::Sequential;
  SchemeSource source = SchemeSource::Generated;

  int k() const { return static_cast<int>(colors.size()); }
  bool operator==(const ColorScheme&) const = default;
};

struct MatchResult {
  Palette palette;
  double distance = 0;
  bool reversed = false;
};

// Number of sequential plus diverging ColorBrewer schemes, one per (name, k).
inline constexpr std::size_t kReferenceSchemeCount = 207;

class PaletteDB {
 public:
  static PaletteDB load(const std::filesystem::path& file);
  static PaletteDB from_json_text(std::string_view text);

  const std::vector<Palette>& palettes() const { return palettes_; }
  std::size_t size() const { return palettes_.size(); }
  const Palette* find(std::string_view name, int k) const;

 private:
  std::vector<Palette> palettes_;
};

// MAPCOLOR_DATA_DIR from the environment, else the source tree's data/.
std::filesystem::path default_data_dir();

// Mean per-position delta E in Lab; `reversed` walks the palette backwards.
double scheme_distance(const ColorScheme& a, const Palette& b, bool reversed = false);

MatchResult match_scheme(const ColorScheme& candidate, const PaletteDB& db);

ColorScheme palette_as_scheme(const Palette& p, bool reversed, SchemeSource source);

void to_json(nlohmann::json& j, const ColorScheme& s);
void from_json(const nlohmann::json& j, ColorScheme& s);
void to_json(nlohmann::json& j, const Palette& p);
void from_json(const nlohmann::json& j, Palette& p);
void to_json(nlohmann::json& j, const MatchResult& m);
void from_json(const nlohmann::json& j, MatchResult& m);

}  // namespace mapcolor
