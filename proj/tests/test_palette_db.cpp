#include "mapcolor/palette_db.hpp"
#include "support.hpp"

#include <set>

using namespace mapcolor;
using testing::error_of;

namespace {

const PaletteDB& db() {
  static const PaletteDB d = PaletteDB::load(testing::data_dir() / "colorbrewer.json");
  return d;
}

ColorScheme scheme_of(std::initializer_list<const char*> hex, SchemeType t = SchemeType::Sequential) {
  ColorScheme s;
  s.scheme_type = t;
  for (const char* h : hex) s.colors.push_back(parse_hex(h));
  return s;
}

// Independent exhaustive scan: mean per-position Lab distance, both orientations.
double brute_distance(const ColorScheme& c, const Palette& p, bool reversed) {
  double sum = 0;
  const auto k = c.colors.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& q = p.colors[reversed ? k - 1 - i : i];
    const auto x = rgb_to_lab(c.colors[i]), y = rgb_to_lab(q);
    sum += std::sqrt((x.L - y.L) * (x.L - y.L) + (x.a - y.a) * (x.a - y.a) + (x.b - y.b) * (x.b - y.b));
  }
  return sum / static_cast<double>(k);
}

double brute_best(const ColorScheme& c) {
  double best = 1e300;
  for (const auto& p : db().palettes()) {
    if (p.type != c.scheme_type || p.k() != c.k()) continue;
    best = std::min({best, brute_distance(c, p, false), brute_distance(c, p, true)});
  }
  return best;
}

}  // namespace

TEST_CASE("bundled palettes satisfy the palette invariants") {
  std::set<std::pair<std::string, int>> seen;
  for (const auto& p : db().palettes()) {
    CAPTURE(p.name);
    CHECK(p.k() >= 3);
    CHECK(p.k() <= (p.type == SchemeType::Sequential ? 9 : 11));
    CHECK(seen.insert({p.name, p.k()}).second);
  }
  MESSAGE("bundled schemes: " << db().size() << ", reference count " << kReferenceSchemeCount);
}

TEST_CASE("published ColorBrewer values") {
  const Palette* y = db().find("YlOrRd", 3);
  REQUIRE(y != nullptr);
  CHECK(y->colors == std::vector<RGBColor>{parse_hex("#ffeda0"), parse_hex("#feb24c"), parse_hex("#f03b20")});
  const Palette* b = db().find("Blues", 5);
  REQUIRE(b != nullptr);
  CHECK(format_hex(b->colors.front()) == "#eff3ff");
  CHECK(format_hex(b->colors.back()) == "#08519c");
  CHECK(db().find("Set1", 5) == nullptr);  // qualitative schemes are excluded
}

TEST_CASE("loader rejects corrupt files") {
  CHECK(error_of([] { PaletteDB::from_json_text("{"); }) == Errc::CorruptPaletteFile);
  CHECK(error_of([] { PaletteDB::from_json_text(R"([{"name":"X","type":"sequential","colors":["#fff"]}])"); }) ==
        Errc::CorruptPaletteFile);
  CHECK(PaletteDB::from_json_text(R"([{"name":"X","type":"qualitative","colors":["#ffffff","#000000","#888888"]}])")
            .size() == 0);
  CHECK(error_of([] { PaletteDB::from_json_text(R"([{"name":"X","type":"cyclic","colors":["#ffffff","#000000","#888888"]}])"); }) ==
        Errc::CorruptPaletteFile);
  CHECK(error_of([] { PaletteDB::from_json_text(R"([{"name":"X","type":"sequential","colors":["#ffffff","#000000"]}])"); }) ==
        Errc::CorruptPaletteFile);
  CHECK(error_of([] { PaletteDB::load("/nonexistent/palettes.json"); }) == Errc::CorruptPaletteFile);
}

TEST_CASE("scheme_distance") {
  const Palette* b = db().find("Blues", 5);
  const auto self = palette_as_scheme(*b, false, SchemeSource::Generated);
  CHECK(scheme_distance(self, *b) == 0.0);

  // Mean of three Lab distances computed with scikit-image.
  const auto a = scheme_of({"#ff0000", "#00ff00", "#0000ff"});
  const Palette p{"hand", SchemeType::Sequential, {parse_hex("#808080"), parse_hex("#b48c64"), parse_hex("#ffffff")}};
  CHECK(std::abs(scheme_distance(a, p) - 122.96394985604188) < 0.02);

  // Symmetric in content.
  const Palette pa{"a", SchemeType::Sequential, a.colors};
  const auto sp = palette_as_scheme(p, false, SchemeSource::Generated);
  CHECK(scheme_distance(a, p) == doctest::Approx(scheme_distance(sp, pa)).epsilon(1e-15));

  CHECK(error_of([&] { scheme_distance(scheme_of({"#000000", "#ffffff", "#888888", "#111111"}), p); }) ==
        Errc::LengthMismatch);
}

TEST_CASE("every palette matches itself forwards and reversed") {
  for (const auto& p : db().palettes()) {
    CAPTURE(p.name);
    CAPTURE(p.k());
    const auto fwd = match_scheme(palette_as_scheme(p, false, SchemeSource::Generated), db());
    CHECK(fwd.palette.name == p.name);
    CHECK(fwd.palette.k() == p.k());
    CHECK(fwd.distance == 0.0);
    CHECK_FALSE(fwd.reversed);
    const auto rev = match_scheme(palette_as_scheme(p, true, SchemeSource::Generated), db());
    CHECK(rev.palette.name == p.name);
    CHECK(rev.distance == 0.0);
    CHECK(rev.reversed);
  }
}

TEST_CASE("property: match is the exhaustive minimum and survives hex round-trip") {
  testing::Gen gen(21);
  for (int trial = 0; trial < 300; ++trial) {
    const bool diverging = gen.coin();
    const int k = gen.integer(3, diverging ? 11 : 9);
    ColorScheme c;
    c.scheme_type = diverging ? SchemeType::Diverging : SchemeType::Sequential;
    for (int i = 0; i < k; ++i) c.colors.push_back(gen.rgb());
    const auto m = match_scheme(c, db());
    CHECK(m.distance == doctest::Approx(brute_best(c)).epsilon(1e-12));
    CHECK(m.distance == scheme_distance(c, m.palette, m.reversed));
    CHECK(m.palette.type == c.scheme_type);

    ColorScheme again = c;
    for (auto& x : again.colors) x = parse_hex(format_hex(x));
    const auto m2 = match_scheme(again, db());
    CHECK(m2.palette.name == m.palette.name);
    CHECK(m2.reversed == m.reversed);
  }
}

TEST_CASE("a one-step perturbation still finds the original palette") {
  testing::Gen gen(22);
  for (const auto& p : db().palettes()) {
    auto c = palette_as_scheme(p, false, SchemeSource::Generated);
    auto& col = c.colors[static_cast<std::size_t>(gen.integer(0, c.k() - 1))];
    col.g = static_cast<std::uint8_t>(col.g == 255 ? 254 : col.g + 1);
    const auto m = match_scheme(c, db());
    CAPTURE(p.name);
    CHECK(m.palette.name == p.name);
    CHECK(m.distance > 0);
    CHECK(m.distance == doctest::Approx(brute_best(c)).epsilon(1e-12));
  }
}

TEST_CASE("no candidates") {
  CHECK(error_of([] {
          match_scheme(scheme_of({"#000000", "#111111", "#222222", "#333333", "#444444", "#555555", "#666666",
                                  "#777777", "#888888", "#999999"}),
                       db());
        }) == Errc::NoCandidates);
}

TEST_CASE("scheme JSON round-trip") {
  auto s = scheme_of({"#ffeda0", "#feb24c", "#f03b20"}, SchemeType::Diverging);
  s.source = SchemeSource::UserEdited;
  const nlohmann::json j = s;
  CHECK(j["colors"][0] == "#ffeda0");
  CHECK(j.get<ColorScheme>() == s);
}
