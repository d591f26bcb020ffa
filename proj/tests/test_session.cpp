#include "mapcolor/session.hpp"
#include "support.hpp"

using namespace mapcolor;
using nlohmann::json;
using testing::error_of;

namespace {

std::shared_ptr<const PaletteDB> palettes() {
  static const auto db = std::make_shared<const PaletteDB>(PaletteDB::load(testing::data_dir() / "colorbrewer.json"));
  return db;
}

Designer offline() {
  auto fb = std::make_shared<FixtureBackend>(testing::data_dir() / "fixtures" / "llm");
  return Designer(std::make_shared<Gateway>(ProviderConfig{}, fb), palettes());
}

json geometry() { return json::parse(testing::provinces_text()); }

Session stage1(const Designer& d) {
  Session s;
  d.upload(s, testing::gdp_text(), "gdp", geometry(), "name");
  d.run_stage1(s, 5);
  return s;
}

Session liberty(const Designer& d) {
  Session s = stage1(d);
  d.run_stage2(s, "Statue of Liberty like");
  d.run_stage3(s);
  return s;
}

std::string dump(const Session& s) { return json(s).dump(); }

double mean_chroma(const ColorScheme& s) {
  double sum = 0;
  for (auto c : s.colors) sum += lab_to_lch(rgb_to_lab(c)).C;
  return sum / s.k();
}

}  // namespace

TEST_CASE("GDP pipeline, Statue of Liberty intent") {
  const auto d = offline();
  Session s = stage1(d);
  REQUIRE(s.classification);
  CHECK(s.classification->k == 5);
  const auto& ranked = s.classification->ranked;
  for (const auto& r : ranked) CHECK(r.gvf <= ranked.front().gvf);
  CHECK(s.classification->selected == ranked.front().breaks.method);
  CHECK(s.classification->selected == Method::FisherJenks);
  CHECK(s.analysis->suggested_scheme_type == SchemeType::Sequential);
  CHECK(s.scheme_type == SchemeType::Sequential);

  d.run_stage2(s, "Statue of Liberty like");
  CHECK(*s.color_concept == ColorConcept{Theme::Elegant, 1, 1, 1, SchemeType::Sequential, s.color_concept->rationale});
  CHECK_FALSE(s.scheme);

  d.run_stage3(s);
  REQUIRE(s.scheme);
  CHECK(s.scheme->k() == 5);
  CHECK(s.scheme->source == SchemeSource::Generated);
  REQUIRE(s.match);
  CHECK(s.match->palette.type == SchemeType::Sequential);
  CHECK(s.match->palette.k() == 5);
  CHECK(s.lint);
  CHECK_FALSE(s.lint->has_errors());
  CHECK(invariant_violations(s).empty());
  CHECK(s.chat_history.back().content.find("Closest ColorBrewer scheme: " + s.match->palette.name) !=
        std::string::npos);
}

TEST_CASE("warm intent") {
  const auto d = offline();
  Session s = stage1(d);
  d.run_stage2(s, "a warm, eye-catching map of economic output");
  CHECK(s.color_concept->theme == Theme::StrongContrast);
  CHECK(s.color_concept->temperature == 2);
  d.run_stage3(s);
  CHECK(format_hex(s.scheme->colors.back()) == "#b10f2e");
}

TEST_CASE("active scheme toggle") {
  const auto d = offline();
  Session s = liberty(d);
  const auto generated = displayed_scheme(s);
  d.set_active(s, ActiveScheme::Matched);
  const auto matched = displayed_scheme(s);
  CHECK(matched.source == SchemeSource::Matched);
  CHECK(matched.colors == palette_as_scheme(s.match->palette, s.match->reversed, SchemeSource::Matched).colors);
  d.set_active(s, ActiveScheme::Generated);
  CHECK(displayed_scheme(s) == generated);
}

TEST_CASE("direct edit changes one colour") {
  const auto d = offline();
  Session s = liberty(d);
  const auto before = s.scheme->colors;
  d.apply_patch(s, DirectEdit{2, parse_hex("#123456")});
  for (int i = 0; i < 5; ++i) {
    CAPTURE(i);
    CHECK(s.scheme->colors[static_cast<std::size_t>(i)] == (i == 2 ? parse_hex("#123456") : before[static_cast<std::size_t>(i)]));
  }
  CHECK(s.scheme->source == SchemeSource::UserEdited);
  CHECK(s.lint);
  CHECK(error_of([&] { d.apply_patch(s, DirectEdit{5, parse_hex("#000000")}); }) == Errc::PatchOutOfRange);
}

TEST_CASE("editing the matched palette starts from what is displayed") {
  const auto d = offline();
  Session s = liberty(d);
  d.set_active(s, ActiveScheme::Matched);
  const auto shown = displayed_scheme(s).colors;
  d.apply_patch(s, DirectEdit{0, parse_hex("#ffffff")});
  CHECK(s.active_scheme == ActiveScheme::Generated);
  CHECK(std::equal(shown.begin() + 1, shown.end(), s.scheme->colors.begin() + 1));
}

TEST_CASE("chat: more vivid raises chroma") {
  const auto d = offline();
  Session s = liberty(d);
  const auto before = *s.scheme;
  const auto out = d.chat(s, "make these colors more vivid");
  CHECK(out.effect == ChatEffect::SchemePatch);
  // Independent expectation: the recorded +15 chroma step on each colour.
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(s.scheme->colors[i] == adjust(before.colors[i], {0, 15, 0}));
    CHECK(lab_to_lch(rgb_to_lab(s.scheme->colors[i])).C >= lab_to_lch(rgb_to_lab(before.colors[i])).C);
  }
  CHECK(mean_chroma(*s.scheme) > mean_chroma(before) + 5);
  CHECK(s.chat_history.back().role == "assistant");
}

TEST_CASE("chat: brighter raises lightness") {
  const auto d = offline();
  Session s = liberty(d);
  const auto before = *s.scheme;
  d.chat(s, "make the colors brighter");
  for (std::size_t i = 0; i < 5; ++i) CHECK(rgb_to_lab(s.scheme->colors[i]).L > rgb_to_lab(before.colors[i]).L);
}

TEST_CASE("chat: soft tones patch the concept and clear the scheme") {
  const auto d = offline();
  Session s = stage1(d);
  d.run_stage2(s, "Statue of Liberty like");
  const auto out = d.chat(s, "classic soft tones");
  CHECK(out.effect == ChatEffect::ConceptPatch);
  CHECK(s.color_concept->weight == 0);
  CHECK(s.color_concept->theme == Theme::Elegant);
  CHECK_FALSE(s.scheme);
}

TEST_CASE("chat: a new intent runs both design stages") {
  const auto d = offline();
  Session s = stage1(d);
  const auto out = d.chat(s, "I want a Statue of Liberty like map");
  CHECK(out.effect == ChatEffect::NewDesign);
  CHECK(s.color_concept->theme == Theme::Elegant);
  REQUIRE(s.scheme);
  CHECK(*s.scheme == liberty(d).scheme.value());
}

TEST_CASE("concept patch clears the scheme") {
  const auto d = offline();
  Session s = liberty(d);
  ConceptPatch p;
  p.temperature = 2;
  d.apply_patch(s, p);
  CHECK(s.color_concept->temperature == 2);
  CHECK_FALSE(s.scheme);
  CHECK_FALSE(s.match);
  CHECK(invariant_violations(s).empty());
}

TEST_CASE("stage order is enforced") {
  const auto d = offline();
  Session s;
  CHECK(error_of([&] { d.run_stage1(s, 5); }) == Errc::StageIncomplete);
  d.upload(s, testing::gdp_text(), "gdp");
  CHECK(error_of([&] { d.run_stage2(s, "x"); }) == Errc::StageIncomplete);
  CHECK(error_of([&] { d.run_stage3(s); }) == Errc::StageIncomplete);
  CHECK(error_of([&] { d.set_active(s, ActiveScheme::Matched); }) == Errc::StageIncomplete);
  CHECK(error_of([&] { displayed_scheme(s); }) == Errc::StageIncomplete);
  CHECK(error_of([&] { d.chat(s, "brighter"); }) == Errc::StageIncomplete);
}

TEST_CASE("failed operations leave the session byte-identical") {
  const auto d = offline();
  Session s = liberty(d);
  const auto before = dump(s);
  CHECK(error_of([&] { d.run_stage1(s, 2); }) == Errc::BadK);
  CHECK(error_of([&] { d.run_stage2(s, "a gothic cathedral"); }) == Errc::FixtureMiss);
  CHECK(error_of([&] { d.chat(s, "something unrecorded"); }) == Errc::FixtureMiss);
  CHECK(error_of([&] { d.apply_patch(s, DirectEdit{-1, {}}); }) == Errc::PatchOutOfRange);
  ConceptPatch bad;
  bad.weight = 3;
  CHECK(error_of([&] { d.apply_patch(s, bad); }) == Errc::PatchOutOfRange);
  CHECK(error_of([&] { d.upload(s, R"([{"name":"a","gdp":"x"}])", "gdp"); }) == Errc::DataInvalid);
  CHECK(dump(s) == before);
}

TEST_CASE("method switch and scheme type") {
  const auto d = offline();
  Session s = liberty(d);
  d.select_method(s, Method::Quantiles);
  CHECK(s.classification->chosen().breaks.method == Method::Quantiles);
  CHECK(s.color_concept);
  CHECK_FALSE(s.scheme);
  d.set_scheme_type(s, SchemeType::Diverging);
  CHECK(s.color_concept->scheme_type == SchemeType::Diverging);
  CHECK(s.scheme_type == SchemeType::Diverging);
}

TEST_CASE("property: random operation sequences keep the stage invariants") {
  const auto d = offline();
  testing::Gen gen(71);
  const char* intents[] = {"Statue of Liberty like", "a warm, eye-catching map of economic output", "unknown"};
  const char* utterances[] = {"make the colors brighter", "make these colors more vivid", "classic soft tones",
                              "I want a Statue of Liberty like map"};
  for (int run = 0; run < 25; ++run) {
    Session s;
    for (int step = 0; step < 12; ++step) {
      const auto before = dump(s);
      const int op = gen.integer(0, 9);
      try {
        switch (op) {
          case 0: d.upload(s, testing::gdp_text(), "gdp", geometry()); break;
          case 1: d.run_stage1(s, gen.integer(0, 3) == 0 ? gen.integer(2, 12) : 5); break;
          case 2: d.run_stage2(s, intents[gen.integer(0, 2)]); break;
          case 3: d.run_stage3(s); break;
          case 4: d.apply_patch(s, DirectEdit{gen.integer(-1, 5), gen.rgb()}); break;
          case 5: d.apply_patch(s, SchemePatch{ColorAdjustment{gen.real(-10, 10), gen.real(-10, 10), 0}, {}}); break;
          case 6: {
            ConceptPatch p;
            p.weight = gen.integer(0, 3);
            d.apply_patch(s, p);
            break;
          }
          case 7: d.set_active(s, gen.coin() ? ActiveScheme::Matched : ActiveScheme::Generated); break;
          case 8: d.select_method(s, gen.coin() ? Method::FisherJenks : Method::EqualIntervals); break;
          case 9: d.chat(s, utterances[gen.integer(0, 3)]); break;
        }
      } catch (const Error&) {
        CHECK(dump(s) == before);
      }
      CAPTURE(op);
      CHECK(invariant_violations(s).empty());
    }
  }
}

TEST_CASE("legend numbers") {
  CHECK(format_legend_number(1.0) == "1");
  CHECK(format_legend_number(1.5) == "1.5");
  CHECK(format_legend_number(239.27) == "239.27");
  CHECK(format_legend_number(1234.567) == "1234.57");
  CHECK(format_legend_number(-0.001) == "0");
  CHECK(format_legend_number(-12.3) == "-12.3");
  const ClassBreaks b{Method::EqualIntervals, {0, 1.5, 3, 4.5}};
  ColorScheme sc;
  sc.colors = {parse_hex("#ffffff"), parse_hex("#888888"), parse_hex("#000000")};
  const auto legend = build_legend(b, sc);
  CHECK(legend[0].range == "[0, 1.5)");
  CHECK(legend[2].range == "[3, 4.5]");
  CHECK(legend[1].color == "#888888");
  sc.colors.pop_back();
  CHECK(error_of([&] { build_legend(b, sc); }) == Errc::LengthMismatch);
}

TEST_CASE("styled map and export bundle") {
  const auto d = offline();
  const Session s = liberty(d);
  const auto map = render_styled_map(s);
  CHECK(map.unmatched == std::vector<std::string>{"Hong Kong"});
  CHECK(map.features["features"].size() == 31);
  json digest = json::array();
  for (const auto& f : map.features["features"]) {
    digest.push_back({f["properties"]["name"], f["properties"]["class_index"], f["properties"]["fill"]});
    CHECK(f.contains("geometry"));
  }
  testing::check_golden("styled_map_liberty.json", json{{"legend", map.legend}, {"features", digest}}.dump(1) + "\n");

  const auto bundle = export_bundle(s);
  for (const char* key : {"styled_map", "legend", "concept", "scheme", "transcript"}) CHECK(bundle.contains(key));
  CHECK(bundle["scheme"]["active"] == "generated");
  const auto dir = std::filesystem::temp_directory_path() / "mapcolor_export_test";
  std::filesystem::remove_all(dir);
  write_export_bundle(bundle, dir);
  for (const char* f : {"styled_map.geojson", "legend.json", "concept.json", "scheme.json", "transcript.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(json::parse(testing::read_file(dir / "legend.json")) == bundle["legend"]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("session JSON and stores round-trip") {
  const auto d = offline();
  Session s = liberty(d);
  s.id = new_session_id();
  CHECK(s.id.size() == 32);
  CHECK(s.id != new_session_id());
  d.set_active(s, ActiveScheme::Matched);
  const auto text = dump(s);
  const Session back = json::parse(text).get<Session>();
  CHECK(dump(back) == text);
  CHECK(displayed_scheme(back) == displayed_scheme(s));

  MemorySessionStore mem;
  CHECK_FALSE(mem.get(s.id));
  mem.put(s.id, text);
  CHECK(mem.get(s.id) == text);

  const auto dir = std::filesystem::temp_directory_path() / "mapcolor_store_test";
  std::filesystem::remove_all(dir);
  {
    FileSessionStore fs(dir);
    fs.put(s.id, text);
  }
  FileSessionStore again(dir);
  CHECK(again.get(s.id) == text);
  CHECK_FALSE(again.get("0123"));
  std::filesystem::remove_all(dir);
}
