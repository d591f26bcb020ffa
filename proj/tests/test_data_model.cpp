#include "mapcolor/data_model.hpp"
#include "support.hpp"

#include <algorithm>
#include <set>

using namespace mapcolor;
using nlohmann::json;
using testing::error_of;

TEST_CASE("parse_dataset keeps source order") {
  const auto d = parse_dataset(R"([{"name":"A","gdp":5},{"name":"B","gdp":7}])", "gdp");
  REQUIRE(d.records.size() == 2);
  CHECK(d.records[0].name == "A");
  CHECK(d.records[1].value == 7.0);
  CHECK(d.value_field == "gdp");
}

TEST_CASE("parse_dataset structural errors") {
  CHECK(error_of([] { parse_dataset("[]", "gdp"); }) == Errc::MalformedInput);
  CHECK(error_of([] { parse_dataset("{\"name\":\"A\"}", "gdp"); }) == Errc::MalformedInput);
  CHECK(error_of([] { parse_dataset("[1, 2]", "gdp"); }) == Errc::MalformedInput);
  CHECK(error_of([] { parse_dataset("not json", "gdp"); }) == Errc::MalformedInput);
  try {
    parse_dataset(R"([{"name":"A","gdp":1},{"name":"B","gdp":2},{"name":"C"}])", "gdp");
    FAIL("expected MissingField");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingField);
    CHECK(e.details()["indices"] == json::array({2}));
  }
}

TEST_CASE("string values are not coerced") {
  const auto d = parse_dataset(R"([{"name":"A","gdp":"5"},{"name":"B","gdp":null},{"name":"C","gdp":3}])", "gdp");
  CHECK_FALSE(d.records[0].value.has_value());
  const auto r = validate_dataset(d);
  CHECK_FALSE(r.is_clean);
  REQUIRE(r.non_numeric.size() == 1);
  CHECK(r.non_numeric[0].first == "A");
  CHECK(r.missing_values == std::vector<std::string>{"B"});
  CHECK(error_of([&] { (void)d.values(); }) == Errc::DataInvalid);
}

TEST_CASE("validate_dataset") {
  const auto clean = validate_dataset(parse_dataset(testing::gdp_text(), "gdp"));
  CHECK(clean.is_clean);
  CHECK(clean.missing_values.empty());
  CHECK(clean.duplicate_names.empty());
  CHECK(clean.non_numeric.empty());

  const auto dup = validate_dataset(parse_dataset(R"([{"name":"A","v":1},{"name":"A ","v":2},{"name":"B","v":3}])", "v"));
  CHECK(dup.duplicate_names == std::vector<std::string>{"A"});
  CHECK_FALSE(dup.is_clean);

  // Q1 = 2, Q3 = 4, upper fence 4 + 3 * 2 = 10.
  const auto out = validate_dataset(parse_dataset(
      R"([{"name":"a","v":1},{"name":"b","v":2},{"name":"c","v":3},{"name":"d","v":4},{"name":"e","v":1000}])", "v"));
  REQUIRE(out.outliers.size() == 1);
  CHECK(out.outliers[0].first == "e");
  CHECK(out.is_clean);  // outliers are advisory
}

TEST_CASE("summarize") {
  const auto s = summarize(parse_dataset(R"([{"name":"a","v":2},{"name":"b","v":4},{"name":"c","v":6}])", "v"));
  CHECK(s.min == 2);
  CHECK(s.max == 6);
  CHECK(s.mean == 4);
  CHECK(s.range == 4);
  const auto one = summarize(parse_dataset(R"([{"name":"a","v":9}])", "v"));
  CHECK(one.min == 9);
  CHECK(one.max == 9);
  CHECK(one.mean == 9);
  CHECK(one.range == 0);

  // Independent exact-fraction computation over the fixture file.
  const auto gdp = summarize(parse_dataset(testing::gdp_text(), "gdp"));
  CHECK(gdp.count == 31);
  CHECK(gdp.min == 239.27);
  CHECK(gdp.max == 13567.32);
  CHECK(gdp.mean == doctest::Approx(4035.2629032258064).epsilon(1e-12));
  CHECK(gdp.range == doctest::Approx(13328.05).epsilon(1e-12));
}

TEST_CASE("join_geometry") {
  auto fc = [](std::vector<std::string> names) {
    json f{{"type", "FeatureCollection"}, {"features", json::array()}};
    for (const auto& n : names) {
      f["features"].push_back({{"type", "Feature"}, {"properties", {{"name", n}}}, {"geometry", nullptr}});
    }
    return f;
  };
  const auto ab = parse_dataset(R"([{"name":"A","v":1},{"name":"B","v":2}])", "v");
  auto j = join_geometry(ab, fc({"A", "B"}), "name");
  CHECK(j.matched.size() == 2);
  CHECK(j.unmatched_data.empty());
  CHECK(j.unmatched_features.empty());

  j = join_geometry(ab, fc({"A", "C"}), "name");
  CHECK(j.unmatched_data == std::vector<std::string>{"B"});
  CHECK(j.unmatched_features == std::vector<std::string>{"C"});

  j = join_geometry(parse_dataset(R"([{"name":"A ","v":1}])", "v"), fc({"A"}), "name");
  CHECK(j.matched == std::vector<std::string>{"A"});

  j = join_geometry(ab, fc({"a", "B"}), "name");  // case-sensitive
  CHECK(j.unmatched_data == std::vector<std::string>{"A"});

  CHECK(error_of([&] { join_geometry(ab, json::array(), "name"); }) == Errc::InvalidGeoJSON);
  CHECK(error_of([&] { join_geometry(ab, json{{"type", "FeatureCollection"}}, "name"); }) == Errc::InvalidGeoJSON);
}

TEST_CASE("GDP fixture joins every province") {
  const auto d = parse_dataset(testing::gdp_text(), "gdp");
  const auto j = join_geometry(d, json::parse(testing::provinces_text()), "name");
  CHECK(j.matched.size() == 31);
  CHECK(j.unmatched_data.empty());
}

TEST_CASE("property: serialize round-trip, permutation-invariant summary, join partition") {
  testing::Gen gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(1, 30);
    json rows = json::array();
    for (int i = 0; i < n; ++i) rows.push_back({{"name", "r" + std::to_string(i)}, {"v", gen.real(-1e6, 1e6)}});
    const auto d = parse_dataset(rows.dump(), "v");
    CHECK(parse_dataset(serialize_dataset(d), "v") == d);

    auto shuffled = d;
    std::shuffle(shuffled.records.begin(), shuffled.records.end(), gen.engine());
    const auto a = summarize(d), b = summarize(shuffled);
    CHECK(a.min == b.min);
    CHECK(a.max == b.max);
    CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-12));
    CHECK(a.min <= a.mean);
    CHECK(a.mean <= a.max);

    json fc{{"type", "FeatureCollection"}, {"features", json::array()}};
    for (int i = 0; i < n; ++i) {
      if (gen.coin()) fc["features"].push_back({{"type", "Feature"}, {"properties", {{"name", "r" + std::to_string(i)}}}});
    }
    const auto j = join_geometry(d, fc, "name");
    CHECK(static_cast<int>(j.matched.size() + j.unmatched_data.size()) == n);
    std::set<std::string> m(j.matched.begin(), j.matched.end());
    for (const auto& u : j.unmatched_data) CHECK(m.count(u) == 0);
  }
}
