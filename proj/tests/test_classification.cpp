#include "mapcolor/classification.hpp"
#include "mapcolor/kernels.hpp"
#include "support.hpp"

#include <omp.h>

#include <algorithm>
#include <numeric>

using namespace mapcolor;
using testing::error_of;

namespace {

const std::vector<double> kSix{1, 2, 3, 10, 11, 12};
constexpr double kSixGvf = 100.0 - 400.0 / 125.5;

ClassifyOptions allow_two() {
  ClassifyOptions o;
  o.min_k = 2;
  return o;
}

std::vector<double> gdp() { return parse_dataset(testing::gdp_text(), "gdp").values(); }

std::vector<int> counts(const std::vector<double>& values, const ClassBreaks& b) {
  std::vector<int> out(static_cast<std::size_t>(b.k()), 0);
  for (double v : values) {
    int c = 0;
    while (c + 1 < b.k() && v >= b.bounds[static_cast<std::size_t>(c) + 1]) ++c;
    ++out[static_cast<std::size_t>(c)];
  }
  return out;
}

void check_breaks(const std::vector<double>& values, const ClassBreaks& b, bool may_be_empty) {
  REQUIRE(b.k() >= 1);
  for (std::size_t i = 1; i < b.bounds.size(); ++i) CHECK(b.bounds[i - 1] < b.bounds[i]);
  CHECK(b.bounds.front() <= *std::min_element(values.begin(), values.end()));
  CHECK(b.bounds.back() >= *std::max_element(values.begin(), values.end()));
  const auto r = evaluate(values, b);
  CHECK(std::accumulate(r.class_counts.begin(), r.class_counts.end(), 0) == static_cast<int>(values.size()));
  if (!may_be_empty) {
    for (int c : r.class_counts) CHECK(c >= 1);
  }
  CHECK(r.gvf >= 0.0);
  CHECK(r.gvf <= 100.0);
}

}  // namespace

TEST_CASE("method tokens round-trip") {
  for (Method m : kMethodTieOrder) CHECK(parse_method(method_token(m)) == m);
  CHECK(parse_method("fisher-jenks") == Method::FisherJenks);
  CHECK_FALSE(parse_method("natural").has_value());
}

TEST_CASE("equal_intervals") {
  std::vector<double> v;
  for (int i = 0; i <= 10; ++i) v.push_back(i);
  CHECK(equal_intervals(v, 5).bounds == std::vector<double>{0, 2, 4, 6, 8, 10});
  CHECK(error_of([] { equal_intervals(std::vector<double>{3, 3, 3}, 3); }) == Errc::DegenerateData);

  // min + i * range / 5 over the fixture, computed outside this code base.
  const std::vector<double> expected{239.27, 2904.8799999999997, 5570.49, 8236.099999999999, 10901.71, 13567.32};
  const auto b = equal_intervals(gdp(), 5);
  REQUIRE(b.bounds.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(b.bounds[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("quantiles") {
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(evaluate(v, quantiles(v, 4)).class_counts == std::vector<int>{2, 2, 2, 2});
  // The run of ones cannot be split.
  const std::vector<double> ties{1, 1, 1, 1, 2, 3};
  CHECK(evaluate(ties, quantiles(ties, 3)).class_counts == std::vector<int>{4, 1, 1});
  CHECK(error_of([] { quantiles(std::vector<double>{1, 1, 1, 1, 1, 2}, 3); }) == Errc::TieCollapse);

  testing::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> u(200);
    for (auto& x : u) x = gen.real(0, 1);
    const auto c = evaluate(u, quantiles(u, 5)).class_counts;
    CHECK(*std::max_element(c.begin(), c.end()) - *std::min_element(c.begin(), c.end()) <= 1);
  }
}

TEST_CASE("jenks_caspall") {
  const auto b = jenks_caspall(kSix, 2, allow_two());
  REQUIRE(b.k() == 2);
  CHECK(b.bounds[1] > 3);
  CHECK(b.bounds[1] <= 10);

  testing::Gen gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = gen.values(gen.integer(12, 60), 12);
    const int k = gen.integer(3, 7);
    CHECK(ssw(v, jenks_caspall(v, k)) <= ssw(v, quantiles(v, k)) + 1e-9 * sst(v));
  }
}

TEST_CASE("fisher_jenks anchors") {
  const auto b = fisher_jenks(kSix, 2, allow_two());
  CHECK(ssw(kSix, b) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(sst(kSix) == doctest::Approx(125.5).epsilon(1e-12));
  CHECK(std::abs(gvf(kSix, b) - kSixGvf) < 1e-9);

  // k equal to the distinct count puts each value in its own class.
  const std::vector<double> five{4, 1, 9, 16, 25, 4};
  CHECK(gvf(five, fisher_jenks(five, 5)) == 100.0);

  // Exact-fraction DP over the fixture, computed outside this code base.
  const auto g = gdp();
  const std::vector<double> cuts{239.27, 1793.16, 3877.34, 7134.295, 11014.545, 13567.32};
  const auto fb = fisher_jenks(g, 5);
  REQUIRE(fb.bounds.size() == cuts.size());
  for (std::size_t i = 0; i < cuts.size(); ++i) CHECK(fb.bounds[i] == doctest::Approx(cuts[i]).epsilon(1e-14));
  CHECK(gvf(g, fisher_jenks(g, 5)) == doctest::Approx(97.4748726661804).epsilon(1e-12));
  CHECK(gvf(g, fisher_jenks(g, 3)) == doctest::Approx(87.2678716689674).epsilon(1e-12));
  CHECK(gvf(g, fisher_jenks(g, 7)) == doctest::Approx(99.18334583139992).epsilon(1e-12));
}

TEST_CASE("fisher_jenks matches the exhaustive partition oracle exactly") {
  testing::Gen gen(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = gen.integer(3, 4);
    const auto v = gen.small_integers(gen.integer(k, 12), 0, 40, k);
    const auto b = fisher_jenks(v, k);
    CHECK(testing::exact_ssw(testing::groups_of(v, b)) == testing::exhaustive_min_ssw(v, k));
  }
}

TEST_CASE("serial and OpenMP kernels agree") {
  omp_set_num_threads(4);
  testing::Gen gen(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = trial < 20 ? gen.integer(5, 60) : gen.integer(300, 700);
    auto v = gen.values(n, std::min(n, 12));
    std::sort(v.begin(), v.end());
    const auto wv = kernels::collapse_ties(v);
    const int k = gen.integer(1, std::min<int>(11, static_cast<int>(wv.size())));
    const auto s = kernels::fisher_jenks_serial(wv, k);
    const auto p = kernels::fisher_jenks_parallel(wv, k);
    CHECK(s.starts == p.starts);
    CHECK(s.ssw == p.ssw);
  }
}

TEST_CASE("max_p") {
  const std::vector<double> nine{1, 2, 3, 10, 11, 12, 20, 21, 22};
  CHECK(max_p(nine, 3, 0).bounds == std::vector<double>{1, 6.5, 16, 22});
  CHECK(max_p(gdp(), 5, 17) == max_p(gdp(), 5, 17));
  CHECK(error_of([] { max_p(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}, 3, 0); }) == Errc::TooFewValues);

  testing::Gen gen(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto v = gen.values(gen.integer(30, 80), 12);
    const int k = gen.integer(3, 8);
    const auto mp = max_p(v, k, static_cast<std::uint64_t>(trial));
    CHECK(ssw(v, mp) >= ssw(v, fisher_jenks(v, k)) - 1e-9 * sst(v));
    const auto c = evaluate(v, mp).class_counts;
    CHECK(*std::min_element(c.begin(), c.end()) >= static_cast<int>(v.size()) / (3 * k));
  }
}

TEST_CASE("pretty_breaks") {
  const std::vector<double> a{0.3, 1.2, 4.1, 5.5, 8.0, 9.7};
  CHECK(pretty_breaks(a, 5).bounds == std::vector<double>{0, 2, 4, 6, 8, 10});
  const std::vector<double> b{0, 12, 37, 51, 64, 100};
  CHECK(pretty_breaks(b, 5).bounds == std::vector<double>{0, 20, 40, 60, 80, 100});

  testing::Gen gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = gen.values(gen.integer(5, 40), 5, -gen.real(0, 1e4), gen.real(1, 1e5));
    const int k = gen.integer(3, 11);
    ClassBreaks pb;
    try {
      pb = pretty_breaks(v, k);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::DegenerateData);
      continue;
    }
    CHECK(pb.k() <= k);
    CHECK(pb.k() >= std::max(3, k - 2));
    // Every bound is an integer multiple of the step.
    const double step = pb.bounds[1] - pb.bounds[0];
    for (double x : pb.bounds) {
      const double q = x / step;
      CHECK(std::abs(q - std::round(q)) < 1e-6);
    }
  }
}

TEST_CASE("gvf") {
  ClassBreaks one{Method::EqualIntervals, {1, 12}};
  CHECK(gvf(kSix, one) == doctest::Approx(0.0));
  ClassBreaks split{Method::FisherJenks, {1, 6.5, 12}};
  CHECK(std::abs(gvf(kSix, split) - kSixGvf) < 1e-9);
  CHECK(error_of([] { gvf(std::vector<double>{2, 2, 2}, ClassBreaks{Method::FisherJenks, {1, 3}}); }) ==
        Errc::DegenerateData);
}

TEST_CASE("every method rejects k outside [3, 11]") {
  const auto g = gdp();
  for (Method m : kMethodTieOrder) {
    for (int k : {-1, 0, 1, 2, 12, 40}) {
      CAPTURE(method_token(m));
      CAPTURE(k);
      CHECK(error_of([&] { classify(m, g, k); }) == Errc::BadK);
    }
  }
  CHECK(error_of([&] { classify_all(g, 2); }) == Errc::BadK);
  CHECK(error_of([&] { classify_all(g, 12); }) == Errc::BadK);
}

TEST_CASE("classify_all") {
  const auto six = classify_all(kSix, 2, allow_two());
  REQUIRE_FALSE(six.results.empty());
  CHECK(six.results.front().breaks.method == Method::FisherJenks);
  CHECK(std::abs(six.results.front().gvf - kSixGvf) < 1e-9);

  const auto ranked = classify_all(gdp(), 5);
  for (std::size_t i = 1; i < ranked.results.size(); ++i) CHECK(ranked.results[i - 1].gvf >= ranked.results[i].gvf);
  CHECK(ranked.results.size() + ranked.notes.size() == 6);

  CHECK(error_of([] { classify_all(std::vector<double>{5, 5, 5, 5}, 3); }) == Errc::AllMethodsFailed);
}

TEST_CASE("classify_all breaks GVF ties by the fixed method order") {
  // Four well separated values: every method that succeeds finds the same classes.
  const std::vector<double> v{1, 1, 1, 50, 50, 50, 100, 100, 100};
  const auto r = classify_all(v, 3);
  std::vector<Method> order;
  for (const auto& x : r.results) {
    if (x.gvf == 100.0) order.push_back(x.breaks.method);
  }
  std::vector<Method> expected;
  for (Method m : kMethodTieOrder) {
    if (std::find(order.begin(), order.end(), m) != order.end()) expected.push_back(m);
  }
  CHECK(order == expected);
  CHECK(order.front() == Method::FisherJenks);
}

TEST_CASE("assign_classes") {
  const auto d = parse_dataset(R"([{"name":"lo","v":0},{"name":"mid","v":5},{"name":"top","v":10},{"name":"x","v":7}])", "v");
  const ClassBreaks b{Method::EqualIntervals, {0, 5, 7.5, 10}};
  const auto m = assign_classes(d, b);
  CHECK(m.at("lo") == 0);
  CHECK(m.at("mid") == 1);  // interior bound opens the next class
  CHECK(m.at("top") == 2);  // last class is closed
  CHECK(m.at("x") == 1);
  const ClassBreaks narrow{Method::EqualIntervals, {1, 5, 9}};
  CHECK(error_of([&] { assign_classes(d, narrow); }) == Errc::ValueOutOfRange);

  const auto gd = parse_dataset(testing::gdp_text(), "gdp");
  const auto fj = evaluate(gd.values(), fisher_jenks(gd.values(), 5));
  std::vector<int> recount(5, 0);
  for (const auto& [name, c] : assign_classes(gd, fj.breaks)) ++recount[static_cast<std::size_t>(c)];
  CHECK(recount == fj.class_counts);
  CHECK(recount == counts(gd.values(), fj.breaks));
}

TEST_CASE("property: structural invariants, permutation and affine invariance") {
  testing::Gen gen(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen.integer(36, 120);
    const auto v = gen.values(n, 12);
    const int k = gen.integer(3, 11);
    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), gen.engine());
    for (Method m : kMethodTieOrder) {
      CAPTURE(method_token(m));
      ClassBreaks b;
      try {
        b = classify(m, v, k);
      } catch (const Error& e) {
        CHECK((e.code() == Errc::TieCollapse || e.code() == Errc::DegenerateData));
        continue;
      }
      check_breaks(v, b, m == Method::EqualIntervals || m == Method::PrettyBreaks);
      CHECK(classify(m, shuffled, k) == b);
    }

    const double a = gen.real(0.1, 50), c = gen.real(-1e4, 1e4);
    std::vector<double> t(v.size());
    std::transform(v.begin(), v.end(), t.begin(), [&](double x) { return a * x + c; });
    const auto fb = fisher_jenks(v, k), ft = fisher_jenks(t, k);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(class_index(v[i], fb) == class_index(t[i], ft));
    CHECK(gvf(v, fb) == doctest::Approx(gvf(t, ft)).epsilon(1e-9));
  }
}

TEST_CASE("property: Fisher-Jenks dominates and is monotone in k") {
  testing::Gen gen(32);
  for (int trial = 0; trial < 30; ++trial) {
    const auto v = gen.values(gen.integer(40, 90), 12);
    double prev = -1;
    for (int k = 3; k <= 11; ++k) {
      const double fj = gvf(v, fisher_jenks(v, k));
      CHECK(fj >= prev - 1e-9);
      prev = fj;
      for (Method m : kMethodTieOrder) {
        ClassBreaks other;
        try {
          other = classify(m, v, k);
        } catch (const Error&) {
          continue;
        }
        CHECK(fj >= gvf(v, other) - 1e-9);
      }
    }
  }
}

TEST_CASE("JSON round-trip") {
  const auto r = evaluate(gdp(), fisher_jenks(gdp(), 5));
  const nlohmann::json j = r;
  CHECK(j["method"] == "fisher_jenks");
  CHECK(j["class_counts"].size() == 5);
  const auto back = j.get<ClassificationResult>();
  CHECK(back.breaks == r.breaks);
  CHECK(back.class_counts == r.class_counts);
}
