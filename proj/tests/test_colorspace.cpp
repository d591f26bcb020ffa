#include "mapcolor/colorspace.hpp"
#include "support.hpp"

#include <cmath>

using namespace mapcolor;
using testing::error_of;

namespace {

struct Reference {
  RGBColor rgb;
  LabColor lab;
};

// scikit-image rgb2lab (D65, 2 degree observer), frozen before the build.
const Reference kReferences[] = {
    {{255, 0, 0}, {53.2405879437449, 80.0923082256922, 67.2027510444287}},
    {{0, 255, 0}, {87.73509948831895, -86.18302974439501, 83.17970317538452}},
    {{0, 0, 255}, {32.29567256501351, 79.18559091176556, -107.85730020669489}},
    {{128, 128, 128}, {53.58501345216902, 0.0, 0.0}},
    {{180, 140, 100}, {61.11673430575914, 9.919740226786434, 27.16174628488517}},
};

double chroma(RGBColor c) { return lab_to_lch(rgb_to_lab(c)).C; }

}  // namespace

TEST_CASE("rgb_to_lab reference points") {
  const auto white = rgb_to_lab({255, 255, 255});
  CHECK(std::abs(white.L - 100.0) <= 0.01);
  CHECK(std::abs(white.a) < 0.01);
  CHECK(std::abs(white.b) < 0.01);
  const auto black = rgb_to_lab({0, 0, 0});
  CHECK(black.L == doctest::Approx(0.0));
  CHECK(black.a == doctest::Approx(0.0));
  CHECK(black.b == doctest::Approx(0.0));
  for (const auto& r : kReferences) {
    const auto lab = rgb_to_lab(r.rgb);
    CAPTURE(format_hex(r.rgb));
    CHECK(std::abs(lab.L - r.lab.L) < 0.01);
    CHECK(std::abs(lab.a - r.lab.a) < 0.02);
    CHECK(std::abs(lab.b - r.lab.b) < 0.02);
  }
}

TEST_CASE("lab_to_rgb") {
  const auto w = lab_to_rgb({100, 0, 0});
  CHECK(w.color == RGBColor{255, 255, 255});
  CHECK_FALSE(w.clamped);
  CHECK(lab_to_rgb({50, 120, -120}).clamped);
}

TEST_CASE("round trip over the 16x16x16 lattice") {
  int worst = 0;
  for (int r = 0; r < 256; r += 17) {
    for (int g = 0; g < 256; g += 17) {
      for (int b = 0; b < 256; b += 17) {
        const RGBColor c{static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
        const auto back = lab_to_rgb(rgb_to_lab(c));
        worst = std::max({worst, std::abs(back.color.r - r), std::abs(back.color.g - g), std::abs(back.color.b - b)});
        CHECK_FALSE(back.clamped);
      }
    }
  }
  CHECK(worst <= 1);
}

TEST_CASE("delta_e") {
  CHECK(delta_e({50, 0, 0}, {50, 3, 4}) == 5.0);
  CHECK(delta_e({50, 0, 0}, {60, 0, 0}) == 10.0);
  CHECK(delta_e({42, -7, 9}, {42, -7, 9}) == 0.0);
}

TEST_CASE("property: delta_e is a translation-invariant metric") {
  testing::Gen gen(5);
  auto lab = [&] { return LabColor{gen.real(0, 100), gen.real(-128, 127), gen.real(-128, 127)}; };
  for (int i = 0; i < 10000; ++i) {
    const auto x = lab(), y = lab(), z = lab();
    const double xy = delta_e(x, y);
    CHECK(xy >= 0);
    CHECK(xy == delta_e(y, x));
    CHECK(delta_e(x, x) == 0);
    if (x.L != y.L || x.a != y.a || x.b != y.b) CHECK(xy > 0);
    CHECK(delta_e(x, z) <= xy + delta_e(y, z) + 1e-12);
    const double shift = gen.real(-20, 20);
    CHECK(delta_e({x.L + shift, x.a, x.b}, {y.L + shift, y.a, y.b}) == doctest::Approx(xy).epsilon(1e-12));
  }
}

TEST_CASE("lch conversion is invertible") {
  testing::Gen gen(6);
  for (int i = 0; i < 1000; ++i) {
    const LabColor c{gen.real(0, 100), gen.real(-100, 100), gen.real(-100, 100)};
    const auto h = lab_to_lch(c);
    CHECK(h.h >= 0);
    CHECK(h.h < 360);
    const auto back = lch_to_lab(h);
    CHECK(back.a == doctest::Approx(c.a).epsilon(1e-9));
    CHECK(back.b == doctest::Approx(c.b).epsilon(1e-9));
  }
}

TEST_CASE("adjust") {
  testing::Gen gen(8);
  for (int i = 0; i < 500; ++i) {
    const auto c = gen.rgb();
    CHECK(adjust(c, {}) == c);
  }
  const RGBColor gray{128, 128, 128};
  const auto lifted = adjust_lab(rgb_to_lab(gray), {20, 0, 0});
  CHECK(lifted.L == doctest::Approx(rgb_to_lab(gray).L + 20));
  CHECK(rgb_to_lab(adjust(gray, {20, 0, 0})).L > rgb_to_lab(gray).L + 19);

  const RGBColor tan{180, 140, 100};
  CHECK(chroma(adjust(tan, {0, 15, 0})) > chroma(tan));
  CHECK(chroma(adjust(tan, {0, -15, 0})) < chroma(tan));
}

TEST_CASE("hex") {
  CHECK(parse_hex("#FF0000") == RGBColor{255, 0, 0});
  CHECK(parse_hex("#0a0B0c") == RGBColor{10, 11, 12});
  CHECK(format_hex({255, 0, 0}) == "#ff0000");
  for (const char* bad : {"#12GG34", "FF0000", "#FFF", "#FF00000", "", "#ff00 0"}) {
    CAPTURE(bad);
    CHECK(error_of([&] { parse_hex(bad); }) == Errc::BadHex);
  }
  testing::Gen gen(9);
  for (int i = 0; i < 1000; ++i) {
    const auto c = gen.rgb();
    std::string upper = format_hex(c);
    for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    CHECK(format_hex(parse_hex(upper)) == format_hex(c));
  }
}
