#include "mapcolor/colorspace.hpp"

#include "mapcolor/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>

namespace mapcolor {

namespace {

// sRGB primaries to XYZ; the D65 reference white is the image of (1, 1, 1).
constexpr std::array<std::array<double, 3>, 3> kToXyz{{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};
constexpr std::array<std::array<double, 3>, 3> kToRgb{{
    {3.2404542, -1.5371385, -0.4985314},
    {-0.9692660, 1.8760108, 0.0415560},
    {0.0556434, -0.2040259, 1.0572252},
}};
constexpr double kWhiteX = 0.4124564 + 0.3575761 + 0.1804375;
constexpr double kWhiteY = 0.2126729 + 0.7151522 + 0.0721750;
constexpr double kWhiteZ = 0.0193339 + 0.1191920 + 0.9503041;

constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double decode_gamma(std::uint8_t channel) {
  const double c = channel / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double encode_gamma(double linear) {
  return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) { return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

double lab_f_inv(double f) {
  const double cube = f * f * f;
  return cube > kEpsilon ? cube : (116.0 * f - 16.0) / kKappa;
}

int hex_digit(char c) {
  int v = 0;
  const auto res = std::from_chars(&c, &c + 1, v, 16);
  return res.ec == std::errc{} ? v : -1;
}

}  // namespace

LabColor rgb_to_lab(RGBColor c) {
  const double r = decode_gamma(c.r), g = decode_gamma(c.g), b = decode_gamma(c.b);
  const double x = kToXyz[0][0] * r + kToXyz[0][1] * g + kToXyz[0][2] * b;
  const double y = kToXyz[1][0] * r + kToXyz[1][1] * g + kToXyz[1][2] * b;
  const double z = kToXyz[2][0] * r + kToXyz[2][1] * g + kToXyz[2][2] * b;
  const double fx = lab_f(x / kWhiteX), fy = lab_f(y / kWhiteY), fz = lab_f(z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

GamutResult lab_to_rgb(LabColor c) {
  const double fy = (c.L + 16.0) / 116.0;
  const double fx = fy + c.a / 500.0;
  const double fz = fy - c.b / 200.0;
  const double x = lab_f_inv(fx) * kWhiteX;
  const double y = (c.L > kKappa * kEpsilon ? fy * fy * fy : c.L / kKappa) * kWhiteY;
  const double z = lab_f_inv(fz) * kWhiteZ;

  GamutResult out;
  std::array<std::uint8_t, 3> channels{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double linear = kToRgb[i][0] * x + kToRgb[i][1] * y + kToRgb[i][2] * z;
    const double encoded = 255.0 * encode_gamma(linear);
    // Half a code value of slack absorbs rounding at the gamut boundary.
    if (encoded < -0.5 || encoded > 255.5) out.clamped = true;
    channels[i] = static_cast<std::uint8_t>(std::lround(std::clamp(encoded, 0.0, 255.0)));
  }
  out.color = {channels[0], channels[1], channels[2]};
  return out;
}

double delta_e(const LabColor& x, const LabColor& y) {
  const double dl = x.L - y.L, da = x.a - y.a, db = x.b - y.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

LChColor lab_to_lch(const LabColor& c) {
  double h = std::atan2(c.b, c.a) * 180.0 / std::numbers::pi;
  if (h < 0) h += 360.0;
  return {c.L, std::hypot(c.a, c.b), h};
}

LabColor lch_to_lab(const LChColor& c) {
  const double rad = c.h * std::numbers::pi / 180.0;
  return {c.L, c.C * std::cos(rad), c.C * std::sin(rad)};
}

LabColor adjust_lab(const LabColor& c, const ColorAdjustment& adj) {
  if (adj.is_zero()) return c;
  auto lch = lab_to_lch(c);
  lch.L = std::clamp(lch.L + adj.delta_lightness, 0.0, 100.0);
  lch.C = std::max(0.0, lch.C + adj.delta_saturation);
  lch.h = std::fmod(lch.h + adj.delta_hue_degrees, 360.0);
  if (lch.h < 0) lch.h += 360.0;
  return lch_to_lab(lch);
}

RGBColor adjust(RGBColor c, const ColorAdjustment& adj) {
  if (adj.is_zero()) return c;
  return lab_to_rgb(adjust_lab(rgb_to_lab(c), adj)).color;
}

RGBColor parse_hex(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') {
    throw Error(Errc::BadHex, "expected #RRGGBB, got \"" + std::string(text) + "\"");
  }
  std::array<int, 6> d{};
  for (std::size_t i = 0; i < 6; ++i) {
    d[i] = hex_digit(text[i + 1]);
    if (d[i] < 0) throw Error(Errc::BadHex, "expected #RRGGBB, got \"" + std::string(text) + "\"");
  }
  return {static_cast<std::uint8_t>(d[0] * 16 + d[1]), static_cast<std::uint8_t>(d[2] * 16 + d[3]),
          static_cast<std::uint8_t>(d[4] * 16 + d[5])};
}

std::string format_hex(RGBColor c) {
  constexpr char digits[] = "0123456789abcdef";
  std::string out = "#";
  for (std::uint8_t v : {c.r, c.g, c.b}) {
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 0xF]);
  }
  return out;
}

}  // namespace mapcolor
