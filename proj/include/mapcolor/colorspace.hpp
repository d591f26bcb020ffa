#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mapcolor {

struct RGBColor {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const RGBColor&) const = default;
};

// CIELab under D65 with the 2 degree observer.
struct LabColor {
  double L = 0, a = 0, b = 0;
};

// Lightness, chroma, hue (degrees in [0, 360)) over Lab.
struct LChColor {
  double L = 0, C = 0, h = 0;
};

struct ColorAdjustment {
  double delta_lightness = 0;
  double delta_saturation = 0;
  double delta_hue_degrees = 0;

  bool is_zero() const { return delta_lightness == 0 && delta_saturation == 0 && delta_hue_degrees == 0; }
};

struct GamutResult {
  RGBColor color;
  bool clamped = false;
};

LabColor rgb_to_lab(RGBColor c);
// Out-of-gamut channels are clamped and reported through `clamped`.
GamutResult lab_to_rgb(LabColor c);

// CIE76 colour difference: Euclidean distance in Lab.
double delta_e(const LabColor& x, const LabColor& y);

LChColor lab_to_lch(const LabColor& c);
LabColor lch_to_lab(const LChColor& c);

// The adjusted colour in Lab before any gamut clamp.
LabColor adjust_lab(const LabColor& c, const ColorAdjustment& adj);
RGBColor adjust(RGBColor c, const ColorAdjustment& adj);

RGBColor parse_hex(std::string_view text);
std::string format_hex(RGBColor c);

}  // namespace mapcolor
