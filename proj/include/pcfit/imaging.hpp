#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "pcfit/error.hpp"
#include "pcfit/geometry.hpp"
#include "pcfit/scoring.hpp"

namespace pcfit {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline std::string to_string(Rgb c) {
  return std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b);
}

/// 8-bit RGB raster, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(long width, long height, Rgb fill = {})
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(std::max(width, 0L)) * static_cast<std::size_t>(std::max(height, 0L)), fill) {
    if (width <= 0 || height <= 0) throw DecodeError("raster dimensions must be positive");
  }

  long width() const { return width_; }
  long height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  Rgb& at(long x, long y) { return pixels_[index(x, y)]; }
  const Rgb& at(long x, long y) const { return pixels_[index(x, y)]; }
  const std::vector<Rgb>& pixels() const { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(long x, long y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  long width_ = 0;
  long height_ = 0;
  std::vector<Rgb> pixels_;
};

/// Reference colors of the four scored classes and a per-channel tolerance.
struct ClassPalette {
  Rgb red{255, 0, 0};
  Rgb green{0, 255, 0};
  Rgb grey{128, 128, 128};
  Rgb black{0, 0, 0};
  int tolerance = 8;
  /// Written for Other pixels when rendering a label map; never decoded.
  Rgb other{255, 255, 255};

  Rgb color(PixelClass c) const {
    switch (c) {
      case PixelClass::Red: return red;
      case PixelClass::Green: return green;
      case PixelClass::Grey: return grey;
      case PixelClass::Black: return black;
      case PixelClass::Other: return other;
    }
    return other;
  }

  bool matches(Rgb ref, Rgb px) const {
    return std::abs(int{ref.r} - int{px.r}) <= tolerance && std::abs(int{ref.g} - int{px.g}) <= tolerance &&
           std::abs(int{ref.b} - int{px.b}) <= tolerance;
  }

  void validate() const {
    if (tolerance < 0 || tolerance > 255) throw ConfigError("palette tolerance must be within 0..255");
    const std::array<PixelClass, 4> scored{PixelClass::Red, PixelClass::Green, PixelClass::Grey, PixelClass::Black};
    auto separation = [](Rgb p, Rgb q) {
      return std::max({std::abs(int{p.r} - int{q.r}), std::abs(int{p.g} - int{q.g}), std::abs(int{p.b} - int{q.b})});
    };
    for (std::size_t i = 0; i < scored.size(); ++i) {
      for (std::size_t j = i + 1; j < scored.size(); ++j) {
        if (separation(color(scored[i]), color(scored[j])) <= 2 * tolerance) {
          throw ConfigError("palette colors for " + std::string(class_name(scored[i])) + " and " +
                            std::string(class_name(scored[j])) + " are not separated by more than twice the tolerance");
        }
      }
      if (matches(color(scored[i]), other)) {
        throw ConfigError("palette color for Other matches " + std::string(class_name(scored[i])));
      }
    }
  }
};

struct OutlineStyle {
  double epsilon = 0.02;
  Rgb color{0, 0, 255};

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("outline epsilon must be > 0");
  }
};

/// Maps each pixel to the palette class it matches within tolerance; pixels
/// matching nothing become Other. A pixel matching two classes is an error.
inline LabeledImage decode_label_image(const RgbImage& raster, const ClassPalette& palette) {
  if (raster.empty()) throw DecodeError("raster is empty");
  static constexpr std::array<PixelClass, 4> kScored{PixelClass::Red, PixelClass::Green, PixelClass::Grey,
                                                     PixelClass::Black};
  std::vector<PixelClass> labels;
  labels.reserve(raster.pixels().size());
  for (long y = 0; y < raster.height(); ++y) {
    for (long x = 0; x < raster.width(); ++x) {
      const Rgb px = raster.at(x, y);
      PixelClass found = PixelClass::Other;
      for (PixelClass c : kScored) {
        if (!palette.matches(palette.color(c), px)) continue;
        if (found != PixelClass::Other) {
          throw DecodeError("pixel (" + std::to_string(x) + ", " + std::to_string(y) + ") color " + to_string(px) +
                            " matches both " + std::string(class_name(found)) + " and " +
                            std::string(class_name(c)));
        }
        found = c;
      }
      labels.push_back(found);
    }
  }
  return LabeledImage(raster.width(), raster.height(), std::move(labels));
}

/// Paints every label with its palette color.
inline RgbImage render_labels(const LabeledImage& image, const ClassPalette& palette) {
  RgbImage out(image.width(), image.height());
  for (long y = 0; y < image.height(); ++y) {
    for (long x = 0; x < image.width(); ++x) out.at(x, y) = palette.color(image.at(x, y));
  }
  return out;
}

/// Copy of the raster with the band 1 - eps <= E <= 1 + eps painted in the
/// outline color.
inline RgbImage render_overlay(const RgbImage& raster, const EllipseParams& params, const OutlineStyle& style) {
  style.validate();
  RgbImage out = raster;
  const RotatedEllipse ellipse(params);
  // The band lies inside the ellipse scaled by sqrt(1 + eps).
  const double grow = std::sqrt(1.0 + style.epsilon);
  EllipseParams outer = params;
  outer.a *= grow;
  outer.b *= grow;
  const BoundingBox box = bounding_box(outer);
  const long x0 = std::max(0L, static_cast<long>(std::floor(box.x_lo)) - 1);
  const long x1 = std::min(raster.width() - 1, static_cast<long>(std::ceil(box.x_hi)) + 1);
  const long y0 = std::max(0L, static_cast<long>(std::floor(box.y_lo)) - 1);
  const long y1 = std::min(raster.height() - 1, static_cast<long>(std::ceil(box.y_hi)) + 1);
  for (long y = y0; y <= y1; ++y) {
    for (long x = x0; x <= x1; ++x) {
      const double e = ellipse.value(static_cast<double>(x), static_cast<double>(y));
      if (e >= 1.0 - style.epsilon && e <= 1.0 + style.epsilon) out.at(x, y) = style.color;
    }
  }
  return out;
}

}  // namespace pcfit
