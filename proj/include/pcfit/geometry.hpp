#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "pcfit/error.hpp"

namespace pcfit {

/// One candidate ellipse. Angles are in degrees; lengths in pixels.
struct EllipseParams {
  double theta = 0.0;  ///< rotation, degrees, kept in [0, 360)
  double x_c = 0.0;    ///< center column
  double y_c = 0.0;    ///< center row
  double a = 1.0;      ///< first semi-axis
  double b = 1.0;      ///< second semi-axis

  friend bool operator==(const EllipseParams&, const EllipseParams&) = default;
};

/// Lattice point (column, row).
struct PixelPoint {
  long x = 0;
  long y = 0;
};

/// Inclusive run of interior pixels on one row.
struct RowSpan {
  long y = 0;
  long x_min = 0;
  long x_max = 0;

  friend bool operator==(const RowSpan&, const RowSpan&) = default;
};

/// Axis-aligned extent of an ellipse; all four bounds are inclusive.
struct BoundingBox {
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 0.0;

  double half_width() const { return 0.5 * (x_hi - x_lo); }
  double half_height() const { return 0.5 * (y_hi - y_lo); }
};

inline double normalize_degrees(double theta) {
  double t = std::fmod(theta, 360.0);
  if (t < 0.0) t += 360.0;
  // fmod of a tiny negative value can round up to exactly 360
  if (t >= 360.0) t = 0.0;
  return t;
}

inline bool is_valid(const EllipseParams& p) {
  return std::isfinite(p.theta) && std::isfinite(p.x_c) && std::isfinite(p.y_c) &&
         std::isfinite(p.a) && std::isfinite(p.b) && p.a > 0.0 && p.b > 0.0;
}

/// Returns a copy with theta wrapped into [0, 360). Throws ConfigError when
/// an axis is not positive or a value is not finite.
inline EllipseParams validated(EllipseParams p) {
  if (!is_valid(p)) throw ConfigError("ellipse parameters must be finite with a > 0 and b > 0");
  p.theta = normalize_degrees(p.theta);
  return p;
}

/// Precomputed trigonometry for repeated evaluation of one ellipse.
///
/// Every membership decision in the library goes through value(), so the
/// scanline and brute-force paths agree bit for bit.
class RotatedEllipse {
 public:
  explicit RotatedEllipse(const EllipseParams& p)
      : params_(p),
        cos_(std::cos(p.theta * std::numbers::pi / 180.0)),
        sin_(std::sin(p.theta * std::numbers::pi / 180.0)),
        a2_(p.a * p.a),
        b2_(p.b * p.b) {}

  const EllipseParams& params() const { return params_; }

  double value(double x, double y) const {
    const double dx = x - params_.x_c;
    const double dy = y - params_.y_c;
    const double u = dx * cos_ + dy * sin_;
    const double v = dx * sin_ - dy * cos_;
    return u * u / a2_ + v * v / b2_;
  }

  bool contains(long x, long y) const {
    return value(static_cast<double>(x), static_cast<double>(y)) < 1.0;
  }

  BoundingBox bounding_box() const {
    const double w = std::sqrt(a2_ * cos_ * cos_ + b2_ * sin_ * sin_);
    const double h = std::sqrt(a2_ * sin_ * sin_ + b2_ * cos_ * cos_);
    return {params_.x_c - w, params_.x_c + w, params_.y_c - h, params_.y_c + h};
  }

  /// Interior run on row y, unclipped. Returns false when the row has no
  /// interior lattice point.
  ///
  /// The row equation is a quadratic in dx; its floating roots only seed
  /// the search, and the endpoints are then fixed with contains().
  bool row_interval(long y, long& x_min, long& x_max) const {
    const double dy = static_cast<double>(y) - params_.y_c;
    const double qa = cos_ * cos_ / a2_ + sin_ * sin_ / b2_;
    const double qh = cos_ * sin_ * (1.0 / a2_ - 1.0 / b2_);
    const double qc = sin_ * sin_ / a2_ + cos_ * cos_ / b2_;
    const double disc = qh * qh * dy * dy - qa * (qc * dy * dy - 1.0);
    const double mid = params_.x_c - qh * dy / qa;
    const double half = disc > 0.0 ? std::sqrt(disc) / qa : 0.0;

    long lo = static_cast<long>(std::floor(mid - half));
    long hi = static_cast<long>(std::ceil(mid + half));
    while (lo <= hi && !contains(lo, y)) ++lo;
    while (hi >= lo && !contains(hi, y)) --hi;
    if (lo > hi) return false;
    while (contains(lo - 1, y)) --lo;
    while (contains(hi + 1, y)) ++hi;
    x_min = lo;
    x_max = hi;
    return true;
  }

  /// Calls fn(RowSpan) for every image row with interior pixels, clipped to
  /// [0, width) x [0, height), in increasing row order.
  template <typename Fn>
  void for_each_span(long width, long height, Fn&& fn) const {
    const BoundingBox box = bounding_box();
    // One extra row on each side absorbs rounding in the box itself.
    const double y_first = std::max(0.0, std::ceil(box.y_lo) - 1.0);
    const double y_last = std::min(static_cast<double>(height - 1), std::floor(box.y_hi) + 1.0);
    if (!(y_first <= y_last)) return;
    if (box.x_hi + 1.0 < 0.0 || box.x_lo - 1.0 > static_cast<double>(width - 1)) return;
    for (long y = static_cast<long>(y_first); y <= static_cast<long>(y_last); ++y) {
      long lo = 0;
      long hi = 0;
      if (!row_interval(y, lo, hi)) continue;
      lo = std::max(lo, 0L);
      hi = std::min(hi, width - 1);
      if (lo > hi) continue;
      fn(RowSpan{y, lo, hi});
    }
  }

 private:
  EllipseParams params_;
  double cos_;
  double sin_;
  double a2_;
  double b2_;
};

/// Rotated-ellipse form: 0 at the center, 1 on the boundary.
inline double ellipse_value(const EllipseParams& params, PixelPoint p) {
  return RotatedEllipse(params).value(static_cast<double>(p.x), static_cast<double>(p.y));
}

/// Strict interior test; boundary points (value exactly 1) are outside.
inline bool contains(const EllipseParams& params, PixelPoint p) {
  return RotatedEllipse(params).contains(p.x, p.y);
}

inline BoundingBox bounding_box(const EllipseParams& params) {
  return RotatedEllipse(params).bounding_box();
}

/// All interior pixels of the image as row spans, at most one per row.
inline std::vector<RowSpan> interior_spans(const EllipseParams& params, long width, long height) {
  std::vector<RowSpan> spans;
  if (width <= 0 || height <= 0) return spans;
  RotatedEllipse(params).for_each_span(width, height, [&](const RowSpan& s) { spans.push_back(s); });
  return spans;
}

}  // namespace pcfit
