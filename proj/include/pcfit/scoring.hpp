#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include "pcfit/error.hpp"
#include "pcfit/geometry.hpp"

namespace pcfit {

/// Pixel label. The four fat classes come first so they can index arrays.
enum class PixelClass : std::uint8_t {
  Red = 0,    ///< epicardial fat
  Green = 1,  ///< mediastinal fat
  Grey = 2,   ///< other fat
  Black = 3,  ///< background
  Other = 4,  ///< anything else; scores zero
};

inline constexpr std::size_t kScoredClasses = 4;
inline constexpr std::size_t kClassCount = 5;

inline constexpr std::string_view class_name(PixelClass c) {
  switch (c) {
    case PixelClass::Red: return "Red";
    case PixelClass::Green: return "Green";
    case PixelClass::Grey: return "Grey";
    case PixelClass::Black: return "Black";
    case PixelClass::Other: return "Other";
  }
  return "?";
}

/// Per-class pixel counts, indexed by PixelClass.
struct ClassCounts {
  std::array<std::int64_t, kClassCount> n{};

  std::int64_t& operator[](PixelClass c) { return n[static_cast<std::size_t>(c)]; }
  std::int64_t operator[](PixelClass c) const { return n[static_cast<std::size_t>(c)]; }
  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto v : n) t += v;
    return t;
  }

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

/// Immutable row-major grid of pixel classes.
///
/// Construction also builds per-row cumulative counts of the four scored
/// classes, so the number of class-c pixels in any row run is two lookups.
class LabeledImage {
 public:
  LabeledImage() = default;

  LabeledImage(long width, long height, std::vector<PixelClass> labels)
      : width_(width), height_(height), labels_(std::move(labels)) {
    if (width <= 0 || height <= 0) throw DecodeError("image dimensions must be positive");
    if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw DecodeError("label count does not match width x height");
    }
    build_index();
  }

  long width() const { return width_; }
  long height() const { return height_; }
  bool empty() const { return labels_.empty(); }
  const std::vector<PixelClass>& labels() const { return labels_; }
  const ClassCounts& class_totals() const { return totals_; }

  PixelClass at(long x, long y) const {
    return labels_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)];
  }

  /// Adds scored-class counts over columns [x_min, x_max] of row y. Other is
  /// not tracked.
  void add_run(long y, long x_min, long x_max, ClassCounts& out) const {
    const std::uint32_t* hi = prefix_row(y) + static_cast<std::size_t>(x_max + 1) * kScoredClasses;
    const std::uint32_t* lo = prefix_row(y) + static_cast<std::size_t>(x_min) * kScoredClasses;
    for (std::size_t c = 0; c < kScoredClasses; ++c) out.n[c] += hi[c] - lo[c];
  }

  /// Counts every label again from scratch.
  ClassCounts recount() const {
    ClassCounts c;
    for (PixelClass p : labels_) ++c[p];
    return c;
  }

 private:
  const std::uint32_t* prefix_row(long y) const {
    return prefix_.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width_ + 1) * kScoredClasses;
  }

  void build_index() {
    const auto stride = static_cast<std::size_t>(width_ + 1) * kScoredClasses;
    prefix_.assign(static_cast<std::size_t>(height_) * stride, 0);
    for (long y = 0; y < height_; ++y) {
      std::uint32_t* row = prefix_.data() + static_cast<std::size_t>(y) * stride;
      for (long x = 0; x < width_; ++x) {
        const PixelClass p = at(x, y);
        if (static_cast<std::size_t>(p) >= kClassCount) throw DecodeError("label value out of range");
        ++totals_[p];
        std::uint32_t* cur = row + static_cast<std::size_t>(x) * kScoredClasses;
        std::uint32_t* next = cur + kScoredClasses;
        for (std::size_t c = 0; c < kScoredClasses; ++c) next[c] = cur[c];
        if (p != PixelClass::Other) ++next[static_cast<std::size_t>(p)];
      }
    }
  }

  long width_ = 0;
  long height_ = 0;
  std::vector<PixelClass> labels_;
  std::vector<std::uint32_t> prefix_;
  ClassCounts totals_;
};

/// Objective coefficients. Stored non-negative; the objective applies signs.
struct ClassWeights {
  double q_r = 85.0;
  double q_g = 3.0;
  double q_c = 4.0;
  double q_b = 2.5;

  void validate() const {
    if (!(q_r >= 0.0 && q_g >= 0.0 && q_c >= 0.0 && q_b >= 0.0)) {
      throw ConfigError("class weights must be finite and >= 0");
    }
  }

  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

/// Containment indices (percent) and their ratio.
struct Metrics {
  double pr = 0.0;
  double pg = 0.0;
  double pc = 0.0;
  double pb = 0.0;
  double gf = 0.0;  ///< +inf when pg + pc + pb == 0
};

/// Weighted score of interior class counts: q_r r - (q_g g + q_c c + q_b b).
inline double weighted_score(const ClassWeights& w, const ClassCounts& inside) {
  return w.q_r * static_cast<double>(inside[PixelClass::Red]) -
         (w.q_g * static_cast<double>(inside[PixelClass::Green]) +
          w.q_c * static_cast<double>(inside[PixelClass::Grey]) +
          w.q_b * static_cast<double>(inside[PixelClass::Black]));
}

/// Scored-class counts of interior pixels, via row spans and prefix sums.
/// The Other slot is left at zero.
inline ClassCounts interior_counts(const LabeledImage& image, const EllipseParams& params) {
  ClassCounts inside;
  RotatedEllipse(params).for_each_span(image.width(), image.height(), [&](const RowSpan& s) {
    image.add_run(s.y, s.x_min, s.x_max, inside);
  });
  return inside;
}

/// Objective value of one candidate ellipse.
inline double fitness(const LabeledImage& image, const ClassWeights& weights, const EllipseParams& params) {
  return weighted_score(weights, interior_counts(image, params));
}

/// Reference objective: tests every pixel of the image individually.
inline double fitness_naive(const LabeledImage& image, const ClassWeights& weights, const EllipseParams& params) {
  const RotatedEllipse ellipse(params);
  ClassCounts inside;
  for (long y = 0; y < image.height(); ++y) {
    for (long x = 0; x < image.width(); ++x) {
      if (!ellipse.contains(x, y)) continue;
      const PixelClass p = image.at(x, y);
      if (p != PixelClass::Other) ++inside[p];
    }
  }
  return weighted_score(weights, inside);
}

inline double general_fit(double pr, double pg, double pc, double pb) {
  const double denom = pg + pc + pb;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return pr / denom;
}

/// Percentage of each class's whole-image total that lies inside the ellipse.
inline Metrics compute_metrics(const LabeledImage& image, const EllipseParams& params) {
  const ClassCounts inside = interior_counts(image, params);
  const ClassCounts& totals = image.class_totals();
  auto percent = [&](PixelClass c) {
    if (totals[c] == 0) return 0.0;
    return 100.0 * static_cast<double>(inside[c]) / static_cast<double>(totals[c]);
  };
  Metrics m;
  m.pr = percent(PixelClass::Red);
  m.pg = percent(PixelClass::Green);
  m.pc = percent(PixelClass::Grey);
  m.pb = percent(PixelClass::Black);
  m.gf = general_fit(m.pr, m.pg, m.pc, m.pb);
  return m;
}

}  // namespace pcfit
