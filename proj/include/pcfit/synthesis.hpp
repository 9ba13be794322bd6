#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pcfit/error.hpp"
#include "pcfit/evolve.hpp"
#include "pcfit/geometry.hpp"
#include "pcfit/random.hpp"
#include "pcfit/scoring.hpp"

namespace pcfit {

/// Synthetic labeled slice: a Red-filled planted ellipse inside a Green ring,
/// a few Grey discs outside, Black elsewhere.
struct PhantomSpec {
  long width = 512;
  long height = 512;
  EllipseParams planted{30.0, 256.0, 256.0, 150.0, 110.0};
  double ring_thickness = 15.0;
  double red_fill_fraction = 0.7;  ///< interior pixels that are Red; the rest are Other
  int grey_blob_count = 12;
  double noise_flip_fraction = 0.0;
  std::uint64_t seed = 1;

  EllipseParams dilated() const {
    EllipseParams d = planted;
    d.a += ring_thickness;
    d.b += ring_thickness;
    return d;
  }

  void validate() const {
    if (width <= 0 || height <= 0) throw GenerationError("phantom width and height must be positive");
    if (!is_valid(planted)) throw GenerationError("planted ellipse must be finite with a > 0 and b > 0");
    if (!(ring_thickness >= 0.0) || !std::isfinite(ring_thickness)) {
      throw GenerationError("ring_thickness must be >= 0");
    }
    if (!(red_fill_fraction >= 0.0 && red_fill_fraction <= 1.0)) {
      throw GenerationError("red_fill_fraction must lie in [0, 1]");
    }
    if (!(noise_flip_fraction >= 0.0 && noise_flip_fraction <= 1.0)) {
      throw GenerationError("noise_flip_fraction must lie in [0, 1]");
    }
    if (grey_blob_count < 0) throw GenerationError("grey_blob_count must be >= 0");
    const BoundingBox box = bounding_box(dilated());
    if (box.x_lo < 0.0 || box.y_lo < 0.0 || box.x_hi > static_cast<double>(width - 1) ||
        box.y_hi > static_cast<double>(height - 1)) {
      throw GenerationError("planted ellipse plus ring does not fit within the image bounds");
    }
  }
};

struct Phantom {
  LabeledImage image;
  EllipseParams planted;
};

inline Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const EllipseParams planted = validated(spec.planted);
  Rng rng(spec.seed);
  const RotatedEllipse inner(planted);
  const RotatedEllipse outer(validated(spec.dilated()));
  const auto w = spec.width;
  const auto h = spec.height;
  std::vector<PixelClass> labels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), PixelClass::Black);
  auto at = [&](long x, long y) -> PixelClass& {
    return labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
  };

  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      if (inner.contains(x, y)) {
        at(x, y) = rng.canonical() < spec.red_fill_fraction ? PixelClass::Red : PixelClass::Other;
      } else if (outer.contains(x, y)) {
        at(x, y) = PixelClass::Green;
      }
    }
  }

  constexpr int kPlacementTries = 1000;
  for (int blob = 0; blob < spec.grey_blob_count; ++blob) {
    const double radius = rng.uniform(2.0, 5.0);
    double cx = 0.0;
    double cy = 0.0;
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementTries && !placed; ++attempt) {
      cx = rng.uniform(0.0, static_cast<double>(w - 1));
      cy = rng.uniform(0.0, static_cast<double>(h - 1));
      placed = outer.value(cx, cy) >= 1.0;
    }
    if (!placed) continue;
    const long x0 = std::max(0L, static_cast<long>(std::floor(cx - radius)));
    const long x1 = std::min(w - 1, static_cast<long>(std::ceil(cx + radius)));
    const long y0 = std::max(0L, static_cast<long>(std::floor(cy - radius)));
    const long y1 = std::min(h - 1, static_cast<long>(std::ceil(cy + radius)));
    for (long y = y0; y <= y1; ++y) {
      for (long x = x0; x <= x1; ++x) {
        const double dx = static_cast<double>(x) - cx;
        const double dy = static_cast<double>(y) - cy;
        if (dx * dx + dy * dy < radius * radius && !outer.contains(x, y)) at(x, y) = PixelClass::Grey;
      }
    }
  }

  if (spec.noise_flip_fraction > 0.0) {
    for (PixelClass& p : labels) {
      if (rng.canonical() < spec.noise_flip_fraction) p = static_cast<PixelClass>(rng.below(kClassCount));
    }
  }
  return {LabeledImage(w, h, std::move(labels)), planted};
}

/// Lattice over a ParameterRanges box: lo, lo + step, ... up to hi.
struct GridSpec {
  ParameterRanges box;
  std::array<double, kGeneCount> steps{30.0, 4.0, 4.0, 4.0, 4.0};

  static constexpr double kMaxPoints = 1e8;

  /// Number of lattice values along gene i.
  std::int64_t axis_count(std::size_t i) const {
    const Interval& iv = box[i];
    return static_cast<std::int64_t>(std::floor(iv.width() / steps[i] + 1e-9)) + 1;
  }

  double axis_value(std::size_t i, std::int64_t k) const {
    return box[i].lo + static_cast<double>(k) * steps[i];
  }

  /// Total point count as a double so oversized grids cannot overflow.
  double cardinality() const {
    double n = 1.0;
    for (std::size_t i = 0; i < kGeneCount; ++i) n *= static_cast<double>(axis_count(i));
    return n;
  }

  void validate() const {
    box.validate();
    for (double s : steps) {
      if (!(s > 0.0) || !std::isfinite(s)) throw GridError("grid steps must be > 0");
    }
    const double n = cardinality();
    if (n > kMaxPoints) {
      throw GridError("grid has " + std::to_string(static_cast<long long>(n)) + " points, above the limit of " +
                      std::to_string(static_cast<long long>(kMaxPoints)));
    }
  }
};

struct GridResult {
  EllipseParams params;
  double fitness = 0.0;
  std::int64_t evaluated = 0;
};

/// Exhaustive maximization of fitness_naive over the lattice. Points are
/// visited in lexicographic (theta, x_c, y_c, a, b) order and only a strictly
/// better point replaces the incumbent, so ties go to the smallest tuple.
inline GridResult grid_search(const LabeledImage& image, const ClassWeights& weights, const GridSpec& grid) {
  grid.validate();
  std::array<std::int64_t, kGeneCount> count{};
  for (std::size_t i = 0; i < kGeneCount; ++i) count[i] = grid.axis_count(i);

  GridResult best;
  bool have = false;
  EllipseParams p;
  for (std::int64_t i0 = 0; i0 < count[0]; ++i0) {
    p.theta = grid.axis_value(0, i0);
    for (std::int64_t i1 = 0; i1 < count[1]; ++i1) {
      p.x_c = grid.axis_value(1, i1);
      for (std::int64_t i2 = 0; i2 < count[2]; ++i2) {
        p.y_c = grid.axis_value(2, i2);
        for (std::int64_t i3 = 0; i3 < count[3]; ++i3) {
          p.a = grid.axis_value(3, i3);
          for (std::int64_t i4 = 0; i4 < count[4]; ++i4) {
            p.b = grid.axis_value(4, i4);
            const double f = fitness_naive(image, weights, p);
            ++best.evaluated;
            if (!have || f > best.fitness) {
              best.params = p;
              best.fitness = f;
              have = true;
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace pcfit
