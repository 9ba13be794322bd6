#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pcfit/geometry.hpp"

namespace pcfit {
namespace {

// Row spans found by testing contains() on every pixel of the row.
std::vector<RowSpan> naive_spans(const EllipseParams& p, long width, long height) {
  std::vector<RowSpan> out;
  for (long y = 0; y < height; ++y) {
    long lo = -1;
    long hi = -1;
    for (long x = 0; x < width; ++x) {
      if (!contains(p, {x, y})) continue;
      if (lo < 0) lo = x;
      hi = x;
    }
    if (lo >= 0) out.push_back({y, lo, hi});
  }
  return out;
}

EllipseParams random_params(std::mt19937_64& gen, long width, long height) {
  std::uniform_real_distribution<double> theta(0.0, 360.0);
  std::uniform_real_distribution<double> cx(-10.0, static_cast<double>(width) + 10.0);
  std::uniform_real_distribution<double> cy(-10.0, static_cast<double>(height) + 10.0);
  std::uniform_real_distribution<double> axis(0.3, 40.0);
  return {theta(gen), cx(gen), cy(gen), axis(gen), axis(gen)};
}

TEST(EllipseValue, BoundaryOnMajorAxis) {
  EXPECT_DOUBLE_EQ(ellipse_value({0, 0, 0, 2, 1}, {2, 0}), 1.0);
}

TEST(EllipseValue, CenterIsZero) {
  EXPECT_DOUBLE_EQ(ellipse_value({0, 0, 0, 2, 1}, {0, 0}), 0.0);
}

TEST(EllipseValue, QuarterTurnMapsMajorAxisOntoY) {
  EXPECT_DOUBLE_EQ(ellipse_value({90, 0, 0, 2, 1}, {0, 2}), 1.0);
}

TEST(EllipseValue, SwappingAxesWithQuarterTurnIsInvariant) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<long> coord(-50, 50);
  for (int i = 0; i < 2000; ++i) {
    const EllipseParams p = random_params(gen, 64, 64);
    const EllipseParams q{p.theta + 90.0, p.x_c, p.y_c, p.b, p.a};
    const PixelPoint pt{coord(gen), coord(gen)};
    const double e = ellipse_value(p, pt);
    EXPECT_NEAR(e, ellipse_value(q, pt), 1e-9 * std::max(1.0, e));
  }
}

TEST(EllipseValue, ZeroAtCenterForAnyParams) {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 500; ++i) {
    EllipseParams p = random_params(gen, 64, 64);
    p.x_c = std::round(p.x_c);
    p.y_c = std::round(p.y_c);
    EXPECT_EQ(ellipse_value(p, {static_cast<long>(p.x_c), static_cast<long>(p.y_c)}), 0.0);
  }
}

TEST(Contains, StrictInequality) {
  const EllipseParams p{0, 0, 0, 2, 1};
  EXPECT_TRUE(contains(p, {0, 0}));
  EXPECT_FALSE(contains(p, {2, 0}));
  EXPECT_FALSE(contains(p, {5, 5}));
}

TEST(InteriorSpans, CircleMiddleRow) {
  const EllipseParams p{0, 10, 10, 5, 5};
  const auto spans = interior_spans(p, 32, 32);
  const auto expected = naive_spans(p, 32, 32);
  ASSERT_EQ(spans, expected);
  bool found = false;
  for (const auto& s : spans) {
    if (s.y == 10) {
      EXPECT_EQ(s.x_min, 6);
      EXPECT_EQ(s.x_max, 14);
      found = true;
    }
    EXPECT_NE(s.y, 15) << "row 15 only touches the boundary";
  }
  EXPECT_TRUE(found);
}

TEST(InteriorSpans, FullyOffImageIsEmpty) {
  EXPECT_TRUE(interior_spans({17, -1000, 256, 300, 300}, 512, 512).empty());
  EXPECT_TRUE(interior_spans({0, 256, 5000, 100, 100}, 512, 512).empty());
}

TEST(InteriorSpans, MatchesPerPixelScanExhaustively) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<long> dim(1, 64);
  for (int draw = 0; draw < 300; ++draw) {
    const long w = dim(gen);
    const long h = dim(gen);
    const EllipseParams p = random_params(gen, w, h);
    ASSERT_EQ(interior_spans(p, w, h), naive_spans(p, w, h))
        << "theta=" << p.theta << " xc=" << p.x_c << " yc=" << p.y_c << " a=" << p.a << " b=" << p.b;
  }
}

TEST(InteriorSpans, LatticeAlignedEllipses) {
  // Integer centers and axes put many lattice points exactly on the boundary.
  for (int theta : {0, 30, 45, 90, 135, 180, 270}) {
    for (int a = 1; a <= 9; ++a) {
      for (int b = 1; b <= 9; b += 2) {
        const EllipseParams p{static_cast<double>(theta), 12, 13, static_cast<double>(a), static_cast<double>(b)};
        ASSERT_EQ(interior_spans(p, 25, 27), naive_spans(p, 25, 27)) << theta << " " << a << " " << b;
      }
    }
  }
}

TEST(BoundingBox, HalfExtents) {
  auto check = [](EllipseParams p, double w, double h) {
    const BoundingBox box = bounding_box(p);
    EXPECT_NEAR(box.half_width(), w, 1e-12);
    EXPECT_NEAR(box.half_height(), h, 1e-12);
  };
  check({0, 0, 0, 3, 1}, 3, 1);
  check({90, 0, 0, 3, 1}, 1, 3);
  check({45, 0, 0, 2, 2}, 2, 2);
}

TEST(BoundingBox, ContainsEverySpanEndpoint) {
  std::mt19937_64 gen(99);
  for (int draw = 0; draw < 300; ++draw) {
    const EllipseParams p = random_params(gen, 64, 64);
    const BoundingBox box = bounding_box(p);
    for (const RowSpan& s : interior_spans(p, 64, 64)) {
      EXPECT_GE(static_cast<double>(s.x_min), box.x_lo);
      EXPECT_LE(static_cast<double>(s.x_max), box.x_hi);
      EXPECT_GE(static_cast<double>(s.y), box.y_lo);
      EXPECT_LE(static_cast<double>(s.y), box.y_hi);
    }
  }
}

TEST(Validated, NormalizesThetaAndRejectsBadAxes) {
  EXPECT_DOUBLE_EQ(validated({370, 0, 0, 1, 1}).theta, 10.0);
  EXPECT_DOUBLE_EQ(validated({-90, 0, 0, 1, 1}).theta, 270.0);
  EXPECT_DOUBLE_EQ(validated({360, 0, 0, 1, 1}).theta, 0.0);
  EXPECT_THROW(validated({0, 0, 0, 0, 1}), ConfigError);
  EXPECT_THROW(validated({0, 0, 0, 1, -2}), ConfigError);
  EXPECT_THROW(validated({0, NAN, 0, 1, 1}), ConfigError);
}

}  // namespace
}  // namespace pcfit
