#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "polysart/error.hpp"
#include "polysart/phantoms.hpp"

using namespace polysart;

TEST(TwoPixel, ObjectAndMatrix) {
  const auto [a, t] = two_pixel_object(0.1, 0.16);
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 2u);
  EXPECT_EQ(t.values, (std::vector<double>{0.1, 0.16}));
  EXPECT_EQ(a.to_dense().data, (std::vector<double>{1.0, 1.0, 0.28, 1.13}));
}

TEST(Ellipse, ContainsRespectsRotation) {
  const Ellipse e{1.0, 0.0, 2.0, 0.5, 90.0, 1.0};
  EXPECT_TRUE(e.contains(1.0, 1.9));
  EXPECT_FALSE(e.contains(2.9, 0.0));
  const Ellipse flat{1.0, 0.0, 2.0, 0.5, 0.0, 1.0};
  EXPECT_TRUE(flat.contains(2.9, 0.0));
  EXPECT_FALSE(flat.contains(1.0, 1.9));
}

TEST(Rasterize, ReplaceAndAddModes) {
  EllipsePhantom p;
  p.field_of_view_cm = 4.0;
  p.ellipses = {{0.0, 0.0, 10.0, 10.0, 0.0, 1.0}, {0.0, 0.0, 10.0, 10.0, 0.0, 0.5, CombineMode::Add}};
  for (double v : rasterize(p, 4).values) EXPECT_EQ(v, 1.5);
  p.ellipses.push_back({0.0, 0.0, 10.0, 10.0, 0.0, 0.25, CombineMode::Replace});
  for (double v : rasterize(p, 4).values) EXPECT_EQ(v, 0.25);
}

TEST(Rasterize, PixelLayoutHasRowZeroAtTop) {
  EllipsePhantom p;
  p.field_of_view_cm = 2.0;
  p.ellipses = {{-0.5, 0.5, 0.2, 0.2, 0.0, 3.0}};  // centre of the top-left pixel
  EXPECT_EQ(rasterize(p, 2).values, (std::vector<double>{3.0, 0.0, 0.0, 0.0}));
}

TEST(Rasterize, InvalidInputsThrow) {
  EllipsePhantom p;
  p.ellipses = {{0.0, 0.0, 0.0, 1.0, 0.0, 1.0}};
  EXPECT_THROW(rasterize(p, 8), Error);
  p.ellipses.clear();
  EXPECT_THROW(rasterize(p, 0), Error);
  p.field_of_view_cm = -1.0;
  EXPECT_THROW(rasterize(p, 8), Error);
}

TEST(HeadPhantom, ValuesComeFromTheMaterialLevels) {
  const std::set<double> allowed{0.0, 0.4948, 0.2033, 0.198, 0.212, 0.2083, 0.205};
  for (std::size_t n : {16u, 64u, 128u}) {
    const auto map = head_phantom(n);
    ASSERT_EQ(map.values.size(), n * n);
    std::set<double> seen;
    for (double v : map.values) {
      EXPECT_TRUE(allowed.contains(v)) << v;
      seen.insert(v);
    }
    EXPECT_EQ(*std::max_element(map.values.begin(), map.values.end()), 0.4948);
    EXPECT_EQ(*std::min_element(map.values.begin(), map.values.end()), 0.0);
    if (n >= 64) {
      const auto low_contrast =
          std::count_if(seen.begin(), seen.end(), [](double v) { return v >= 0.195 && v <= 0.215; });
      EXPECT_GE(low_contrast, 3);
    }
  }
}

TEST(HeadPhantom, RejectsTooSmallGrids) {
  for (std::size_t n : {0u, 1u, 8u, 15u}) {
    try {
      head_phantom(n);
      FAIL() << n;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
  }
  EXPECT_NO_THROW(head_phantom(kMinHeadPhantomSize));
}

TEST(HeadPhantom, BoneAreaMatchesEllipseAreas) {
  constexpr std::size_t n = 256;
  const auto map = head_phantom(n);
  const double bone_pixels = static_cast<double>(std::count(map.values.begin(), map.values.end(), 0.4948));
  const double fraction = bone_pixels / static_cast<double>(n * n);
  const double pi = std::numbers::pi;
  const double area = pi * (9.6 * 12.0 - 9.0 * 11.4) + pi * (1.6 * 0.9) + 2.0 * pi * (1.0 * 0.7);
  const double expected = area / (25.6 * 25.6);
  EXPECT_NEAR(fraction, expected, 0.1 * expected);
}

TEST(HeadPhantom, IsLeftRightSymmetricOutsideTheLesions) {
  constexpr std::size_t n = 64;
  const auto map = head_phantom(n);
  std::size_t bone_mismatch = 0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if ((map.values[r * n + c] == 0.4948) != (map.values[r * n + (n - 1 - c)] == 0.4948)) ++bone_mismatch;
  EXPECT_EQ(bone_mismatch, 0u);
}
