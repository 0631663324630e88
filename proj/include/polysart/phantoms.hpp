#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "polysart/projection.hpp"

namespace polysart {

enum class CombineMode { Replace, Add };

struct Ellipse {
  double center_x_cm;
  double center_y_cm;
  double semi_axis_x_cm;
  double semi_axis_y_cm;
  double rotation_deg;  // counter-clockwise
  double lac;           // cm^-1 at the reference energy
  CombineMode mode = CombineMode::Replace;

  bool contains(double x, double y) const;
};

/// Ordered ellipse list rasterised over a square field of view. Later
/// ellipses override (Replace) or accumulate onto (Add) earlier ones.
struct EllipsePhantom {
  std::vector<Ellipse> ellipses;
  double field_of_view_cm = 25.6;

  void validate() const;
};

/// Pixel value = phantom value at the pixel centre. Pixel layout matches
/// ParallelBeamGeometry (row 0 at the top, pitch = field_of_view / N).
AttenuationMap rasterize(const EllipsePhantom& phantom, std::size_t image_size);

/// Two 1 x 1 cm pixels: one ray through both horizontally and one oblique ray
/// with intersection lengths 0.28 and 1.13 cm.
std::pair<SystemMatrix, AttenuationMap> two_pixel_object(double t1, double t2);
DenseMatrix two_pixel_matrix();

/// Simplified head: skull at bone attenuation, soft-tissue interior, bony
/// inclusions and low-contrast lesions in [0.195, 0.215] cm^-1, air outside.
EllipsePhantom head_phantom_definition();

constexpr std::size_t kMinHeadPhantomSize = 16;
constexpr double kHeadFieldOfViewCm = 25.6;

/// Rasterised head phantom. Throws Error(InvalidArgument) for N < 16, where
/// the smallest lesions are no longer resolved.
AttenuationMap head_phantom(std::size_t image_size);

}  // namespace polysart
