#include "polysart/phantoms.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "polysart/error.hpp"

namespace polysart {

bool Ellipse::contains(double x, double y) const {
  const double theta = rotation_deg * std::numbers::pi / 180.0;
  const double dx = x - center_x_cm;
  const double dy = y - center_y_cm;
  const double u = dx * std::cos(theta) + dy * std::sin(theta);
  const double v = -dx * std::sin(theta) + dy * std::cos(theta);
  return (u * u) / (semi_axis_x_cm * semi_axis_x_cm) + (v * v) / (semi_axis_y_cm * semi_axis_y_cm) <= 1.0;
}

void EllipsePhantom::validate() const {
  if (!(field_of_view_cm > 0.0)) throw Error(ErrorKind::InvalidArgument, "phantom field of view must be positive");
  for (std::size_t e = 0; e < ellipses.size(); ++e) {
    if (!(ellipses[e].semi_axis_x_cm > 0.0) || !(ellipses[e].semi_axis_y_cm > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "ellipse " + std::to_string(e) + " has a non-positive semi-axis");
    }
  }
}

AttenuationMap rasterize(const EllipsePhantom& phantom, std::size_t image_size) {
  phantom.validate();
  if (image_size == 0) throw Error(ErrorKind::InvalidArgument, "phantom size must be positive");
  const double pitch = phantom.field_of_view_cm / static_cast<double>(image_size);
  const double half = 0.5 * phantom.field_of_view_cm;
  AttenuationMap map{std::vector<double>(image_size * image_size, 0.0)};
  for (std::size_t r = 0; r < image_size; ++r) {
    const double y = half - (static_cast<double>(r) + 0.5) * pitch;
    for (std::size_t c = 0; c < image_size; ++c) {
      const double x = -half + (static_cast<double>(c) + 0.5) * pitch;
      double& value = map.values[r * image_size + c];
      for (const auto& e : phantom.ellipses) {
        if (!e.contains(x, y)) continue;
        value = e.mode == CombineMode::Replace ? e.lac : value + e.lac;
      }
    }
  }
  return map;
}

DenseMatrix two_pixel_matrix() { return DenseMatrix(2, 2, {1.0, 1.0, 0.28, 1.13}); }

std::pair<SystemMatrix, AttenuationMap> two_pixel_object(double t1, double t2) {
  return {SystemMatrix::dense(two_pixel_matrix()), AttenuationMap{{t1, t2}}};
}

EllipsePhantom head_phantom_definition() {
  constexpr double bone = 0.4948;
  constexpr double tissue = 0.2033;
  EllipsePhantom p;
  p.field_of_view_cm = kHeadFieldOfViewCm;
  p.ellipses = {
      {0.0, 0.0, 9.6, 12.0, 0.0, bone},      // skull
      {0.0, 0.0, 9.0, 11.4, 0.0, tissue},    // brain
      {0.0, -8.6, 1.6, 0.9, 0.0, bone},      // skull base
      {-4.8, 5.8, 1.0, 0.7, 25.0, bone},     // orbit rims
      {4.8, 5.8, 1.0, 0.7, -25.0, bone},
      {0.0, 1.5, 1.8, 3.0, 0.0, 0.198},      // ventricle
      {-3.5, -2.5, 1.2, 1.2, 0.0, 0.212},    // lesions
      {3.5, -2.5, 1.5, 0.9, 30.0, 0.2083},
      {-2.0, 6.0, 0.8, 0.6, 0.0, 0.205},
  };
  return p;
}

AttenuationMap head_phantom(std::size_t image_size) {
  if (image_size < kMinHeadPhantomSize) {
    throw Error(ErrorKind::InvalidArgument, "head phantom needs N >= " + std::to_string(kMinHeadPhantomSize) +
                                                " to resolve its features, got " + std::to_string(image_size));
  }
  return rasterize(head_phantom_definition(), image_size);
}

}  // namespace polysart
