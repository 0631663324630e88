#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace polysart {

/// Tabulated energy-dependent attenuation of one reference material.
struct MaterialCurve {
  std::string name;
  std::vector<double> energies_kev;  // strictly increasing
  std::vector<double> lac_per_cm;    // > 0, except an all-zero air curve

  void validate() const;
};

/// Log-log interpolation between the bracketing samples (linear where a
/// sample is zero). Exact at sample energies. Throws Error(OutOfRange) outside
/// the tabulated range.
double eval_curve(const MaterialCurve& curve, double energy_kev);

MaterialCurve load_material(const std::filesystem::path& path, std::string name = {});

struct Bracket {
  std::size_t lower;
  std::size_t upper;  // lower + 1
};

class LacTable;

/// Piecewise-linear model of attenuation as a function of the reference-energy
/// value t. Between two base materials whose reference LACs bracket t, the
/// LAC at energy e is the linear blend of their curves with weights fixed at
/// the reference energy.
///
/// Brackets are half-open, [mu_k(e0), mu_{k+1}(e0)); values below the first
/// or at/above the last material extrapolate on the nearest segment.
class LacModel {
 public:
  explicit LacModel(std::vector<MaterialCurve> materials, double reference_kev = 70.0);

  /// Reads a manifest listing material CSV paths (relative to the manifest) in
  /// ascending reference-LAC order.
  static LacModel load(const std::filesystem::path& manifest, double reference_kev = 70.0);

  std::size_t material_count() const { return materials_.size(); }
  std::size_t segment_count() const { return materials_.size() - 1; }
  const MaterialCurve& material(std::size_t k) const { return materials_[k]; }
  double reference_energy() const { return reference_kev_; }
  double reference_lac(std::size_t k) const { return reference_lac_[k]; }
  std::span<const double> reference_lacs() const { return reference_lac_; }

  Bracket bracket(double t) const;
  double interpolate(double t, double energy_kev) const;
  double derivative(double t, double energy_kev) const;

  /// Pre-evaluates every material curve at `energies` for fast repeated use.
  LacTable tabulate(std::span<const double> energies_kev) const;

 private:
  std::vector<MaterialCurve> materials_;
  double reference_kev_;
  std::vector<double> reference_lac_;
};

/// A LacModel evaluated at a fixed list of energies. Produces bit-identical
/// results to LacModel::interpolate / derivative at those energies.
class LacTable {
 public:
  LacTable(std::vector<double> reference_lac, std::vector<double> energies_kev,
           std::vector<double> material_lac);

  std::size_t energy_count() const { return energies_.size(); }
  std::size_t segment_count() const { return reference_lac_.size() - 1; }
  std::span<const double> energies() const { return energies_; }

  std::size_t segment(double t) const;
  double value(double t, std::size_t energy_index) const;
  double value_in_segment(double t, std::size_t segment, std::size_t energy_index) const;
  double slope(std::size_t segment, std::size_t energy_index) const {
    return slope_[energy_index * segment_count() + segment];
  }

 private:
  double material(std::size_t k, std::size_t h) const { return material_lac_[h * reference_lac_.size() + k]; }

  std::vector<double> reference_lac_;
  std::vector<double> energies_;
  std::vector<double> material_lac_;  // [energy][material]
  std::vector<double> slope_;         // [energy][segment]
};

Bracket bracket(const LacModel& model, double t);
double interpolate_lac(const LacModel& model, double t, double energy_kev);
double lac_derivative(const LacModel& model, double t, double energy_kev);

}  // namespace polysart
