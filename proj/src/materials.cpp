#include "polysart/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "polysart/csv.hpp"
#include "polysart/error.hpp"

namespace polysart {
namespace {

std::size_t segment_for(std::span<const double> reference, double t) {
  // index of the last reference value <= t, clamped to a valid segment
  const auto it = std::upper_bound(reference.begin(), reference.end(), t);
  const std::size_t after = static_cast<std::size_t>(it - reference.begin());
  const std::size_t last_segment = reference.size() - 2;
  if (after == 0) return 0;
  return std::min(after - 1, last_segment);
}

double blend(double ref_lo, double ref_hi, double lac_lo, double lac_hi, double t) {
  return ((ref_hi - t) * lac_lo + (t - ref_lo) * lac_hi) / (ref_hi - ref_lo);
}

}  // namespace

void MaterialCurve::validate() const {
  if (energies_kev.size() < 2 || energies_kev.size() != lac_per_cm.size()) {
    throw Error(ErrorKind::InvalidArgument, "material '" + name + "' needs at least two samples");
  }
  const bool all_zero = std::all_of(lac_per_cm.begin(), lac_per_cm.end(), [](double v) { return v == 0.0; });
  for (std::size_t s = 0; s < energies_kev.size(); ++s) {
    if (s > 0 && !(energies_kev[s] > energies_kev[s - 1])) {
      throw Error(ErrorKind::InvalidArgument, "material '" + name + "' energies are not strictly increasing");
    }
    if (!all_zero && !(lac_per_cm[s] > 0.0)) {
      throw Error(ErrorKind::NonPositive, "material '" + name + "' has a non-positive attenuation sample");
    }
  }
}

double eval_curve(const MaterialCurve& curve, double energy_kev) {
  const auto& e = curve.energies_kev;
  if (!(energy_kev >= e.front() && energy_kev <= e.back())) {
    throw Error(ErrorKind::OutOfRange, "energy " + csv::format(energy_kev) + " keV is outside the '" +
                                           curve.name + "' table [" + csv::format(e.front()) + ", " +
                                           csv::format(e.back()) + "]");
  }
  const auto it = std::lower_bound(e.begin(), e.end(), energy_kev);
  const std::size_t hi = static_cast<std::size_t>(it - e.begin());
  if (e[hi] == energy_kev) return curve.lac_per_cm[hi];
  const std::size_t lo = hi - 1;
  const double y0 = curve.lac_per_cm[lo];
  const double y1 = curve.lac_per_cm[hi];
  if (y0 <= 0.0 || y1 <= 0.0) {
    const double f = (energy_kev - e[lo]) / (e[hi] - e[lo]);
    return y0 + f * (y1 - y0);
  }
  const double f = std::log(energy_kev / e[lo]) / std::log(e[hi] / e[lo]);
  return std::exp(std::log(y0) + f * std::log(y1 / y0));
}

MaterialCurve load_material(const std::filesystem::path& path, std::string name) {
  const auto table = csv::read_file(path.string(), "energy_kev,lac_per_cm");
  MaterialCurve curve;
  curve.name = name.empty() ? path.stem().string() : std::move(name);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    curve.energies_kev.push_back(table.at(r, 0));
    curve.lac_per_cm.push_back(table.at(r, 1));
  }
  curve.validate();
  return curve;
}

LacModel::LacModel(std::vector<MaterialCurve> materials, double reference_kev)
    : materials_(std::move(materials)), reference_kev_(reference_kev) {
  if (materials_.size() < 2) throw Error(ErrorKind::InvalidArgument, "a LAC model needs at least two materials");
  for (const auto& m : materials_) {
    m.validate();
    reference_lac_.push_back(eval_curve(m, reference_kev_));
  }
  for (std::size_t k = 1; k < reference_lac_.size(); ++k) {
    if (!(reference_lac_[k] > reference_lac_[k - 1])) {
      throw Error(ErrorKind::InvalidArgument,
                  "materials must be ordered by strictly increasing attenuation at " +
                      csv::format(reference_kev_) + " keV ('" + materials_[k - 1].name + "' >= '" +
                      materials_[k].name + "')");
    }
  }
}

LacModel LacModel::load(const std::filesystem::path& manifest, double reference_kev) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::Io, "cannot open material manifest '" + manifest.string() + "'");
  std::vector<MaterialCurve> materials;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::filesystem::path entry = line.substr(first, last - first + 1);
    if (entry.is_relative()) entry = manifest.parent_path() / entry;
    materials.push_back(load_material(entry));
  }
  return LacModel(std::move(materials), reference_kev);
}

Bracket LacModel::bracket(double t) const {
  const std::size_t k = segment_for(reference_lac_, t);
  return {k, k + 1};
}

double LacModel::interpolate(double t, double energy_kev) const {
  const auto [lo, hi] = bracket(t);
  return blend(reference_lac_[lo], reference_lac_[hi], eval_curve(materials_[lo], energy_kev),
               eval_curve(materials_[hi], energy_kev), t);
}

double LacModel::derivative(double t, double energy_kev) const {
  const auto [lo, hi] = bracket(t);
  return (eval_curve(materials_[hi], energy_kev) - eval_curve(materials_[lo], energy_kev)) /
         (reference_lac_[hi] - reference_lac_[lo]);
}

LacTable LacModel::tabulate(std::span<const double> energies_kev) const {
  std::vector<double> values;
  values.reserve(energies_kev.size() * materials_.size());
  for (double e : energies_kev) {
    for (const auto& m : materials_) values.push_back(eval_curve(m, e));
  }
  return LacTable(reference_lac_, {energies_kev.begin(), energies_kev.end()}, std::move(values));
}

LacTable::LacTable(std::vector<double> reference_lac, std::vector<double> energies_kev,
                   std::vector<double> material_lac)
    : reference_lac_(std::move(reference_lac)),
      energies_(std::move(energies_kev)),
      material_lac_(std::move(material_lac)) {
  const std::size_t segments = segment_count();
  slope_.resize(energies_.size() * segments);
  for (std::size_t h = 0; h < energies_.size(); ++h) {
    for (std::size_t k = 0; k < segments; ++k) {
      slope_[h * segments + k] =
          (material(k + 1, h) - material(k, h)) / (reference_lac_[k + 1] - reference_lac_[k]);
    }
  }
}

std::size_t LacTable::segment(double t) const { return segment_for(reference_lac_, t); }

double LacTable::value(double t, std::size_t energy_index) const {
  return value_in_segment(t, segment(t), energy_index);
}

double LacTable::value_in_segment(double t, std::size_t k, std::size_t h) const {
  return blend(reference_lac_[k], reference_lac_[k + 1], material(k, h), material(k + 1, h), t);
}

Bracket bracket(const LacModel& model, double t) { return model.bracket(t); }

double interpolate_lac(const LacModel& model, double t, double energy_kev) {
  return model.interpolate(t, energy_kev);
}

double lac_derivative(const LacModel& model, double t, double energy_kev) {
  return model.derivative(t, energy_kev);
}

}  // namespace polysart
