#include "polysart/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "polysart/csv.hpp"
#include "polysart/error.hpp"

namespace polysart {

Spectrum::Spectrum(std::vector<SpectrumBin> bins) : bins_(std::move(bins)) {
  if (bins_.empty()) throw Error(ErrorKind::EmptyInput, "spectrum has no bins");
  bool any_positive = false;
  for (std::size_t h = 0; h < bins_.size(); ++h) {
    const auto& b = bins_[h];
    if (!std::isfinite(b.energy_kev) || b.energy_kev <= 0.0) {
      throw Error(ErrorKind::NonPositive, "spectrum energy must be positive, got " + csv::format(b.energy_kev));
    }
    if (!std::isfinite(b.weight) || b.weight < 0.0) {
      throw Error(ErrorKind::NegativeWeight,
                  "spectrum weight at " + csv::format(b.energy_kev) + " keV is negative");
    }
    if (h > 0 && b.energy_kev <= bins_[h - 1].energy_kev) {
      throw Error(b.energy_kev == bins_[h - 1].energy_kev ? ErrorKind::DuplicateEnergy
                                                          : ErrorKind::InvalidArgument,
                  "spectrum energies must be strictly increasing at " + csv::format(b.energy_kev) + " keV");
    }
    any_positive = any_positive || b.weight > 0.0;
  }
  if (!any_positive) throw Error(ErrorKind::ZeroWeights, "spectrum weights are all zero");
}

std::vector<double> Spectrum::energies() const {
  std::vector<double> out(bins_.size());
  std::transform(bins_.begin(), bins_.end(), out.begin(), [](const SpectrumBin& b) { return b.energy_kev; });
  return out;
}

std::vector<double> Spectrum::weights() const {
  std::vector<double> out(bins_.size());
  std::transform(bins_.begin(), bins_.end(), out.begin(), [](const SpectrumBin& b) { return b.weight; });
  return out;
}

double Spectrum::total_weight() const {
  return std::accumulate(bins_.begin(), bins_.end(), 0.0,
                         [](double acc, const SpectrumBin& b) { return acc + b.weight; });
}

bool Spectrum::is_normalized(double tol) const { return std::fabs(total_weight() - 1.0) <= tol; }

Spectrum parse_spectrum(std::istream& in) {
  const auto table = csv::read(in, "spectrum", "energy_kev,weight");
  if (table.rows() == 0) throw Error(ErrorKind::EmptyInput, "spectrum file has no bins");
  std::vector<SpectrumBin> bins;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const double e = table.at(r, 0);
    const double w = table.at(r, 1);
    if (w < 0.0) {
      throw Error(ErrorKind::NegativeWeight, "spectrum line " + std::to_string(table.line_numbers[r]) +
                                                 ": negative weight " + csv::format(w));
    }
    bins.push_back({e, w});
  }
  std::stable_sort(bins.begin(), bins.end(),
                   [](const SpectrumBin& a, const SpectrumBin& b) { return a.energy_kev < b.energy_kev; });
  for (std::size_t h = 1; h < bins.size(); ++h) {
    if (bins[h].energy_kev == bins[h - 1].energy_kev) {
      throw Error(ErrorKind::DuplicateEnergy,
                  "spectrum has duplicate energy " + csv::format(bins[h].energy_kev) + " keV");
    }
  }
  return Spectrum(std::move(bins));
}

Spectrum load_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open spectrum '" + path.string() + "'");
  try {
    return parse_spectrum(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_spectrum(const Spectrum& spectrum, std::ostream& out) {
  out << "energy_kev,weight\n";
  for (const auto& b : spectrum.bins()) out << csv::format(b.energy_kev) << ',' << csv::format(b.weight) << '\n';
}

Spectrum normalize(const Spectrum& spectrum) {
  const double total = spectrum.total_weight();
  std::vector<SpectrumBin> bins(spectrum.bins().begin(), spectrum.bins().end());
  for (auto& b : bins) b.weight /= total;
  return Spectrum(std::move(bins));
}

Spectrum monoenergetic(double energy_kev) {
  if (!(energy_kev > 0.0)) {
    throw Error(ErrorKind::NonPositive, "monoenergetic energy must be positive, got " + csv::format(energy_kev));
  }
  return Spectrum({{energy_kev, 1.0}});
}

}  // namespace polysart
