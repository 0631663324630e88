#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <vector>

namespace polysart {

struct SpectrumBin {
  double energy_kev;
  double weight;  // bin-integrated photon fraction
};

/// Discrete X-ray spectrum. Energies are strictly positive and strictly
/// increasing, weights are non-negative with at least one positive.
class Spectrum {
 public:
  explicit Spectrum(std::vector<SpectrumBin> bins);

  std::span<const SpectrumBin> bins() const { return bins_; }
  std::size_t size() const { return bins_.size(); }
  std::vector<double> energies() const;
  std::vector<double> weights() const;
  double total_weight() const;
  bool is_normalized(double tol = 1e-12) const;

 private:
  std::vector<SpectrumBin> bins_;
};

/// Reads the `energy_kev,weight` CSV format. Rows may appear in any order and
/// are returned sorted by energy. Weights are kept as written.
Spectrum parse_spectrum(std::istream& in);
Spectrum load_spectrum(const std::filesystem::path& path);
void write_spectrum(const Spectrum& spectrum, std::ostream& out);

Spectrum normalize(const Spectrum& spectrum);

/// Single bin of unit weight at `energy_kev`.
Spectrum monoenergetic(double energy_kev);

}  // namespace polysart
