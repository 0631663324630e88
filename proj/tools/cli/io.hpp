#pragma once

// File formats written and read by the command-line tool.

#include <cstddef>
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace polysart::cli {

/// Rectangular numeric grid: images are N x N, sinograms views x detectors.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
};

/// One grid row per line, no header, 17 significant digits.
void write_grid_csv(const std::filesystem::path& path, const Grid& grid);
Grid read_grid_csv(const std::filesystem::path& path);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint16_t> samples;
};

/// Binary 16-bit PGM; values are mapped linearly from [low, high] onto
/// [0, 65535] and clipped. A degenerate window maps everything to 0.
GrayImage window_grid(const Grid& grid, double low, double high);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_pgm(const std::filesystem::path& path);

struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;
};

void write_ppm(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_ppm(const std::filesystem::path& path);

/// Blue below `center`, white at it, red above, saturating at center +- span.
std::array<std::uint8_t, 3> diverging_color(double value, double center, double span);

std::string sha256_hex(const std::filesystem::path& path);

/// run.json: config echo plus size and SHA-256 of every artifact. Contains no
/// timestamps or host details, so reruns are byte-identical.
class RunManifest {
 public:
  RunManifest(std::filesystem::path out_dir, std::string command);

  const std::filesystem::path& out_dir() const { return out_dir_; }
  std::filesystem::path path(const std::string& file) const { return out_dir_ / file; }

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  nlohmann::json& summary() { return summary_; }

  /// Records a file already written under out_dir.
  void add_artifact(const std::string& file);
  void write() const;

 private:
  std::filesystem::path out_dir_;
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json summary_ = nlohmann::json::object();
  std::vector<std::string> artifacts_;
};

}  // namespace polysart::cli
