#include "cli/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "polysart/csv.hpp"
#include "polysart/error.hpp"

namespace polysart::cli {
namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  return in;
}

// Reads the magic, width, height and maxval of a binary PNM header.
void read_pnm_header(std::istream& in, const std::string& magic, const std::filesystem::path& path,
                     std::size_t& width, std::size_t& height, unsigned& maxval) {
  std::string got;
  in >> got;
  if (got != magic) throw Error(ErrorKind::Parse, path.string() + ": expected " + magic + " header");
  auto next_number = [&]() {
    in >> std::ws;
    while (in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
      in >> std::ws;
    }
    long long v = -1;
    in >> v;
    if (!in || v <= 0) throw Error(ErrorKind::Parse, path.string() + ": malformed header");
    return static_cast<std::size_t>(v);
  };
  width = next_number();
  height = next_number();
  maxval = static_cast<unsigned>(next_number());
  in.get();  // single whitespace before the raster
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const Grid& grid) {
  if (grid.values.size() != grid.rows * grid.cols) {
    throw Error(ErrorKind::DimensionMismatch, "grid data does not match its shape");
  }
  auto out = open_output(path);
  for (std::size_t r = 0; r < grid.rows; ++r) csv::write_row(out, grid.values.data() + r * grid.cols, grid.cols);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

Grid read_grid_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_file(path.string());
  if (table.rows() == 0) throw Error(ErrorKind::EmptyInput, path.string() + ": no data rows");
  return {table.rows(), table.columns, table.values};
}

GrayImage window_grid(const Grid& grid, double low, double high) {
  GrayImage image{grid.cols, grid.rows, std::vector<std::uint16_t>(grid.values.size(), 0)};
  if (!(high > low)) return image;
  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    const double u = std::clamp((grid.values[k] - low) / (high - low), 0.0, 1.0);
    image.samples[k] = static_cast<std::uint16_t>(std::lround(u * 65535.0));
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  auto out = open_output(path);
  out << "P5\n" << image.width << ' ' << image.height << "\n65535\n";
  for (std::uint16_t s : image.samples) {
    out.put(static_cast<char>(s >> 8));
    out.put(static_cast<char>(s & 0xFF));
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

GrayImage read_pgm(const std::filesystem::path& path) {
  auto in = open_input(path);
  GrayImage image;
  unsigned maxval = 0;
  read_pnm_header(in, "P5", path, image.width, image.height, maxval);
  if (maxval != 65535) throw Error(ErrorKind::Parse, path.string() + ": expected 16-bit samples");
  image.samples.resize(image.width * image.height);
  for (auto& s : image.samples) {
    const int hi = in.get();
    const int lo = in.get();
    if (!in) throw Error(ErrorKind::Parse, path.string() + ": truncated raster");
    s = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  return image;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
  auto out = open_output(path);
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

RgbImage read_ppm(const std::filesystem::path& path) {
  auto in = open_input(path);
  RgbImage image;
  unsigned maxval = 0;
  read_pnm_header(in, "P6", path, image.width, image.height, maxval);
  if (maxval != 255) throw Error(ErrorKind::Parse, path.string() + ": expected 8-bit samples");
  image.rgb.resize(image.width * image.height * 3);
  in.read(reinterpret_cast<char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
  if (!in) throw Error(ErrorKind::Parse, path.string() + ": truncated raster");
  return image;
}

std::array<std::uint8_t, 3> diverging_color(double value, double center, double span) {
  const double u = span > 0.0 ? std::clamp((value - center) / span, -1.0, 1.0) : 0.0;
  const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - std::abs(u))));
  if (u < 0.0) return {fade, fade, 255};
  return {255, fade, fade};
}

std::string sha256_hex(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Io, "SHA-256 failed for " + path.string());
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < length; ++k) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[k]};
  return hex.str();
}

RunManifest::RunManifest(std::filesystem::path out_dir, std::string command)
    : out_dir_(std::move(out_dir)), command_(std::move(command)) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + out_dir_.string() + ": " + ec.message());
}

void RunManifest::add_artifact(const std::string& file) {
  if (std::find(artifacts_.begin(), artifacts_.end(), file) == artifacts_.end()) artifacts_.push_back(file);
}

void RunManifest::write() const {
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& file : artifacts_) {
    artifacts.push_back({{"file", file},
                         {"bytes", std::filesystem::file_size(out_dir_ / file)},
                         {"sha256", sha256_hex(out_dir_ / file)}});
  }
  const nlohmann::json doc{{"command", command_}, {"config", config_}, {"summary", summary_}, {"artifacts", artifacts}};
  auto out = open_output(out_dir_ / "run.json");
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing run.json");
}

}  // namespace polysart::cli
