#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "cli/io.hpp"
#include "polysart/materials.hpp"
#include "polysart/projection.hpp"
#include "polysart/spectra.hpp"

namespace polysart::cli {

struct GlobalOptions {
  unsigned threads = 0;
  std::string kernels = "auto";
  std::string out = "polysart_out";
  std::uint64_t seed = 1;
  std::string spectrum;
  std::string materials;
  std::optional<double> mono_kev;
};

struct GeometryOptions {
  std::string kind = "parallel";  // parallel | two-pixel
  std::size_t size = 0;           // 0: inferred
  std::size_t views = 120;
  double pixel_pitch_cm = 0.0;  // 0: field of view / size
  std::size_t detectors = 0;    // 0: size
  double detector_pitch_cm = 0.0;  // 0: pixel pitch
};

struct WindowOptions {
  std::optional<double> low;
  std::optional<double> high;
};

struct PhantomOptions {
  std::size_t size = 256;
  WindowOptions window;
};

struct SimulateOptions {
  std::string image;
  GeometryOptions geometry;
};

struct ReconstructOptions {
  std::string algorithm;  // art | sart | part | psart
  std::string data;
  std::string data_kind = "intensity";  // intensity | line-integral
  GeometryOptions geometry;
  std::size_t max_iterations = 5000;
  double tol = 1e-10;
  std::size_t cycle_window = 8;
  double cycle_tol = 1e-9;
  std::string initial;
  std::string reference;
  WindowOptions window;
};

struct SpecradOptions {
  std::string op = "sart-T";  // sart-T | psart-JF
  GeometryOptions geometry{"parallel", 64};
  std::string image;
  double t1 = 0.1;
  double t2 = 0.16;
  double tol = 1e-4;
  std::size_t max_iterations = 100000;
};

struct ConvmapOptions {
  double t1_min = 0.02;
  double t1_max = 0.30;
  double t2_min = 0.02;
  double t2_max = 0.30;
  std::size_t grid = 60;
  std::size_t max_iterations = 5000;
  double tol = 1e-8;
};

struct LemmaOptions {
  std::size_t trials = 100;
  std::size_t max_n = 6;
};

struct ReproOptions {
  std::string figure;  // fig2 | fig4 | fig5 | table1
  std::size_t size = 64;
  std::size_t views = 120;
  std::size_t grid = 60;
};

/// Shared state of one invocation: resolved inputs plus the manifest that
/// collects every artifact.
struct Context {
  GlobalOptions global;
  Spectrum spectrum;
  LacModel model;
  RunManifest manifest;
  std::ostream& out;

  /// Writes a CSV grid under the output directory and records it.
  void grid_csv(const std::string& file, const Grid& grid);
  void pgm(const std::string& file, const Grid& grid, const WindowOptions& window);
};

// Each returns the process exit status; errors are thrown.
int cmd_phantom(Context& ctx, const PhantomOptions& opt);
int cmd_simulate(Context& ctx, const SimulateOptions& opt);
int cmd_reconstruct(Context& ctx, const ReconstructOptions& opt);
int cmd_specrad(Context& ctx, const SpecradOptions& opt);
int cmd_convmap(Context& ctx, const ConvmapOptions& opt);
int cmd_verify_lemmas(Context& ctx, const LemmaOptions& opt);
int cmd_repro(Context& ctx, const ReproOptions& opt);

constexpr int kExitChecksFailed = 2;

}  // namespace polysart::cli
