#include "cli/app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <map>

#include "cli/commands.hpp"
#include "polysart/error.hpp"
#include "polysart/kernels.hpp"
#include "polysart/parallel.hpp"

#ifndef POLYSART_DATA_DIR
#define POLYSART_DATA_DIR "data"
#endif

namespace polysart::cli {
namespace {

using nlohmann::json;

// Reads option values from a JSON object. Top-level keys name global options;
// a nested object supplies the options of the subcommand named by its key.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json doc;
    try {
      input >> doc;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("--config: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("--config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    collect(doc, {}, items);
    return items;
  }

 private:
  static void collect(const json& object, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = object.begin(); it != object.end(); ++it) {
      if (it->is_object()) {
        auto nested = parents;
        nested.push_back(it.key());
        collect(*it, nested, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it->is_array()) {
        for (const auto& v : *it) item.inputs.push_back(scalar(v, it.key()));
      } else {
        item.inputs.push_back(scalar(*it, it.key()));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string scalar(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("--config: key '" + key + "' must be a string, number or boolean");
  }
};

// Effective value of every option of `app`, keyed by long name.
json echo_options(const CLI::App& app) {
  json out = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      out[name] = results.size() == 1 ? json(results.front()) : json(results);
    } else if (!opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

void add_geometry(CLI::App* cmd, GeometryOptions& g) {
  cmd->add_option("--geometry", g.kind, "parallel or two-pixel")->check(CLI::IsMember({"parallel", "two-pixel"}));
  cmd->add_option("--size", g.size, "image size N (0: inferred)");
  cmd->add_option("--views", g.views, "number of views over 180 degrees")->check(CLI::PositiveNumber);
  cmd->add_option("--pixel-pitch", g.pixel_pitch_cm, "pixel pitch in cm (0: 25.6 cm / N)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--detectors", g.detectors, "detector count (0: N)");
  cmd->add_option("--detector-pitch", g.detector_pitch_cm, "detector pitch in cm (0: pixel pitch)")
      ->check(CLI::NonNegativeNumber);
}

void add_window(CLI::App* cmd, WindowOptions& w) {
  cmd->add_option("--window-low", w.low, "PGM window lower bound (default: data minimum)");
  cmd->add_option("--window-high", w.high, "PGM window upper bound (default: data maximum)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic CT reconstruction and convergence analysis", "polysart"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file of option values; command-line flags take precedence");

  GlobalOptions global;
  global.spectrum = (std::filesystem::path(POLYSART_DATA_DIR) / "spectra" / "tungsten_130kvp_11bin.csv").string();
  global.materials = (std::filesystem::path(POLYSART_DATA_DIR) / "materials" / "manifest.txt").string();
  app.add_option("--threads", global.threads, "worker thread cap (0: all cores)");
  app.add_option("--kernels", global.kernels, "vector kernel backend")
      ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));
  app.add_option("--out", global.out, "output directory");
  app.add_option("--seed", global.seed, "seed for every randomized step");
  app.add_option("--spectrum", global.spectrum, "spectrum CSV");
  app.add_option("--materials", global.materials, "material manifest");
  app.add_option("--mono", global.mono_kev, "use a single energy (keV) instead of the spectrum file")
      ->check(CLI::PositiveNumber);

  std::map<std::string, std::function<int(Context&)>> commands;

  PhantomOptions phantom;
  auto* phantom_cmd = app.add_subcommand("phantom", "rasterize the head phantom");
  phantom_cmd->add_option("--size", phantom.size, "image size N")->check(CLI::Range(16, 8192));
  add_window(phantom_cmd, phantom.window);
  commands["phantom"] = [&](Context& ctx) { return cmd_phantom(ctx, phantom); };

  SimulateOptions simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "polyenergetic projection of an attenuation map");
  simulate_cmd->add_option("--image", simulate.image, "attenuation map CSV");
  add_geometry(simulate_cmd, simulate.geometry);
  commands["simulate"] = [&](Context& ctx) { return cmd_simulate(ctx, simulate); };

  ReconstructOptions recon;
  auto* recon_cmd = app.add_subcommand("reconstruct", "run ART, SART, pART or pSART");
  recon_cmd->add_option("--algorithm", recon.algorithm, "art, sart, part or psart")
      ->check(CLI::IsMember({"art", "sart", "part", "psart"}));
  recon_cmd->add_option("--data", recon.data, "sinogram CSV");
  recon_cmd->add_option("--data-kind", recon.data_kind, "intensity or line-integral")
      ->check(CLI::IsMember({"intensity", "line-integral"}));
  add_geometry(recon_cmd, recon.geometry);
  recon_cmd->add_option("--max-iterations", recon.max_iterations)->check(CLI::PositiveNumber);
  recon_cmd->add_option("--tol", recon.tol, "stop when max |update| falls below this")->check(CLI::PositiveNumber);
  recon_cmd->add_option("--cycle-window", recon.cycle_window, "previous iterates searched for a cycle");
  recon_cmd->add_option("--cycle-tol", recon.cycle_tol)->check(CLI::PositiveNumber);
  recon_cmd->add_option("--initial", recon.initial, "initial estimate CSV (default: zeros)");
  recon_cmd->add_option("--reference", recon.reference, "ground-truth CSV for an RMSE report");
  add_window(recon_cmd, recon.window);
  commands["reconstruct"] = [&](Context& ctx) { return cmd_reconstruct(ctx, recon); };

  SpecradOptions specrad;
  auto* specrad_cmd = app.add_subcommand("specrad", "power iteration on T or the pSART Jacobian");
  specrad_cmd->add_option("--operator", specrad.op, "sart-T or psart-JF")->check(CLI::IsMember({"sart-T", "psart-JF"}));
  add_geometry(specrad_cmd, specrad.geometry);
  specrad_cmd->add_option("--image", specrad.image, "solution map CSV (default: head phantom)");
  specrad_cmd->add_option("--t1", specrad.t1, "two-pixel solution, first pixel");
  specrad_cmd->add_option("--t2", specrad.t2, "two-pixel solution, second pixel");
  specrad_cmd->add_option("--tol", specrad.tol)->check(CLI::PositiveNumber);
  specrad_cmd->add_option("--max-iterations", specrad.max_iterations)->check(CLI::PositiveNumber);
  commands["specrad"] = [&](Context& ctx) { return cmd_specrad(ctx, specrad); };

  ConvmapOptions convmap;
  auto* convmap_cmd = app.add_subcommand("convmap", "spectral radius and pSART outcome over a grid of solutions");
  convmap_cmd->add_option("--t1-min", convmap.t1_min);
  convmap_cmd->add_option("--t1-max", convmap.t1_max);
  convmap_cmd->add_option("--t2-min", convmap.t2_min);
  convmap_cmd->add_option("--t2-max", convmap.t2_max);
  convmap_cmd->add_option("--grid", convmap.grid, "nodes per axis")->check(CLI::Range(2, 2000));
  convmap_cmd->add_option("--max-iterations", convmap.max_iterations)->check(CLI::PositiveNumber);
  convmap_cmd->add_option("--tol", convmap.tol)->check(CLI::PositiveNumber);
  commands["convmap"] = [&](Context& ctx) { return cmd_convmap(ctx, convmap); };

  LemmaOptions lemmas;
  auto* lemmas_cmd = app.add_subcommand("verify-lemmas", "check the SART convergence properties on random matrices");
  lemmas_cmd->add_option("--trials", lemmas.trials);
  lemmas_cmd->add_option("--max-n", lemmas.max_n, "largest column count")->check(CLI::Range(1, 8));
  commands["verify-lemmas"] = [&](Context& ctx) { return cmd_verify_lemmas(ctx, lemmas); };

  ReproOptions repro;
  auto* repro_cmd = app.add_subcommand("repro", "regenerate a figure or table");
  repro_cmd->add_option("figure", repro.figure, "fig2, fig4, fig5 or table1")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig4", "fig5", "table1"}));
  repro_cmd->add_option("--size", repro.size, "table1 image size")->check(CLI::Range(16, 4096));
  repro_cmd->add_option("--views", repro.views, "table1 view count")->check(CLI::PositiveNumber);
  repro_cmd->add_option("--grid", repro.grid, "fig5 nodes per axis")->check(CLI::Range(2, 2000));
  commands["repro"] = [&](Context& ctx) { return cmd_repro(ctx, repro); };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  CLI::App* invoked = app.get_subcommands().front();
  try {
    set_thread_count(global.threads);
    kernels::select(kernels::parse_backend(global.kernels));

    Spectrum spectrum = global.mono_kev ? monoenergetic(*global.mono_kev) : normalize(load_spectrum(global.spectrum));
    LacModel model = LacModel::load(global.materials);
    RunManifest manifest(global.out, invoked->get_name());

    json config = echo_options(app);
    config[invoked->get_name()] = echo_options(*invoked);
    config["kernels_selected"] = std::string(kernels::name(kernels::active().backend));
    manifest.set_config(std::move(config));

    Context ctx{global, std::move(spectrum), std::move(model), std::move(manifest), out};
    const int status = commands.at(invoked->get_name())(ctx);
    ctx.manifest.write();
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace polysart::cli
