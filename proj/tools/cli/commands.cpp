#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "polysart/analysis.hpp"
#include "polysart/csv.hpp"
#include "polysart/error.hpp"
#include "polysart/phantoms.hpp"
#include "polysart/reconstruction.hpp"

namespace polysart::cli {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorKind::InvalidArgument, field + ": " + message);
}

std::string fmt(double v) { return csv::format(v); }

SystemMatrix make_system(const GeometryOptions& g, std::size_t inferred_size) {
  if (g.kind == "two-pixel") return SystemMatrix::dense(two_pixel_matrix());
  if (g.kind != "parallel") invalid("--geometry", "expected parallel or two-pixel, got '" + g.kind + "'");
  const std::size_t n = g.size != 0 ? g.size : inferred_size;
  if (n == 0) invalid("--size", "image size is required");
  ParallelBeamGeometry geometry;
  geometry.image_size = n;
  geometry.pixel_pitch_cm = g.pixel_pitch_cm > 0.0 ? g.pixel_pitch_cm : kHeadFieldOfViewCm / static_cast<double>(n);
  geometry.view_count = g.views;
  geometry.detector_count = g.detectors != 0 ? g.detectors : n;
  geometry.detector_pitch_cm = g.detector_pitch_cm > 0.0 ? g.detector_pitch_cm : geometry.pixel_pitch_cm;
  return SystemMatrix::parallel_beam(geometry);
}

Grid image_grid(const SystemMatrix& a, std::vector<double> values) {
  if (const auto& g = a.geometry()) return {g->image_size, g->image_size, std::move(values)};
  return {1, values.size(), std::move(values)};
}

Grid sinogram_grid(const SystemMatrix& a, std::vector<double> values) {
  if (const auto& g = a.geometry()) return {g->view_count, g->detector_count, std::move(values)};
  return {1, values.size(), std::move(values)};
}

std::vector<double> read_vector(const std::string& field, const std::string& path, std::size_t expected,
                                const char* what) {
  if (path.empty()) invalid(field, "a file is required");
  Grid grid = read_grid_csv(path);
  if (grid.values.size() != expected) {
    invalid(field, std::string(what) + " has " + std::to_string(grid.values.size()) + " values, geometry needs " +
                       std::to_string(expected));
  }
  return std::move(grid.values);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sum += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(sum / static_cast<double>(x.size()));
}

struct TrajectoryPoint {
  std::size_t iteration;
  long ray;  // row just applied by a row-action method, -1 for full updates
  double t1;
  double t2;
};

void write_trajectory(Context& ctx, const std::string& file, const std::vector<TrajectoryPoint>& points) {
  std::ofstream out(ctx.manifest.path(file));
  out << "iteration,ray,t1,t2\n";
  for (const auto& p : points) {
    const double row[] = {static_cast<double>(p.iteration), static_cast<double>(p.ray), p.t1, p.t2};
    csv::write_row(out, row, 4);
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing " + file);
  ctx.manifest.add_artifact(file);
}

void write_table(Context& ctx, const std::string& file, const std::string& header,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream out(ctx.manifest.path(file));
  out << header << '\n';
  for (const auto& row : rows) csv::write_row(out, row.data(), row.size());
  if (!out) throw Error(ErrorKind::Io, "failed writing " + file);
  ctx.manifest.add_artifact(file);
}

double status_code(RunStatus s) { return static_cast<double>(static_cast<int>(s)); }

/// Runs one of the four iterations. Data are given both as intensities and
/// post-log line integrals; each algorithm uses the form it is defined on.
IterationReport reconstruct_with(const std::string& algorithm, const SystemMatrix& a, const Context& ctx,
                                 const Sinogram& intensity, const Sinogram& line_integrals,
                                 const SolverConfig& config, std::vector<TrajectoryPoint>* trajectory) {
  std::size_t iteration = 0;
  auto record = [&iteration, trajectory](long ray, const AttenuationMap& x) {
    if (trajectory) trajectory->push_back({iteration, ray, x.values[0], x.values[1]});
  };
  if (trajectory) {
    record(-1, AttenuationMap{config.initial_estimate.empty() ? std::vector<double>(a.cols(), 0.0)
                                                               : config.initial_estimate});
  }
  SubIterateObserver observer;
  if (trajectory) observer = [&record](std::size_t ray, const AttenuationMap& x) { record(static_cast<long>(ray), x); };

  Stepper step;
  if (algorithm == "art") {
    step = [it = ArtIteration(a, line_integrals), &iteration, &observer](const AttenuationMap& x) {
      ++iteration;
      return it(x, observer);
    };
  } else if (algorithm == "part") {
    step = [it = PartIteration(a, ctx.model, ctx.spectrum, intensity), &iteration, &observer](const AttenuationMap& x) {
      ++iteration;
      return it(x, observer);
    };
  } else if (algorithm == "sart") {
    step = [it = SartIteration(a, line_integrals), &iteration, &record](const AttenuationMap& x) {
      ++iteration;
      AttenuationMap next = it(x);
      record(-1, next);
      return next;
    };
  } else if (algorithm == "psart") {
    step = [it = PsartIteration(a, ctx.model, ctx.spectrum, intensity), &iteration, &record](const AttenuationMap& x) {
      ++iteration;
      AttenuationMap next = it(x);
      record(-1, next);
      return next;
    };
  } else {
    invalid("--algorithm", "expected art, sart, part or psart, got '" + algorithm + "'");
  }
  return run(step, a.cols(), config);
}

json report_summary(const IterationReport& r) {
  return {{"status", to_string(r.status)},
          {"cycle_period", r.cycle_period},
          {"iterations", r.iterations_run},
          {"final_update", r.residual_history.empty() ? 0.0 : r.residual_history.back()}};
}

json power_summary(const PowerIterationResult& r) {
  return {{"eigenvalue", r.eigenvalue},
          {"iterations", r.iterations},
          {"final_residual", r.final_residual},
          {"converged", r.converged}};
}

void print_power(std::ostream& out, const std::string& label, const PowerIterationResult& r) {
  out << label << ": eigenvalue " << fmt(r.eigenvalue) << ", iterations " << r.iterations << ", residual "
      << fmt(r.final_residual) << (r.converged ? ", converged" : ", not converged") << '\n';
}

std::vector<double> interior_boundaries(const LacModel& model) {
  const auto lacs = model.reference_lacs();
  if (lacs.size() <= 2) return {};
  return {lacs.begin() + 1, lacs.end() - 1};
}

void write_convergence_map(Context& ctx, const ConvergenceMap& map, const std::string& prefix) {
  const std::size_t g = map.grid_size;
  std::vector<std::vector<double>> rho_rows;
  std::vector<std::vector<double>> outcome_rows;
  double span = 0.0;
  for (std::size_t c = 0; c < g * g; ++c) {
    const double t1 = map.t1[c % g];
    const double t2 = map.t2[c / g];
    rho_rows.push_back({t1, t2, map.spectral_radius[c]});
    outcome_rows.push_back({t1, t2, map.converged(c) ? 1.0 : 0.0, status_code(map.status[c])});
    span = std::max(span, std::abs(map.spectral_radius[c] - 1.0));
  }
  write_table(ctx, prefix + "spectral_radius.csv", "t1,t2,spectral_radius", rho_rows);
  write_table(ctx, prefix + "convergence.csv", "t1,t2,converged,status", outcome_rows);

  // t1 grows to the right, t2 grows upward.
  RgbImage rho_image{g, g, std::vector<std::uint8_t>(g * g * 3)};
  RgbImage outcome_image = rho_image;
  for (std::size_t row = 0; row < g; ++row) {
    const std::size_t i2 = g - 1 - row;
    for (std::size_t i1 = 0; i1 < g; ++i1) {
      const std::size_t cell = i2 * g + i1;
      const auto rho = diverging_color(map.spectral_radius[cell], 1.0, span);
      const auto outcome = diverging_color(map.converged(cell) ? 0.0 : 2.0, 1.0, 1.0);
      std::copy(rho.begin(), rho.end(), rho_image.rgb.begin() + static_cast<long>((row * g + i1) * 3));
      std::copy(outcome.begin(), outcome.end(), outcome_image.rgb.begin() + static_cast<long>((row * g + i1) * 3));
    }
  }
  write_ppm(ctx.manifest.path(prefix + "spectral_radius.ppm"), rho_image);
  ctx.manifest.add_artifact(prefix + "spectral_radius.ppm");
  write_ppm(ctx.manifest.path(prefix + "convergence.ppm"), outcome_image);
  ctx.manifest.add_artifact(prefix + "convergence.ppm");

  const double agreement = map.agreement(0.02);
  const auto boundaries = interior_boundaries(ctx.model);
  const double ratio = discontinuity_ratio(map, boundaries);
  std::size_t converged = 0;
  for (std::size_t c = 0; c < g * g; ++c) converged += map.converged(c) ? 1 : 0;
  ctx.out << "grid " << g << "x" << g << ": " << converged << " cells converged\n"
          << "agreement with rho < 1 where |rho - 1| > 0.02: " << fmt(agreement) << '\n'
          << "boundary jump ratio: " << fmt(ratio) << '\n';
  ctx.manifest.summary()["grid"] = g;
  ctx.manifest.summary()["converged_cells"] = converged;
  ctx.manifest.summary()["agreement"] = agreement;
  ctx.manifest.summary()["discontinuity_ratio"] = ratio;
}

ConvergenceMap compute_map(const Context& ctx, const ConvmapOptions& opt) {
  ConvergenceMapConfig config;
  config.t1_min = opt.t1_min;
  config.t1_max = opt.t1_max;
  config.t2_min = opt.t2_min;
  config.t2_max = opt.t2_max;
  config.grid_size = opt.grid;
  config.solver.max_iterations = opt.max_iterations;
  config.solver.convergence_tol = opt.tol;
  return convergence_map(config, ctx.model, ctx.spectrum);
}

}  // namespace

void Context::grid_csv(const std::string& file, const Grid& grid) {
  write_grid_csv(manifest.path(file), grid);
  manifest.add_artifact(file);
}

void Context::pgm(const std::string& file, const Grid& grid, const WindowOptions& window) {
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  const double low = window.low.value_or(grid.values.empty() ? 0.0 : *lo);
  const double high = window.high.value_or(grid.values.empty() ? 0.0 : *hi);
  write_pgm(manifest.path(file), window_grid(grid, low, high));
  manifest.add_artifact(file);
}

// ---------------------------------------------------------------------------

int cmd_phantom(Context& ctx, const PhantomOptions& opt) {
  const AttenuationMap t = head_phantom(opt.size);
  const Grid grid{opt.size, opt.size, t.values};
  ctx.grid_csv("phantom.csv", grid);
  ctx.pgm("phantom.pgm", grid, opt.window);
  const std::set<double> levels(t.values.begin(), t.values.end());
  const auto [lo, hi] = std::minmax_element(t.values.begin(), t.values.end());
  ctx.out << "head phantom " << opt.size << "x" << opt.size << ", " << levels.size() << " levels in [" << fmt(*lo)
          << ", " << fmt(*hi) << "]\n";
  ctx.manifest.summary() = {{"size", opt.size}, {"levels", levels.size()}, {"min", *lo}, {"max", *hi}};
  return 0;
}

int cmd_simulate(Context& ctx, const SimulateOptions& opt) {
  if (opt.image.empty()) invalid("--image", "an attenuation map CSV is required");
  const Grid image = read_grid_csv(opt.image);
  if (opt.geometry.kind == "parallel" && image.rows != image.cols) {
    invalid("--image", "parallel-beam images must be square, got " + std::to_string(image.rows) + "x" +
                           std::to_string(image.cols));
  }
  const SystemMatrix a = make_system(opt.geometry, image.rows);
  if (image.values.size() != a.cols()) {
    invalid("--image", "has " + std::to_string(image.values.size()) + " pixels, geometry needs " +
                           std::to_string(a.cols()));
  }
  const Sinogram p = poly_project(a, ctx.model, ctx.spectrum, AttenuationMap{image.values});
  const Sinogram b = post_log(p, ctx.spectrum);
  ctx.grid_csv("intensity.csv", sinogram_grid(a, p.values));
  ctx.grid_csv("line_integrals.csv", sinogram_grid(a, b.values));
  ctx.pgm("sinogram.pgm", sinogram_grid(a, b.values), {});
  const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
  ctx.out << "simulated " << a.rows() << " rays over " << a.cols() << " pixels with " << ctx.spectrum.size()
          << " energy bins; intensity in [" << fmt(*lo) << ", " << fmt(*hi) << "]\n";
  ctx.manifest.summary() = {{"rays", a.rows()},
                            {"pixels", a.cols()},
                            {"energy_bins", ctx.spectrum.size()},
                            {"min_intensity", *lo},
                            {"max_intensity", *hi}};
  return 0;
}

int cmd_reconstruct(Context& ctx, const ReconstructOptions& opt) {
  if (opt.algorithm.empty()) invalid("--algorithm", "one of art, sart, part, psart is required");
  if (opt.data.empty()) invalid("--data", "a sinogram CSV is required");
  const Grid data = read_grid_csv(opt.data);
  const SystemMatrix a = make_system(opt.geometry, data.cols);
  if (data.values.size() != a.rows()) {
    invalid("--data", "has " + std::to_string(data.values.size()) + " values, geometry has " +
                          std::to_string(a.rows()) + " rays");
  }

  Sinogram intensity{{}, SinogramKind::Intensity};
  Sinogram lines{{}, SinogramKind::LineIntegral};
  if (opt.data_kind == "intensity") {
    intensity.values = data.values;
    lines = post_log(intensity, ctx.spectrum);
  } else if (opt.data_kind == "line-integral") {
    lines.values = data.values;
    const double blank = ctx.spectrum.total_weight();
    for (double b : data.values) intensity.values.push_back(blank * std::exp(-b));
  } else {
    invalid("--data-kind", "expected intensity or line-integral, got '" + opt.data_kind + "'");
  }

  SolverConfig config;
  config.max_iterations = opt.max_iterations;
  config.convergence_tol = opt.tol;
  config.cycle_window = opt.cycle_window;
  config.cycle_tol = opt.cycle_tol;
  if (!opt.initial.empty()) config.initial_estimate = read_vector("--initial", opt.initial, a.cols(), "initial estimate");

  std::vector<TrajectoryPoint> trajectory;
  const bool planar = a.cols() == 2;
  const IterationReport report =
      reconstruct_with(opt.algorithm, a, ctx, intensity, lines, config, planar ? &trajectory : nullptr);

  const Grid image = image_grid(a, report.final_estimate.values);
  ctx.grid_csv("image.csv", image);
  ctx.pgm("image.pgm", image, opt.window);
  std::vector<std::vector<double>> residuals;
  for (std::size_t k = 0; k < report.residual_history.size(); ++k) {
    residuals.push_back({static_cast<double>(k + 1), report.residual_history[k]});
  }
  write_table(ctx, "residuals.csv", "iteration,residual", residuals);
  if (planar) write_trajectory(ctx, "trajectory.csv", trajectory);

  json summary = report_summary(report);
  summary["algorithm"] = opt.algorithm;
  ctx.out << opt.algorithm << ": " << to_string(report.status);
  if (report.status == RunStatus::Cycled) ctx.out << " (period " << report.cycle_period << ")";
  ctx.out << " after " << report.iterations_run << " iterations, last update "
          << fmt(report.residual_history.empty() ? 0.0 : report.residual_history.back()) << '\n';
  if (!opt.reference.empty()) {
    const auto truth = read_vector("--reference", opt.reference, a.cols(), "reference image");
    const double error = rmse(report.final_estimate.values, truth);
    summary["rmse"] = error;
    ctx.out << "rmse against reference: " << fmt(error) << '\n';
  }
  ctx.manifest.summary() = summary;
  return 0;
}

int cmd_specrad(Context& ctx, const SpecradOptions& opt) {
  const SystemMatrix a = make_system(opt.geometry, opt.geometry.size);
  std::vector<double> solution;
  if (a.is_dense()) {
    solution = {opt.t1, opt.t2};
  } else if (!opt.image.empty()) {
    solution = read_vector("--image", opt.image, a.cols(), "attenuation map");
  } else {
    solution = head_phantom(a.geometry()->image_size).values;
  }

  const PolyenergeticProjector projector(a, ctx.model, ctx.spectrum);
  std::optional<LinearOperator> op;
  if (opt.op == "sart-T") {
    op = sart_iteration_operator(a);
  } else if (opt.op == "psart-JF") {
    op = iteration_jacobian_operator(projector, solution);
  } else {
    invalid("--operator", "expected sart-T or psart-JF, got '" + opt.op + "'");
  }

  const PowerIterationResult r = power_iteration(*op, opt.tol, opt.max_iterations, ctx.global.seed);
  print_power(ctx.out, opt.op, r);
  json summary = power_summary(r);
  summary["operator"] = opt.op;
  if (op->dimension() <= kMaxSmallEigenDimension) {
    const double oracle = spectral_radius_small(op->to_dense());
    ctx.out << "spectral radius from characteristic polynomial: " << fmt(oracle) << '\n';
    summary["spectral_radius_exact"] = oracle;
  }
  write_table(ctx, "specrad.csv", "eigenvalue,iterations,final_residual,converged",
              {{r.eigenvalue, static_cast<double>(r.iterations), r.final_residual, r.converged ? 1.0 : 0.0}});
  ctx.grid_csv("eigenvector.csv", image_grid(a, r.eigenvector));
  ctx.manifest.summary() = summary;
  return 0;
}

int cmd_convmap(Context& ctx, const ConvmapOptions& opt) {
  write_convergence_map(ctx, compute_map(ctx, opt), "");
  return 0;
}

int cmd_verify_lemmas(Context& ctx, const LemmaOptions& opt) {
  if (opt.max_n < 1 || opt.max_n > kMaxSmallEigenDimension) invalid("--max-n", "must lie in [1, 8]");
  std::mt19937_64 rng(ctx.global.seed);
  std::uniform_real_distribution<double> entry(0.01, 1.0);

  std::vector<DenseMatrix> cases{two_pixel_matrix()};
  for (std::size_t k = 0; k < opt.trials; ++k) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, opt.max_n)(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(n, 2 * n)(rng);
    DenseMatrix a(m, n);
    for (double& v : a.data) v = entry(rng);
    cases.push_back(std::move(a));
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_ok = 0, spectrum_ok = 0, contraction_ok = 0, skipped = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const SartPropertyReport r = verify_sart_properties(cases[k]);
    if (!r.full_rank) ++skipped;
    row_ok += r.row_sums.passed ? 1 : 0;
    spectrum_ok += r.spectrum.passed ? 1 : 0;
    contraction_ok += r.contraction.passed ? 1 : 0;
    rows.push_back({static_cast<double>(k), static_cast<double>(cases[k].rows), static_cast<double>(cases[k].cols),
                    static_cast<double>(r.rank), r.row_sums.measure, r.spectrum.measure, r.contraction.measure,
                    r.all_passed() ? 1.0 : 0.0});
  }
  write_table(ctx, "lemmas.csv",
              "case,rows,cols,rank,row_sum_deviation,max_imag,spectral_radius_T,passed", rows);

  const std::size_t total = cases.size();
  auto line = [&](const char* what, std::size_t ok) {
    ctx.out << (ok == total ? "PASS " : "FAIL ") << what << " (" << ok << "/" << total << ")\n";
  };
  ctx.out << "case 0 is the two-pixel system; " << opt.trials << " random positive matrices follow\n";
  line("row sums of W equal 1", row_ok);
  line("eigenvalues of W real and positive", spectrum_ok);
  line("spectral radius of T below 1", contraction_ok);
  if (skipped) ctx.out << skipped << " case(s) rank deficient; checks skipped\n";
  const bool all = row_ok == total && spectrum_ok == total && contraction_ok == total;
  ctx.manifest.summary() = {{"cases", total},
                            {"row_sums_passed", row_ok},
                            {"spectrum_passed", spectrum_ok},
                            {"contraction_passed", contraction_ok},
                            {"rank_deficient", skipped},
                            {"all_passed", all}};
  return all ? 0 : kExitChecksFailed;
}

// ---------------------------------------------------------------------------

namespace {

int repro_fig2(Context& ctx) {
  const SystemMatrix a = SystemMatrix::dense(two_pixel_matrix());
  const AttenuationMap truth{{0.1, 0.16}};
  const Sinogram b = forward(a, truth);
  Sinogram p{{}, SinogramKind::Intensity};
  for (double v : b.values) p.values.push_back(std::exp(-v));

  json summary;
  for (const std::string algorithm : {"art", "sart"}) {
    std::vector<TrajectoryPoint> trajectory;
    const auto report = reconstruct_with(algorithm, a, ctx, p, b, SolverConfig{}, &trajectory);
    write_trajectory(ctx, "fig2_" + algorithm + "_trajectory.csv", trajectory);
    const auto& x = report.final_estimate.values;
    ctx.out << algorithm << ": " << to_string(report.status) << " after " << report.iterations_run
            << " iterations at (" << fmt(x[0]) << ", " << fmt(x[1]) << ")\n";
    summary[algorithm] = report_summary(report);
    summary[algorithm]["final"] = x;
  }
  const double rho = spectral_radius_2x2(sart_iteration_matrix(a));
  ctx.out << "spectral radius of T: " << fmt(rho) << '\n';
  summary["spectral_radius_T"] = rho;
  ctx.manifest.summary() = summary;
  return 0;
}

int repro_fig4(Context& ctx) {
  const SystemMatrix a = SystemMatrix::dense(two_pixel_matrix());
  const PolyenergeticProjector projector(a, ctx.model, ctx.spectrum);
  const std::vector<std::pair<double, std::string>> cases{{0.16, "0.16"}, {0.24, "0.24"}, {0.203, "0.203"}, {0.204, "0.204"}};

  std::vector<std::vector<double>> rows;
  json summary = json::array();
  for (const auto& [t2, label] : cases) {
    const std::vector<double> truth{0.1, t2};
    const Sinogram p{projector.project(truth), SinogramKind::Intensity};
    const Sinogram b = post_log(p, ctx.spectrum);
    const double rho = spectral_radius_2x2(iteration_jacobian(projector, truth));
    std::vector<double> row{0.1, t2, rho};
    json entry{{"t1", 0.1}, {"t2", t2}, {"spectral_radius_JF", rho}};
    ctx.out << "t* = (0.1, " << label << "): rho(J_F) " << fmt(rho);
    for (const std::string algorithm : {"psart", "part"}) {
      std::vector<TrajectoryPoint> trajectory;
      const auto report = reconstruct_with(algorithm, a, ctx, p, b, SolverConfig{}, &trajectory);
      write_trajectory(ctx, "fig4_" + algorithm + "_t2_" + label + ".csv", trajectory);
      row.insert(row.end(), {status_code(report.status), static_cast<double>(report.cycle_period),
                             static_cast<double>(report.iterations_run)});
      entry[algorithm] = report_summary(report);
      ctx.out << ", " << algorithm << " " << to_string(report.status);
      if (report.status == RunStatus::Cycled) ctx.out << " (period " << report.cycle_period << ")";
    }
    ctx.out << '\n';
    rows.push_back(row);
    summary.push_back(entry);
  }
  write_table(ctx, "fig4_summary.csv",
              "t1,t2,spectral_radius,psart_status,psart_period,psart_iterations,part_status,part_period,part_iterations",
              rows);
  ctx.manifest.summary() = {{"cases", summary}};
  return 0;
}

int repro_table1(Context& ctx, const ReproOptions& opt) {
  GeometryOptions geometry;
  geometry.size = opt.size;
  geometry.views = opt.views;
  const SystemMatrix a = make_system(geometry, opt.size);
  const AttenuationMap solution = head_phantom(opt.size);
  const PolyenergeticProjector projector(a, ctx.model, ctx.spectrum);
  const auto t = power_iteration(sart_iteration_operator(a), 1e-4, 100000, ctx.global.seed);
  const auto jf = power_iteration(iteration_jacobian_operator(projector, solution.values), 1e-4, 100000,
                                  ctx.global.seed);
  print_power(ctx.out, "T", t);
  print_power(ctx.out, "J_F", jf);
  ctx.out << "difference: " << fmt(std::abs(t.eigenvalue - jf.eigenvalue)) << '\n';
  write_table(ctx, "table1.csv", "operator,eigenvalue,iterations,final_residual,converged",
              {{0.0, t.eigenvalue, static_cast<double>(t.iterations), t.final_residual, t.converged ? 1.0 : 0.0},
               {1.0, jf.eigenvalue, static_cast<double>(jf.iterations), jf.final_residual, jf.converged ? 1.0 : 0.0}});
  ctx.manifest.summary() = {{"size", opt.size}, {"views", opt.views}, {"T", power_summary(t)}, {"J_F", power_summary(jf)}};
  return 0;
}

}  // namespace

int cmd_repro(Context& ctx, const ReproOptions& opt) {
  if (opt.figure == "fig2") return repro_fig2(ctx);
  if (opt.figure == "fig4") return repro_fig4(ctx);
  if (opt.figure == "fig5") {
    ConvmapOptions convmap;
    convmap.grid = opt.grid;
    write_convergence_map(ctx, compute_map(ctx, convmap), "fig5_");
    return 0;
  }
  if (opt.figure == "table1") return repro_table1(ctx, opt);
  invalid("figure", "expected fig2, fig4, fig5 or table1, got '" + opt.figure + "'");
}

}  // namespace polysart::cli
