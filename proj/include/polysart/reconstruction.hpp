#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "polysart/materials.hpp"
#include "polysart/projection.hpp"
#include "polysart/spectra.hpp"

namespace polysart {

enum class RunStatus { Converged, Cycled, MaxIterations };

const char* to_string(RunStatus status);

struct SolverConfig {
  std::size_t max_iterations = 5000;
  double convergence_tol = 1e-10;  // on max |t(k+1) - t(k)|
  std::size_t cycle_window = 8;
  double cycle_tol = 1e-9;
  // Points of a detected cycle must be at least this far apart, so oscillatory
  // convergence is never reported as a cycle.
  double cycle_min_separation = 1e-6;
  std::vector<double> initial_estimate;  // empty: zeros
  std::size_t record_every = 0;          // 0: keep no intermediate iterates

  void validate() const;
};

struct IterationReport {
  std::vector<AttenuationMap> iterates;  // initial estimate first, thinned by record_every
  std::vector<double> residual_history;  // max |update| per iteration
  RunStatus status = RunStatus::MaxIterations;
  std::size_t cycle_period = 0;  // set when status == Cycled
  std::size_t iterations_run = 0;
  AttenuationMap final_estimate;
};

/// One application of an iteration map.
using Stepper = std::function<AttenuationMap(const AttenuationMap&)>;

/// Iterates `step` from the configured start until the update falls below
/// convergence_tol, the newest iterate repeats one of the previous
/// cycle_window iterates (period >= 2) within cycle_tol, or max_iterations is
/// reached. Non-finite iterates end the run with MaxIterations.
IterationReport run(const Stepper& step, std::size_t unknowns, const SolverConfig& config);

/// Called after each row action of a row-action sweep with (row, iterate).
using SubIterateObserver = std::function<void(std::size_t, const AttenuationMap&)>;

// Monoenergetic iterations on post-log data b.

/// One full Kaczmarz sweep over all rows in order; rows with zero norm are skipped.
AttenuationMap art_sweep(const SystemMatrix& a, const Sinogram& b, const AttenuationMap& x,
                         const SubIterateObserver& observer = {});

/// x - D A^T M (A x - b).
AttenuationMap sart_step(const SystemMatrix& a, const Sinogram& b, const AttenuationMap& x);

// Polyenergetic iterations on intensity data p.

AttenuationMap part_sweep(const SystemMatrix& a, const LacModel& model, const Spectrum& spectrum,
                          const Sinogram& p, const AttenuationMap& t, const SubIterateObserver& observer = {});

/// t - D A^T M (-ln P(t) + ln p).
AttenuationMap psart_step(const SystemMatrix& a, const LacModel& model, const Spectrum& spectrum,
                          const Sinogram& p, const AttenuationMap& t);

/// Reusable steppers that precompute weights and tables once.
class ArtIteration {
 public:
  ArtIteration(const SystemMatrix& a, Sinogram b);
  AttenuationMap operator()(const AttenuationMap& x, const SubIterateObserver& observer = {}) const;

 private:
  const SystemMatrix* a_;
  Sinogram b_;
  std::vector<double> row_norm_sq_;
};

class SartIteration {
 public:
  SartIteration(const SystemMatrix& a, Sinogram b);
  AttenuationMap operator()(const AttenuationMap& x) const;

 private:
  const SystemMatrix* a_;
  Sinogram b_;
  SartWeights weights_;
};

class PartIteration {
 public:
  PartIteration(const SystemMatrix& a, const LacModel& model, Spectrum spectrum, const Sinogram& p);
  AttenuationMap operator()(const AttenuationMap& t, const SubIterateObserver& observer = {}) const;

 private:
  PolyenergeticProjector projector_;
  std::vector<double> log_p_;
  std::vector<double> row_norm_sq_;
};

class PsartIteration {
 public:
  PsartIteration(const SystemMatrix& a, const LacModel& model, Spectrum spectrum, const Sinogram& p);
  AttenuationMap operator()(const AttenuationMap& t) const;

  const PolyenergeticProjector& projector() const { return projector_; }

 private:
  PolyenergeticProjector projector_;
  std::vector<double> log_p_;
  SartWeights weights_;
};

}  // namespace polysart
