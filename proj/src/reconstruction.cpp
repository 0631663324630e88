#include "polysart/reconstruction.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "polysart/error.hpp"
#include "polysart/kernels.hpp"

namespace polysart {
namespace {

void require_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected length " +
                                                  std::to_string(expected) + ", got " + std::to_string(actual));
  }
}

std::vector<double> squared_row_norms(const SystemMatrix& a) {
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = kernels::dot(a.row(i).values, a.row(i).values);
  return out;
}

std::vector<double> log_intensity(const Sinogram& p) {
  std::vector<double> out(p.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(p.values[i] > 0.0)) {
      throw Error(ErrorKind::NonPositive, "measured intensity at ray " + std::to_string(i) + " is not positive");
    }
    out[i] = std::log(p.values[i]);
  }
  return out;
}

// x - D A^T M r, with M and D applied as precomputed reciprocal sums.
AttenuationMap weighted_correction(const SystemMatrix& a, const SartWeights& w, std::vector<double> residual,
                                   const AttenuationMap& x) {
  const auto& k = kernels::active();
  k.hadamard(residual.data(), w.inv_row.data(), residual.data(), residual.size());
  std::vector<double> update(a.cols());
  a.apply_transpose(residual, update);
  k.hadamard(update.data(), w.inv_col.data(), update.data(), update.size());
  AttenuationMap next = x;
  k.axpy(-1.0, update.data(), next.values.data(), update.size());
  return next;
}

void row_action(const SystemMatrix::Row& row, double step, std::vector<double>& x) {
  kernels::active().scatter_axpy(-step, row.values.data(), row.columns.data(), x.data(), row.values.size());
}

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged:
      return "converged";
    case RunStatus::Cycled:
      return "cycled";
    case RunStatus::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be at least 1");
  if (!(convergence_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "convergence_tol must be positive");
  if (!(cycle_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "cycle_tol must be positive");
  if (!(cycle_min_separation > 0.0)) throw Error(ErrorKind::InvalidArgument, "cycle_min_separation must be positive");
}

IterationReport run(const Stepper& step, std::size_t unknowns, const SolverConfig& config) {
  config.validate();
  AttenuationMap x{config.initial_estimate.empty() ? std::vector<double>(unknowns, 0.0) : config.initial_estimate};
  require_size(x.values.size(), unknowns, "initial estimate");

  IterationReport report;
  if (config.record_every > 0) report.iterates.push_back(x);

  // history[q] holds the iterate q steps before the current one
  std::deque<AttenuationMap> history;
  history.push_front(x);

  for (std::size_t k = 1; k <= config.max_iterations; ++k) {
    AttenuationMap next = step(x);
    require_size(next.values.size(), unknowns, "stepper output");
    const double update = kernels::max_abs_diff(next.values, x.values);
    report.residual_history.push_back(update);
    report.iterations_run = k;

    const bool last = k == config.max_iterations;
    if (config.record_every > 0 && (k % config.record_every == 0 || last || update < config.convergence_tol)) {
      report.iterates.push_back(next);
    }
    if (!std::isfinite(update)) {
      x = std::move(next);
      break;
    }
    if (update < config.convergence_tol) {
      report.status = RunStatus::Converged;
      x = std::move(next);
      break;
    }

    std::size_t period = 0;
    for (std::size_t p = 2; p <= config.cycle_window && p <= history.size(); ++p) {
      if (kernels::max_abs_diff(next.values, history[p - 1].values) >= config.cycle_tol) continue;
      bool distinct = true;
      for (std::size_t q = 1; q < p && distinct; ++q) {
        distinct = kernels::max_abs_diff(next.values, history[q - 1].values) > config.cycle_min_separation;
      }
      if (distinct) {
        period = p;
        break;
      }
    }

    history.push_front(next);
    if (history.size() > config.cycle_window) history.pop_back();
    x = std::move(next);
    if (period != 0) {
      report.status = RunStatus::Cycled;
      report.cycle_period = period;
      if (config.record_every > 0 && report.iterates.back().values != x.values) report.iterates.push_back(x);
      break;
    }
  }
  report.final_estimate = std::move(x);
  return report;
}

// ---------------------------------------------------------------------------

ArtIteration::ArtIteration(const SystemMatrix& a, Sinogram b)
    : a_(&a), b_(std::move(b)), row_norm_sq_(squared_row_norms(a)) {
  require_size(b_.values.size(), a.rows(), "line-integral data");
}

AttenuationMap ArtIteration::operator()(const AttenuationMap& x, const SubIterateObserver& observer) const {
  require_size(x.values.size(), a_->cols(), "attenuation map");
  AttenuationMap out = x;
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < a_->rows(); ++i) {
    if (row_norm_sq_[i] == 0.0) continue;
    const auto row = a_->row(i);
    const double projection = k.gather_dot(row.values.data(), row.columns.data(), out.values.data(), row.values.size());
    row_action(row, (projection - b_.values[i]) / row_norm_sq_[i], out.values);
    if (observer) observer(i, out);
  }
  return out;
}

SartIteration::SartIteration(const SystemMatrix& a, Sinogram b)
    : a_(&a), b_(std::move(b)), weights_(sart_weights(a)) {
  require_size(b_.values.size(), a.rows(), "line-integral data");
}

AttenuationMap SartIteration::operator()(const AttenuationMap& x) const {
  require_size(x.values.size(), a_->cols(), "attenuation map");
  std::vector<double> residual(a_->rows());
  a_->apply(x.values, residual);
  kernels::active().axpy(-1.0, b_.values.data(), residual.data(), residual.size());
  return weighted_correction(*a_, weights_, std::move(residual), x);
}

PartIteration::PartIteration(const SystemMatrix& a, const LacModel& model, Spectrum spectrum, const Sinogram& p)
    : projector_(a, model, std::move(spectrum)), log_p_(log_intensity(p)), row_norm_sq_(squared_row_norms(a)) {
  require_size(p.values.size(), a.rows(), "intensity data");
}

AttenuationMap PartIteration::operator()(const AttenuationMap& t, const SubIterateObserver& observer) const {
  const auto& a = projector_.system();
  require_size(t.values.size(), a.cols(), "attenuation map");
  AttenuationMap out = t;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (row_norm_sq_[i] == 0.0) continue;
    const double modeled = projector_.project_ray(i, out.values);
    row_action(a.row(i), (-std::log(modeled) + log_p_[i]) / row_norm_sq_[i], out.values);
    if (observer) observer(i, out);
  }
  return out;
}

PsartIteration::PsartIteration(const SystemMatrix& a, const LacModel& model, Spectrum spectrum, const Sinogram& p)
    : projector_(a, model, std::move(spectrum)), log_p_(log_intensity(p)), weights_(sart_weights(a)) {
  require_size(p.values.size(), a.rows(), "intensity data");
}

AttenuationMap PsartIteration::operator()(const AttenuationMap& t) const {
  std::vector<double> residual = projector_.project(t.values);
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = -std::log(residual[i]) + log_p_[i];
  return weighted_correction(projector_.system(), weights_, std::move(residual), t);
}

// ---------------------------------------------------------------------------

AttenuationMap art_sweep(const SystemMatrix& a, const Sinogram& b, const AttenuationMap& x,
                         const SubIterateObserver& observer) {
  return ArtIteration(a, b)(x, observer);
}

AttenuationMap sart_step(const SystemMatrix& a, const Sinogram& b, const AttenuationMap& x) {
  return SartIteration(a, b)(x);
}

AttenuationMap part_sweep(const SystemMatrix& a, const LacModel& model, const Spectrum& spectrum,
                          const Sinogram& p, const AttenuationMap& t, const SubIterateObserver& observer) {
  return PartIteration(a, model, spectrum, p)(t, observer);
}

AttenuationMap psart_step(const SystemMatrix& a, const LacModel& model, const Spectrum& spectrum,
                          const Sinogram& p, const AttenuationMap& t) {
  return PsartIteration(a, model, spectrum, p)(t);
}

}  // namespace polysart
