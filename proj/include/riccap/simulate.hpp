#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "riccap/capacity.hpp"
#include "riccap/linalg.hpp"
#include "riccap/models.hpp"

namespace riccap {

/// One signal over a horizon and a batch of paths, laid out time-major then
/// component then path: entry (t, c, p) lives at ((t·dim + c)·paths + p), so
/// the dim × paths slab of one time step is contiguous and SIMD friendly.
/// Time indices are 0-based (t = 0 is the first channel use).
class SignalBlock {
 public:
  SignalBlock() = default;
  SignalBlock(std::size_t horizon, std::size_t dim, std::size_t paths)
      : horizon_(horizon), dim_(dim), paths_(paths), data_(horizon * dim * paths, 0.0) {}

  std::size_t horizon() const { return horizon_; }
  std::size_t dim() const { return dim_; }
  std::size_t paths() const { return paths_; }

  double& at(std::size_t t, std::size_t c, std::size_t p) { return data_[(t * dim_ + c) * paths_ + p]; }
  double at(std::size_t t, std::size_t c, std::size_t p) const {
    return data_[(t * dim_ + c) * paths_ + p];
  }
  double* slab(std::size_t t) { return data_.data() + t * dim_ * paths_; }
  const double* slab(std::size_t t) const { return data_.data() + t * dim_ * paths_; }
  const double* lane(std::size_t t, std::size_t c) const { return slab(t) + c * paths_; }

  /// Drops every time step at or after `horizon`.
  void truncate(std::size_t horizon);

  bool operator==(const SignalBlock&) const = default;

 private:
  std::size_t horizon_ = 0;
  std::size_t dim_ = 0;
  std::size_t paths_ = 0;
  std::vector<double> data_;
};

struct TrajectoryBatch {
  std::size_t paths = 0;
  std::size_t horizon = 0;  // after any saturation cut
  std::uint64_t master_seed = 0;
  SignalBlock S, V, Xi, X, Y;
  SignalBlock I;  // innovations of Y from the time-varying filter
  /// True if ‖S_t‖ crossed the overflow guard; horizon then ends before it.
  bool saturated = false;
  std::size_t requested_horizon = 0;

  bool operator==(const TrajectoryBatch&) const = default;
};

struct SimulationOptions {
  double overflow_guard = 1e12;
};

/// Draws `paths` independent trajectories. Path p uses its own normal
/// stream seeded from (master_seed, p), drawing S_1, Xi_1 and then (W_t, Z_t)
/// for each t, so the batch does not depend on thread scheduling. Also runs
/// kalman_run to fill the innovations. Throws ModelError on invalid models.
TrajectoryBatch sample_paths(const NoiseModel& noise, const InputModel& input,
                             const Channel& channel, std::size_t horizon, std::size_t paths,
                             std::uint64_t master_seed, const SimulationOptions& options = {});

struct FilterOutput {
  SignalBlock innovations;
  SignalBlock state_errors;  // empty unless the true states were supplied
  std::vector<Matrix> covariances;            // Π_t (or Σ_t) used by the filter
  std::vector<Matrix> innovation_covariances;  // C Π_t Cᵀ + D K Dᵀ
};

/// Time-varying gain filter on the augmented model:
///   I_t = Y_t − C̄ Θ̂_t,  Θ̂_{t+1} = Ā Θ̂_t + F(Π_t) I_t,  Θ̂_1 = mu_Theta1,
/// with Π_t from dre_run started at K_Theta1. Also records Θ_t − Θ̂_t.
FilterOutput kalman_run(const AugmentedModel& augmented, const TrajectoryBatch& batch);

/// Same filter on the noise model alone, producing the innovations of V.
FilterOutput noise_innovations(const NoiseModel& noise, const TrajectoryBatch& batch);

struct CovarianceComparison {
  Matrix empirical;
  Matrix analytic;
  double max_relative_deviation = 0.0;  // sup |emp − ana| / sup |ana|
  double max_standard_errors = 0.0;     // sup |emp − ana| / SE, entrywise
  bool within_tolerance = true;
};

struct EmpiricalReport {
  std::size_t t_eval = 0;  // 0-based time step of the covariance comparisons
  std::size_t paths = 0;
  CovarianceComparison innovations;        // cov(I_t) vs K_{I_t}
  CovarianceComparison noise_innovations;  // cov(Î_t) vs K_{Î_t}
  CovarianceComparison state_error;        // cov(Θ_t − Θ̂_t) vs Π_t

  double power_empirical = 0.0;
  double power_analytic = 0.0;
  double power_standard_error = 0.0;
  double power_relative_deviation = 0.0;
  bool power_within_tolerance = true;

  /// Largest |lag-k correlation| of the innovations at t_eval, k = 1..5, in
  /// units of its standard error.
  std::vector<double> whiteness_standard_errors;
  double lag1_covariance = 0.0;  // cov(I_t, I_{t−1}) of the first component
  double lag1_standard_error = 0.0;
  bool whiteness_within_tolerance = true;

  bool all_within_tolerance() const {
    return innovations.within_tolerance && noise_innovations.within_tolerance &&
           state_error.within_tolerance && power_within_tolerance && whiteness_within_tolerance;
  }
};

struct ReportOptions {
  double standard_errors = 3.0;
  /// Time step of the covariance comparisons; defaults to the last one.
  std::optional<std::size_t> t_eval;
  std::size_t max_lag = 5;
};

/// Empirical statistics of a batch against the analytic quantities of the
/// same models. `analytic.power` is the reference for the per-use power and
/// should come from finite_n_rate with n = batch.horizon.
EmpiricalReport empirical_report(const NoiseModel& noise, const InputModel& input,
                                 const Channel& channel, const TrajectoryBatch& batch,
                                 const CapacityResult& analytic, const ReportOptions& options = {});

}  // namespace riccap
