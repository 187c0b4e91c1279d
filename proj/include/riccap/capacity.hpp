#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "riccap/linalg.hpp"
#include "riccap/models.hpp"
#include "riccap/riccati.hpp"
#include "riccap/systests.hpp"

namespace riccap {

/// One time step of a finite-horizon evaluation. rate_partial and
/// power_partial are running averages over steps 1..t.
struct TraceRow {
  std::size_t t = 0;
  double logdet_KI = 0.0;
  double logdet_KIhat = 0.0;
  double rate_partial = 0.0;
  double power_partial = 0.0;
};

struct SolverDiagnostics {
  std::size_t sigma_iterations = 0;
  std::size_t pi_iterations = 0;
  double sigma_residual = 0.0;
  double pi_residual = 0.0;
  double sigma_closed_loop_radius = 0.0;
  double pi_closed_loop_radius = 0.0;
  bool converged = true;
};

/// Rate (nats per channel use) and power of one input realization. For a
/// finite horizon the matrices are the values at the last step; for the
/// asymptotic characterization they are the steady states.
struct CapacityResult {
  double rate_nats = 0.0;
  double power = 0.0;
  Matrix Sigma_star;
  Matrix Pi_star;
  Matrix P_star;
  Matrix K_I;
  Matrix K_Ihat;
  std::optional<FeasibilityReport> feasibility;
  /// Set when the models are outside the admissible set, so the limit may
  /// depend on the initial covariances.
  bool initial_condition_dependent = false;
  SolverDiagnostics diagnostics;
  std::vector<TraceRow> trace;
};

/// Time-varying coefficients (1-based t) with their declared limits. Matrices
/// are generated on demand so long horizons need no storage.
struct CoefficientSchedule {
  std::function<NoiseModel(std::size_t t)> noise_at;
  std::function<InputModel(std::size_t t)> input_at;
  NoiseModel noise_limit;
  InputModel input_limit;

  static CoefficientSchedule constant(const NoiseModel& noise, const InputModel& input);
};

struct FiniteRateOptions {
  /// Σ_1; defaults to K_S1 of the first noise model.
  std::optional<Matrix> Sigma_1;
  /// Π_1; defaults to blockdiag(K_Xi1, Σ_1).
  std::optional<Matrix> Pi_1;
  bool keep_trace = true;
  /// Skip the feasibility report of the (limit) models.
  bool skip_feasibility = false;
};

/// Runs both Riccati recursions and the Lyapunov recursion for t = 1..n:
///
///   rate  = (1/2n) Σ_t max(0, ln det K_{I_t} − ln det K_{Î_t})
///   power = (1/n)  Σ_t tr(Γ_t P_t Γ_tᵀ + D_t K_{Z_t} D_tᵀ)
///
/// Numerical failures are rethrown as NumericalError naming the step t.
CapacityResult finite_n_rate(const CoefficientSchedule& schedule, const Channel& channel,
                             std::size_t n, const FiniteRateOptions& options = {});
CapacityResult finite_n_rate(const NoiseModel& noise, const InputModel& input,
                             const Channel& channel, std::size_t n,
                             const FiniteRateOptions& options = {});

struct AsymptoticOptions {
  AreOptions are;
  /// Initial iterates of the two fixed-point solves (zero when omitted).
  std::optional<Matrix> Sigma_init;
  std::optional<Matrix> Pi_init;
  PbhOptions pbh;
  bool skip_feasibility = false;
};

/// Steady state of the noise-side recursion; independent of the input, so
/// it can be shared across many input candidates.
struct NoiseSteadyState {
  RiccatiSolution sigma;
  Matrix K_Ihat;
  double logdet_KIhat = 0.0;
};

NoiseSteadyState noise_steady_state(const NoiseModel& noise, const AsymptoticOptions& options = {});

/// rate = ½ max(0, ln det(C̄ Π C̄ᵀ + D̄ K_W̄ D̄ᵀ) − ln det(C Σ Cᵀ + N K_W Nᵀ)),
/// power = tr(Γ P Γᵀ + D K_Z Dᵀ). Throws NotStableError if F is not
/// exponentially stable. Models outside the admissible set are still
/// evaluated and flagged initial_condition_dependent.
CapacityResult asymptotic_rate(const NoiseModel& noise, const InputModel& input,
                               const Channel& channel, const AsymptoticOptions& options = {});

/// Same, reusing a precomputed noise steady state.
CapacityResult asymptotic_rate(const NoiseModel& noise, const NoiseSteadyState& noise_state,
                               const InputModel& input, const Channel& channel,
                               const AsymptoticOptions& options = {});

/// tr(Γ P Γᵀ + D K_Z Dᵀ) with P the Lyapunov steady state.
double asymptotic_power(const InputModel& input);

struct WaterfillingResult {
  double rate_nats = 0.0;
  Vector powers;  // per eigenmode of the whitened channel, descending gain
  Vector gains;
  double water_level = 0.0;
};

/// Memoryless MIMO water-filling: whiten by R^{-1/2}, take the SVD of the
/// whitened channel and bisect on the water level so that Σ p_i = κ.
WaterfillingResult waterfilling_oracle(const Eigen::Ref<const Matrix>& H,
                                       const Eigen::Ref<const Matrix>& R, double kappa);

struct Case2Point {
  std::size_t n = 0;
  double average_rate = 0.0;
  double deviation = 0.0;  // |average_rate − asymptotic rate of the limits|
};

/// Finite-horizon averages on the grid n = 1, 2, 4, …, n_max (n_max always
/// included) against the asymptotic rate of the limit models. Throws
/// ModelError if the limit models are outside the admissible set.
std::vector<Case2Point> case2_rate(const CoefficientSchedule& schedule, const Channel& channel,
                                   std::size_t n_max, const FiniteRateOptions& options = {});

}  // namespace riccap
