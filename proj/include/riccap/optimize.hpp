#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "riccap/capacity.hpp"
#include "riccap/models.hpp"

namespace riccap {

struct InputDims {
  Eigen::Index state_dim = 1;  // n_ξ
  Eigen::Index noise_dim = 1;  // n_z
};

struct OptimizerConfig {
  std::size_t starts = 32;
  std::uint64_t seed = 0x5eedULL;
  std::size_t max_iterations = 400;  // quasi-Newton iterations per start
  /// Required distance of ρ(F) and of the filter closed loop from 1.
  double stability_margin = 1e-6;
  /// Soft penalty weight on ρ(F) beyond 1 − 1e−3.
  double penalty_weight = 1e3;
  double fd_step = 1e-6;
  double gradient_tol = 1e-9;
  AreOptions are{1e-11, 200'000};
  /// Extra starting points tried before the random ones (e.g. the optimum of
  /// a neighbouring κ).
  std::vector<InputModel> warm_starts;
  unsigned threads = 0;  // 0: worker_count()
};

enum class OptimizeStatus { kOk, kFeasibleSetNotReached };

struct StartSummary {
  std::size_t index = 0;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool feasible = false;
};

struct OptimizeOutcome {
  OptimizeStatus status = OptimizeStatus::kFeasibleSetNotReached;
  InputModel input;
  CapacityResult result;
  std::size_t best_start = 0;
  std::vector<StartSummary> starts;
  std::string diagnostics;

  bool ok() const { return status == OptimizeStatus::kOk; }
};

/// Multi-start local search for the input realization (F, G, Γ, D, K_Z = L Lᵀ)
/// of the given dimensions that maximizes the asymptotic rate under
/// tr(Γ P Γᵀ + D K_Z Dᵀ) ≤ κ. Candidates above the budget are scaled onto it;
/// spectral-radius margins are enforced by a penalty and a hard cut. Each
/// start runs BFGS with central-difference gradients. The returned result is
/// an independent asymptotic_rate call on the returned input, which is a
/// member of the admissible set. Deterministic for a given seed.
OptimizeOutcome optimize_input(const NoiseModel& noise, const Channel& channel, InputDims dims,
                               const OptimizerConfig& config = {});

struct SweepPoint {
  double kappa = 0.0;
  double rate_nats = 0.0;
  double power = 0.0;
  bool feasible = false;
  InputModel input;
};

/// optimize_input over a κ grid, seeding each point with the previous
/// optimum rescaled to the new budget.
std::vector<SweepPoint> sweep_kappa(const NoiseModel& noise, const Eigen::Ref<const Matrix>& H,
                                    InputDims dims, const std::vector<double>& kappas,
                                    const OptimizerConfig& config = {});

}  // namespace riccap
