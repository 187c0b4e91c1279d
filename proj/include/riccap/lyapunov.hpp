#pragma once

#include <cstddef>
#include <optional>

#include "riccap/linalg.hpp"

namespace riccap {

enum class LyapunovMethod { kFixedPoint, kDirectVectorized };

/// Solution of P = F P Fᵀ + G K_Z Gᵀ.
struct LyapunovSolution {
  Matrix P_star;
  double residual = 0.0;
  LyapunovMethod method = LyapunovMethod::kDirectVectorized;
};

struct LyapunovOptions {
  double tol = 1e-12;
  /// Largest n_ξ solved through the n_ξ² × n_ξ² Kronecker system.
  Eigen::Index direct_max_dim = 32;
  /// Forces a method regardless of dimension (used for cross-checking).
  std::optional<LyapunovMethod> force_method;
  std::size_t max_iter = 10'000'000;
};

/// Spectral radius above which F is rejected as not exponentially stable.
inline constexpr double kLyapunovStabilityBound = 1.0 - 1e-9;

/// F P Fᵀ + G K_Z Gᵀ, symmetrized.
Matrix lyap_step(const Eigen::Ref<const Matrix>& F, const Eigen::Ref<const Matrix>& G,
                 const Eigen::Ref<const Matrix>& K_Z, const Eigen::Ref<const Matrix>& P);

/// Unique PSD fixed point of lyap_step. Throws NotStableError if the spectral
/// radius of F exceeds kLyapunovStabilityBound.
LyapunovSolution lyap_solve(const Eigen::Ref<const Matrix>& F, const Eigen::Ref<const Matrix>& G,
                            const Eigen::Ref<const Matrix>& K_Z, const LyapunovOptions& options = {});

}  // namespace riccap
