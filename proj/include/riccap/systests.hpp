#pragma once

#include <complex>
#include <string>
#include <vector>

#include "riccap/linalg.hpp"
#include "riccap/models.hpp"

namespace riccap {

/// Symmetric square root through the eigendecomposition. Eigenvalues in
/// [−1e−10, 0) are clamped to zero; anything more negative throws
/// NumericalError("not PSD").
Matrix psd_sqrt(const Eigen::Ref<const Matrix>& M);

/// The pair used for the stabilizability half of the convergence conditions:
///
///   A* = A − B K Dᵀ (D K Dᵀ)⁻¹ C,   G = B,   B* = K − K Dᵀ (D K Dᵀ)⁻¹ D K.
struct StarredSystem {
  Matrix A_star;
  Matrix B_star;
  Matrix G_mat;
  Matrix B_star_sqrt;

  /// G·B*^{1/2}, the effective noise input of the starred pair.
  Matrix input_matrix() const { return G_mat * B_star_sqrt; }
};

StarredSystem starred_system(const SystemQuadruple& quad);

enum class PbhMode { kDetectable, kStabilizable, kUnitCircleControllable };

struct PbhWitness {
  std::complex<double> eigenvalue;
  Eigen::Index rank = 0;
  Eigen::Index required = 0;
  bool passed() const { return rank == required; }
};

struct PbhResult {
  bool flag = true;
  /// One entry per eigenvalue that fell in the tested region.
  std::vector<PbhWitness> witnesses;
};

struct PbhOptions {
  /// Width of the band around the unit circle.
  double rank_tol = 1e-9;
  /// Singular values below σ_max · max(rows, cols) · rank_rel_tol count as zero.
  double rank_rel_tol = 1e-12;
};

/// Popov-Belevitch-Hautus rank test.
///
/// kDetectable: V is the output matrix (k×m); every eigenvalue with
///   |λ| ≥ 1 − rank_tol must leave [A − λI; V] with rank m.
/// kStabilizable: V is the input matrix (m×k); same region, [A − λI | V].
/// kUnitCircleControllable: like kStabilizable but only for eigenvalues with
///   ||λ| − 1| ≤ rank_tol.
PbhResult pbh_test(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& V, PbhMode mode,
                   const PbhOptions& options = {});

/// Kalman rank test of [V, AV, …, A^{m−1}V].
bool controllable(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& V);
bool observable(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& C);

struct FeasibilityReport {
  bool noise_detectable = false;
  bool noise_stabilizable = false;
  bool augmented_detectable = false;
  bool augmented_stabilizable = false;
  bool input_F_stable = false;
  /// Diagnostic only: both starred pairs are controllable on the unit circle.
  bool unit_circle_controllable = false;

  double input_F_spectral_radius = 0.0;
  PbhResult noise_detectability, noise_stabilizability;
  PbhResult augmented_detectability, augmented_stabilizability;
  PbhResult noise_unit_circle, augmented_unit_circle;
  /// Minimality warnings (uncontrollable or unobservable realizations).
  std::vector<std::string> warnings;

  bool member_of_P_infinity() const {
    return noise_detectable && noise_stabilizable && augmented_detectable &&
           augmented_stabilizable && input_F_stable;
  }
};

/// Noise-only part of the report: {A, C} detectable and {A*, G B*^{1/2}}
/// stabilizable. The augmented and input flags are left false.
FeasibilityReport noise_feasibility(const NoiseModel& noise, const PbhOptions& options = {});

/// Full membership test of the admissible set: both detectability /
/// stabilizability pairs and exponential stability of F. Throws ModelError if
/// the models do not validate.
FeasibilityReport feasibility_report(const NoiseModel& noise, const InputModel& input,
                                     const Channel& channel, const PbhOptions& options = {});

}  // namespace riccap
