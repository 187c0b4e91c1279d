#pragma once

#include <cstddef>
#include <vector>

#include "riccap/linalg.hpp"
#include "riccap/models.hpp"

namespace riccap {

/// Steady state of the generalized Riccati recursion
///
///   P⁺ = A P Aᵀ + B K Bᵀ − (A P Cᵀ + B K Dᵀ)(D K Dᵀ + C P Cᵀ)⁻¹(A P Cᵀ + B K Dᵀ)ᵀ
///
/// together with the filter gain and closed loop it induces.
struct RiccatiSolution {
  Matrix P_star;
  Matrix gain;         // (A P Cᵀ + B K Dᵀ)(D K Dᵀ + C P Cᵀ)⁻¹
  Matrix closed_loop;  // A − gain·C
  double spectral_radius = 0.0;
  double residual = 0.0;  // sup-norm of the ARE defect at P_star
  std::size_t iterations = 0;
  bool converged = false;

  bool stabilizing() const { return spectral_radius < 1.0; }
};

struct AreOptions {
  double tol = 1e-11;
  std::size_t max_iter = 1'000'000;
};

struct GainAndClosedLoop {
  Matrix gain;
  Matrix closed_loop;
};

/// One quadruple with its P-independent products (B K Bᵀ, B K Dᵀ, D K Dᵀ)
/// cached, for callers that step the same recursion many times. Holds a
/// reference: the quadruple must outlive it.
class RiccatiRecursion {
 public:
  explicit RiccatiRecursion(const SystemQuadruple& quad);

  /// Unchecked step; P is trusted to be symmetric PSD.
  Matrix step(const Matrix& P) const;
  GainAndClosedLoop gain(const Matrix& P) const;
  /// C P Cᵀ + D K Dᵀ: the innovations covariance for state covariance P.
  Matrix innovations_covariance(const Matrix& P) const;

 private:
  const SystemQuadruple& q_;
  Matrix BKBt_;
  Matrix BKDt_;
  Matrix DKDt_;
};

/// One step of the recursion, symmetrized. Throws NumericalError if P is not
/// symmetric PSD or the denominator is singular.
Matrix dre_step(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& P);

/// Iterates of the recursion; element 0 is P_1, element t−1 the (t−1)-fold step.
std::vector<Matrix> dre_run(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& P1,
                            std::size_t horizon);

/// Fixed-point iteration of dre_step from `init` until successive iterates
/// differ by at most tol in sup-norm. Exhausting max_iter is not an error: the
/// returned solution carries converged = false and its diagnostics. Whether
/// the solution is stabilizing is reported, not enforced.
RiccatiSolution are_solve(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& init,
                          const AreOptions& options = {});

GainAndClosedLoop gain_and_closed_loop(const SystemQuadruple& quad,
                                       const Eigen::Ref<const Matrix>& P);

/// sup-norm of dre_step(P) − P.
double are_residual(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& P);

/// Throws NumericalError unless P is symmetric with eigenvalues ≥ −1e−10.
void require_symmetric_psd(const Eigen::Ref<const Matrix>& P, const char* what);

}  // namespace riccap
