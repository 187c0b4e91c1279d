#include "riccap/systests.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "riccap/errors.hpp"
#include "riccap/lyapunov.hpp"

namespace riccap {
namespace {

template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& M, double rel_tol) {
  if (M.size() == 0) return 0;
  using Scalar = typename Derived::Scalar;
  Eigen::JacobiSVD<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> svd(M);
  const auto& sv = svd.singularValues();
  const double threshold =
      sv[0] * static_cast<double>(std::max(M.rows(), M.cols())) * rel_tol;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > threshold) ++rank;
  }
  return rank;
}

}  // namespace

Matrix psd_sqrt(const Eigen::Ref<const Matrix>& M) {
  if (M.rows() != M.cols()) throw NumericalError("psd_sqrt: matrix is not square");
  if (M.size() == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(M));
  Vector ev = eig.eigenvalues();
  // Rounding leaves O(eps·‖M‖) eigenvalues on exact null directions; their
  // square roots would be far above any rank tolerance.
  const double floor = 1e-13 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10) throw NumericalError("psd_sqrt: matrix is not PSD");
    ev[i] = ev[i] > floor ? std::sqrt(ev[i]) : 0.0;
  }
  const Matrix& U = eig.eigenvectors();
  return symmetrize(U * ev.asDiagonal() * U.transpose());
}

StarredSystem starred_system(const SystemQuadruple& q) {
  require_valid(q);
  const Matrix KDt = q.K * q.D.transpose();
  // K Dᵀ (D K Dᵀ)⁻¹, shared by both corrections.
  const Matrix KDt_over_den = right_divide_spd(KDt, q.denominator(), "D K D^T");
  StarredSystem s;
  s.A_star = q.A - q.B * KDt_over_den * q.C;
  s.G_mat = q.B;
  s.B_star = symmetrize(q.K - KDt_over_den * KDt.transpose());
  s.B_star_sqrt = psd_sqrt(s.B_star);
  return s;
}

PbhResult pbh_test(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& V,
                   PbhMode mode, const PbhOptions& options) {
  if (!(options.rank_tol > 0.0)) throw ModelError("pbh_test: rank_tol must be positive");
  const Eigen::Index m = A.rows();
  if (A.cols() != m) throw ModelError("pbh_test: A is not square");
  const bool output_side = mode == PbhMode::kDetectable;
  if (output_side ? V.cols() != m : V.rows() != m) {
    throw ModelError("pbh_test: V does not match A");
  }

  PbhResult result;
  const ComplexVector ev = eigenvalues(A);
  const Eigen::MatrixXcd Ac = A.cast<std::complex<double>>();
  const Eigen::MatrixXcd Vc = V.cast<std::complex<double>>();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const std::complex<double> lambda = ev[i];
    const double modulus = std::abs(lambda);
    const bool tested = mode == PbhMode::kUnitCircleControllable
                            ? std::abs(modulus - 1.0) <= options.rank_tol
                            : modulus >= 1.0 - options.rank_tol;
    if (!tested) continue;

    Eigen::MatrixXcd shifted = Ac - lambda * Eigen::MatrixXcd::Identity(m, m);
    Eigen::MatrixXcd stacked;
    if (output_side) {
      stacked.resize(m + Vc.rows(), m);
      stacked.topRows(m) = shifted;
      stacked.bottomRows(Vc.rows()) = Vc;
    } else {
      stacked.resize(m, m + Vc.cols());
      stacked.leftCols(m) = shifted;
      stacked.rightCols(Vc.cols()) = Vc;
    }
    PbhWitness w{lambda, numerical_rank(stacked, options.rank_rel_tol), m};
    result.flag = result.flag && w.passed();
    result.witnesses.push_back(w);
  }
  return result;
}

bool controllable(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& V) {
  const Eigen::Index m = A.rows();
  if (m == 0) return true;
  Matrix reach(m, m * V.cols());
  if (V.cols() == 0) return false;
  reach.leftCols(V.cols()) = V;
  for (Eigen::Index i = 1; i < m; ++i) {
    reach.middleCols(V.cols() * i, V.cols()) = A * reach.middleCols(V.cols() * (i - 1), V.cols());
  }
  return numerical_rank(reach, 1e-12) == m;
}

bool observable(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& C) {
  return controllable(A.transpose(), C.transpose());
}

namespace {

void fill_noise_part(const NoiseModel& noise, const PbhOptions& options, FeasibilityReport& r) {
  const SystemQuadruple q = to_quadruple(noise);
  const StarredSystem star = starred_system(q);
  r.noise_detectability = pbh_test(noise.A, noise.C, PbhMode::kDetectable, options);
  r.noise_stabilizability =
      pbh_test(star.A_star, star.input_matrix(), PbhMode::kStabilizable, options);
  r.noise_unit_circle =
      pbh_test(star.A_star, star.input_matrix(), PbhMode::kUnitCircleControllable, options);
  r.noise_detectable = r.noise_detectability.flag;
  r.noise_stabilizable = r.noise_stabilizability.flag;

  if (noise.state_dim() > 0) {
    if (!controllable(noise.A, noise.B * psd_sqrt(noise.K_W))) {
      r.warnings.emplace_back("noise realization is not controllable (not minimal)");
    }
    if (!observable(noise.A, noise.C)) {
      r.warnings.emplace_back("noise realization is not observable (not minimal)");
    }
  }
}

}  // namespace

FeasibilityReport noise_feasibility(const NoiseModel& noise, const PbhOptions& options) {
  FeasibilityReport r;
  fill_noise_part(noise, options, r);
  r.unit_circle_controllable = r.noise_unit_circle.flag;
  return r;
}

FeasibilityReport feasibility_report(const NoiseModel& noise, const InputModel& input,
                                     const Channel& channel, const PbhOptions& options) {
  const AugmentedModel aug = build_augmented(noise, input, channel);
  FeasibilityReport r;
  fill_noise_part(noise, options, r);

  const SystemQuadruple q = to_quadruple(aug);
  const StarredSystem star = starred_system(q);
  r.augmented_detectability = pbh_test(q.A, q.C, PbhMode::kDetectable, options);
  r.augmented_stabilizability =
      pbh_test(star.A_star, star.input_matrix(), PbhMode::kStabilizable, options);
  r.augmented_unit_circle =
      pbh_test(star.A_star, star.input_matrix(), PbhMode::kUnitCircleControllable, options);
  r.augmented_detectable = r.augmented_detectability.flag;
  r.augmented_stabilizable = r.augmented_stabilizability.flag;

  r.input_F_spectral_radius = spectral_radius(input.F);
  r.input_F_stable = r.input_F_spectral_radius <= kLyapunovStabilityBound;
  r.unit_circle_controllable = r.noise_unit_circle.flag && r.augmented_unit_circle.flag;

  if (input.state_dim() > 0) {
    if (!controllable(input.F, input.G * psd_sqrt(input.K_Z))) {
      r.warnings.emplace_back("input realization is not controllable (not minimal)");
    }
    if (!observable(input.F, input.Gamma)) {
      r.warnings.emplace_back("input realization is not observable (not minimal)");
    }
  }
  return r;
}

}  // namespace riccap
