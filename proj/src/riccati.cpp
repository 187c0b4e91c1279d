#include "riccap/riccati.hpp"

#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "riccap/errors.hpp"

namespace riccap {
RiccatiRecursion::RiccatiRecursion(const SystemQuadruple& q)
    : q_(q),
      BKBt_(q.B * q.K * q.B.transpose()),
      BKDt_(q.B * q.K * q.D.transpose()),
      DKDt_(q.denominator()) {
  if (q.A.rows() != q.A.cols() || q.C.cols() != q.A.rows() || q.B.rows() != q.A.rows() ||
      q.D.rows() != q.C.rows() || q.D.cols() != q.K.rows() || q.B.cols() != q.K.rows()) {
    throw ModelError("system quadruple has inconsistent dimensions");
  }
}

Matrix RiccatiRecursion::step(const Matrix& P) const {
  const Matrix cross = q_.A * P * q_.C.transpose() + BKDt_;
  Eigen::LLT<Matrix> llt(innovations_covariance(P));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Riccati denominator D K D^T + C P C^T is not positive definite");
  }
  // cross·S⁻¹·crossᵀ = Yᵀ Y with Y = L⁻¹ crossᵀ.
  const Matrix Y = llt.matrixL().solve(cross.transpose());
  return symmetrize(q_.A * P * q_.A.transpose() + BKBt_ - Y.transpose() * Y);
}

GainAndClosedLoop RiccatiRecursion::gain(const Matrix& P) const {
  const Matrix cross = q_.A * P * q_.C.transpose() + BKDt_;
  GainAndClosedLoop out;
  out.gain = right_divide_spd(cross, innovations_covariance(P),
                              "Riccati denominator D K D^T + C P C^T");
  out.closed_loop = q_.A - out.gain * q_.C;
  return out;
}

Matrix RiccatiRecursion::innovations_covariance(const Matrix& P) const {
  return symmetrize(DKDt_ + q_.C * P * q_.C.transpose());
}

void require_symmetric_psd(const Eigen::Ref<const Matrix>& P, const char* what) {
  if (P.rows() != P.cols()) throw NumericalError(std::string(what) + " is not square");
  const double scale = std::max(1.0, sup_norm(P));
  if (!is_symmetric(P, 1e-10 * scale)) throw NumericalError(std::string(what) + " is not symmetric");
  if (P.size() > 0 && min_symmetric_eigenvalue(P) < -1e-10 * scale) {
    throw NumericalError(std::string(what) + " is not positive semidefinite");
  }
}

Matrix dre_step(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& P) {
  if (P.rows() != quad.state_dim()) throw ModelError("dre_step: covariance has wrong dimension");
  require_symmetric_psd(P, "Riccati iterate");
  return RiccatiRecursion(quad).step(P);
}

std::vector<Matrix> dre_run(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& P1,
                            std::size_t horizon) {
  if (horizon == 0) throw ModelError("dre_run: horizon must be at least 1");
  if (P1.rows() != quad.state_dim()) throw ModelError("dre_run: covariance has wrong dimension");
  require_symmetric_psd(P1, "initial Riccati covariance");
  const RiccatiRecursion op(quad);
  std::vector<Matrix> out;
  out.reserve(horizon);
  out.emplace_back(P1);
  for (std::size_t t = 1; t < horizon; ++t) out.push_back(op.step(out.back()));
  return out;
}

RiccatiSolution are_solve(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& init,
                          const AreOptions& options) {
  if (!(options.tol > 0.0)) throw ModelError("are_solve: tol must be positive");
  if (init.rows() != quad.state_dim()) throw ModelError("are_solve: init has wrong dimension");
  require_symmetric_psd(init, "initial Riccati covariance");

  const RiccatiRecursion op(quad);
  RiccatiSolution sol;
  Matrix P = symmetrize(init);
  double diff = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < options.max_iter) {
    Matrix next = op.step(P);
    if (!next.allFinite()) {
      diff = std::numeric_limits<double>::infinity();
      break;
    }
    diff = sup_norm(next - P);
    P = std::move(next);
    ++it;
    if (diff <= options.tol) break;
  }
  sol.iterations = it;
  const Matrix after = op.step(P);
  sol.residual = after.allFinite() ? sup_norm(after - P) : std::numeric_limits<double>::infinity();
  sol.converged = diff <= options.tol && sol.residual <= 10.0 * options.tol;

  auto gcl = op.gain(P);
  sol.P_star = std::move(P);
  sol.gain = std::move(gcl.gain);
  sol.closed_loop = std::move(gcl.closed_loop);
  sol.spectral_radius = sol.closed_loop.allFinite() ? spectral_radius(sol.closed_loop)
                                                     : std::numeric_limits<double>::infinity();
  return sol;
}

GainAndClosedLoop gain_and_closed_loop(const SystemQuadruple& quad,
                                       const Eigen::Ref<const Matrix>& P) {
  if (P.rows() != quad.state_dim()) throw ModelError("gain_and_closed_loop: wrong dimension");
  return RiccatiRecursion(quad).gain(P);
}

double are_residual(const SystemQuadruple& quad, const Eigen::Ref<const Matrix>& P) {
  return sup_norm(dre_step(quad, P) - P);
}

}  // namespace riccap
