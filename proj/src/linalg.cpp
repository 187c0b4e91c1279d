#include "riccap/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "riccap/errors.hpp"

namespace riccap {

Matrix symmetrize(const Eigen::Ref<const Matrix>& M) {
  return 0.5 * (M + M.transpose());
}

double sup_norm(const Eigen::Ref<const Matrix>& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().maxCoeff();
}

ComplexVector eigenvalues(const Eigen::Ref<const Matrix>& M) {
  if (M.rows() != M.cols()) throw ModelError("eigenvalues: matrix is not square");
  if (M.size() == 0) return ComplexVector(0);
  Eigen::EigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge");
  }
  return solver.eigenvalues();
}

double spectral_radius(const Eigen::Ref<const Matrix>& M) {
  const ComplexVector ev = eigenvalues(M);
  double rho = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rho = std::max(rho, std::abs(ev[i]));
  return rho;
}

double min_symmetric_eigenvalue(const Eigen::Ref<const Matrix>& M) {
  if (M.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(M), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool is_symmetric(const Eigen::Ref<const Matrix>& M, double tol) {
  if (M.rows() != M.cols()) return false;
  return sup_norm(M - M.transpose()) <= tol;
}

double logdet_spd(const Eigen::Ref<const Matrix>& M, std::string_view what) {
  if (M.size() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(symmetrize(M));
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + " is not positive definite");
  }
  const Vector diag = llt.matrixLLT().diagonal();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) acc += std::log(diag[i]);
  return 2.0 * acc;
}

Matrix right_divide_spd(const Eigen::Ref<const Matrix>& rhs, const Eigen::Ref<const Matrix>& S,
                        std::string_view what) {
  Eigen::LLT<Matrix> llt(symmetrize(S));
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + " is not positive definite");
  }
  // X S = R  <=>  S Xᵀ = Rᵀ since S is symmetric.
  return llt.solve(rhs.transpose()).transpose();
}

Matrix block_diag(const Eigen::Ref<const Matrix>& top_left,
                  const Eigen::Ref<const Matrix>& bottom_right) {
  Matrix out = Matrix::Zero(top_left.rows() + bottom_right.rows(),
                            top_left.cols() + bottom_right.cols());
  out.topLeftCorner(top_left.rows(), top_left.cols()) = top_left;
  out.bottomRightCorner(bottom_right.rows(), bottom_right.cols()) = bottom_right;
  return out;
}

Matrix hstack(const Eigen::Ref<const Matrix>& left, const Eigen::Ref<const Matrix>& right) {
  if (left.rows() != right.rows()) throw ModelError("hstack: row counts differ");
  Matrix out(left.rows(), left.cols() + right.cols());
  out.leftCols(left.cols()) = left;
  out.rightCols(right.cols()) = right;
  return out;
}

Vector vstack(const Eigen::Ref<const Vector>& top, const Eigen::Ref<const Vector>& bottom) {
  Vector out(top.size() + bottom.size());
  out.head(top.size()) = top;
  out.tail(bottom.size()) = bottom;
  return out;
}

}  // namespace riccap
