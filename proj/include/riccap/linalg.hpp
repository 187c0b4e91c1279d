#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Core>

namespace riccap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// (M + Mᵀ) / 2.
Matrix symmetrize(const Eigen::Ref<const Matrix>& M);

/// Largest absolute entry; 0 for an empty matrix.
double sup_norm(const Eigen::Ref<const Matrix>& M);

/// Eigenvalues of a general square matrix. Empty input gives an empty vector.
ComplexVector eigenvalues(const Eigen::Ref<const Matrix>& M);

/// max |λ| over the spectrum; 0 for the empty matrix.
double spectral_radius(const Eigen::Ref<const Matrix>& M);

/// Smallest eigenvalue of the symmetric part of M; +inf for the empty matrix.
double min_symmetric_eigenvalue(const Eigen::Ref<const Matrix>& M);

bool is_symmetric(const Eigen::Ref<const Matrix>& M, double tol);

/// ln det M for symmetric positive definite M via Cholesky. Throws
/// NumericalError naming `what` if the factorization fails. The empty matrix
/// has log-determinant 0.
double logdet_spd(const Eigen::Ref<const Matrix>& M, std::string_view what = "matrix");

/// Solves X·S = Rhs for X with S symmetric positive definite (right division
/// by a Cholesky factor); throws NumericalError if S is not PD.
Matrix right_divide_spd(const Eigen::Ref<const Matrix>& rhs, const Eigen::Ref<const Matrix>& S,
                        std::string_view what = "denominator");

Matrix block_diag(const Eigen::Ref<const Matrix>& top_left,
                  const Eigen::Ref<const Matrix>& bottom_right);

/// [left | right]; both must have the same number of rows.
Matrix hstack(const Eigen::Ref<const Matrix>& left, const Eigen::Ref<const Matrix>& right);

Vector vstack(const Eigen::Ref<const Vector>& top, const Eigen::Ref<const Vector>& bottom);

}  // namespace riccap
