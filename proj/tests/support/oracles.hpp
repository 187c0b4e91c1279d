#pragma once

// Reference computations that share no code path with the library: they are
// built from Eigen primitives only and used to check library results.

#include <cstddef>

#include <Eigen/Dense>

namespace riccap::oracle {

using Mat = Eigen::MatrixXd;

/// Covariance of (Y_1, …, Y_n) for Θ_{t+1} = A Θ_t + B W_t, Y_t = C Θ_t + D W_t,
/// W_t ~ (0, K) iid, Θ_1 ~ (0, K1), assembled from the explicit linear map
/// (Θ_1, W_1, …, W_n) ↦ Y^n.
Mat joint_output_covariance(const Mat& A, const Mat& B, const Mat& C, const Mat& D, const Mat& K,
                            const Mat& K1, std::size_t n);

/// ln det of a symmetric positive definite matrix via its eigenvalues.
double logdet_eig(const Mat& M);

/// Differential entropy ½ ln((2πe)^k det M) of a k-dimensional Gaussian.
double gaussian_entropy(const Mat& M);

/// Σ_{k<terms} F^k Q (F^k)ᵀ.
Mat lyapunov_series(const Mat& F, const Mat& Q, std::size_t terms);

/// Positive root of the scalar Riccati equation with uncorrelated process
/// and measurement noise: P = a²P + q − a²P²/(P + r).
double scalar_dare_uncorrelated(double a, double q, double r);

/// Per-step map of the B = C = N = K_W = 1 family: Σ⁺ = Σ(a − 1)²/(1 + Σ).
double scalar_family_step(double a, double sigma);

/// Water-filling for parallel channels with gains g (no sorting assumptions):
/// enumerate the number of active modes and keep the consistent level.
double waterfill_parallel(const Eigen::VectorXd& gains, double kappa, Eigen::VectorXd* powers = nullptr);

}  // namespace riccap::oracle
