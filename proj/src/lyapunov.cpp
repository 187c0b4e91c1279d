#include "riccap/lyapunov.hpp"

#include <sstream>

#include <Eigen/LU>

#include "riccap/errors.hpp"

namespace riccap {
namespace {

void check_dims(const Eigen::Ref<const Matrix>& F, const Eigen::Ref<const Matrix>& G,
                const Eigen::Ref<const Matrix>& K_Z) {
  if (F.rows() != F.cols() || G.rows() != F.rows() || G.cols() != K_Z.rows() ||
      K_Z.rows() != K_Z.cols()) {
    std::ostringstream os;
    os << "Lyapunov dimension mismatch: F " << F.rows() << "x" << F.cols() << ", G " << G.rows()
       << "x" << G.cols() << ", K_Z " << K_Z.rows() << "x" << K_Z.cols();
    throw ModelError(os.str());
  }
}

}  // namespace

Matrix lyap_step(const Eigen::Ref<const Matrix>& F, const Eigen::Ref<const Matrix>& G,
                 const Eigen::Ref<const Matrix>& K_Z, const Eigen::Ref<const Matrix>& P) {
  check_dims(F, G, K_Z);
  if (P.rows() != F.rows() || P.cols() != F.rows()) {
    throw ModelError("Lyapunov dimension mismatch: P does not match F");
  }
  return symmetrize(F * P * F.transpose() + G * K_Z * G.transpose());
}

LyapunovSolution lyap_solve(const Eigen::Ref<const Matrix>& F, const Eigen::Ref<const Matrix>& G,
                            const Eigen::Ref<const Matrix>& K_Z, const LyapunovOptions& options) {
  check_dims(F, G, K_Z);
  const double rho = spectral_radius(F);
  if (rho > kLyapunovStabilityBound) {
    std::ostringstream os;
    os << "F is not exponentially stable (eigenvalue of modulus " << rho << ")";
    throw NotStableError(os.str(), rho);
  }

  const Eigen::Index n = F.rows();
  const Matrix Q = symmetrize(G * K_Z * G.transpose());
  LyapunovSolution sol;
  sol.method = options.force_method.value_or(n <= options.direct_max_dim
                                                 ? LyapunovMethod::kDirectVectorized
                                                 : LyapunovMethod::kFixedPoint);
  if (n == 0) {
    sol.P_star = Matrix(0, 0);
    return sol;
  }

  if (sol.method == LyapunovMethod::kDirectVectorized) {
    // vec(F P Fᵀ) = (F ⊗ F) vec(P) with column-major vec.
    Matrix system = Matrix::Identity(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        system.block(i * n, j * n, n, n) -= F(i, j) * F;
      }
    }
    const Vector rhs = Eigen::Map<const Vector>(Q.data(), n * n);
    const Vector vecP = system.partialPivLu().solve(rhs);
    sol.P_star = symmetrize(Eigen::Map<const Matrix>(vecP.data(), n, n));
  } else {
    Matrix P = Q;
    for (std::size_t it = 0; it < options.max_iter; ++it) {
      Matrix next = symmetrize(F * P * F.transpose() + Q);
      const double diff = sup_norm(next - P);
      P = std::move(next);
      if (diff <= 0.1 * options.tol) break;
    }
    sol.P_star = std::move(P);
  }
  sol.residual = sup_norm(sol.P_star - F * sol.P_star * F.transpose() - Q);
  return sol;
}

}  // namespace riccap
