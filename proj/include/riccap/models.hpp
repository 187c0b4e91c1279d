#pragma once

#include <string>
#include <vector>

#include "riccap/linalg.hpp"

namespace riccap {

/// Partially observed state-space realization of the channel noise:
///
///   S_{t+1} = A S_t + B W_t,   V_t = C S_t + N W_t,
///   W_t ~ G(0, K_W) iid,  S_1 ~ G(mu_S1, K_S1).
///
/// A zero-dimensional state (n_s = 0) describes memoryless noise.
struct NoiseModel {
  Matrix A, B, C, N, K_W;
  Vector mu_S1;
  Matrix K_S1;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index noise_dim() const { return K_W.rows(); }
  Eigen::Index output_dim() const { return N.rows(); }

  /// R = N K_W Nᵀ, the covariance of the direct noise feed.
  Matrix R() const { return N * K_W * N.transpose(); }

  /// Builds a model with zero initial mean and the given initial covariance
  /// (zero when omitted).
  static NoiseModel make(Matrix A, Matrix B, Matrix C, Matrix N, Matrix K_W, Matrix K_S1 = {});
};

/// State-space realization of the channel input:
///
///   Xi_{t+1} = F Xi_t + G Z_t,   X_t = Gamma Xi_t + D Z_t,
///   Z_t ~ G(0, K_Z) iid,  Xi_1 ~ G(mu_Xi1, K_Xi1).
struct InputModel {
  Matrix F, G, Gamma, D, K_Z;
  Vector mu_Xi1;
  Matrix K_Xi1;

  Eigen::Index state_dim() const { return F.rows(); }
  Eigen::Index noise_dim() const { return K_Z.rows(); }
  Eigen::Index output_dim() const { return D.rows(); }

  static InputModel make(Matrix F, Matrix G, Matrix Gamma, Matrix D, Matrix K_Z,
                         Matrix K_Xi1 = {});

  /// X_t = D Z_t with no input state: independent identically distributed input.
  static InputModel iid(Matrix D, Matrix K_Z);
};

/// Y_t = H X_t + V_t with average power budget kappa per channel use.
struct Channel {
  Matrix H;
  double kappa = 0.0;
};

/// Joint realization of Theta_t = (Xi_t, S_t) driven by Wbar_t = (Z_t, W_t):
///
///   Theta_{t+1} = bA Theta_t + bB Wbar_t,   Y_t = bC Theta_t + bD Wbar_t.
struct AugmentedModel {
  Matrix bA, bB, bC, bD, K_Wbar;
  Vector mu_Theta1;
  Matrix K_Theta1;

  Eigen::Index input_state_dim = 0;  // leading block of Theta belongs to Xi
};

/// Generic (A, B, C, D, K) tuple that feeds the Riccati engine.
struct SystemQuadruple {
  Matrix A, B, C, D, K;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index output_dim() const { return C.rows(); }

  /// D K Dᵀ, the part of the Riccati denominator that does not depend on the
  /// state covariance.
  Matrix denominator() const { return D * K * D.transpose(); }
};

struct Violation {
  std::string invariant;  // e.g. "K_W not positive definite"
  std::string quantity;   // offending field name
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  /// All violations joined into one human-readable line.
  std::string summary() const;
};

ValidationReport validate(const NoiseModel& noise);
ValidationReport validate(const InputModel& input);
ValidationReport validate(const Channel& channel);

/// Cross-model dimension checks (H against n_x and n_y) on top of the three
/// individual validations.
ValidationReport validate(const NoiseModel& noise, const InputModel& input, const Channel& channel);

/// Stacks the input and noise realizations into the joint model. The initial
/// covariance of Theta_1 is blockdiag(K_Xi1, K_S1). Throws ModelError on any
/// validation failure or dimension mismatch.
AugmentedModel build_augmented(const NoiseModel& noise, const InputModel& input,
                               const Channel& channel);

/// (A, B, C, N, K_W).
SystemQuadruple to_quadruple(const NoiseModel& noise);
/// (bA, bB, bC, bD, K_Wbar).
SystemQuadruple to_quadruple(const AugmentedModel& augmented);

/// Throws ModelError if D K Dᵀ is not positive definite.
void require_valid(const SystemQuadruple& quad);

/// Throws ModelError carrying the report summary unless it is ok.
void require_ok(const ValidationReport& report, const std::string& context);

}  // namespace riccap
