#include "riccap/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "riccap/errors.hpp"
#include "riccap/lyapunov.hpp"
#include "riccap/parallel.hpp"
#include "riccap/rng.hpp"
#include "riccap/systests.hpp"

namespace riccap {
namespace {

constexpr double kInvalid = -std::numeric_limits<double>::infinity();
constexpr double kSoftRadius = 1.0 - 1e-3;

// Flat parameter vector θ = [F, G, Γ, D, L] (each row-major), K_Z = L Lᵀ.
class Layout {
 public:
  Layout(Eigen::Index nxi, Eigen::Index nz, Eigen::Index nx) : nxi_(nxi), nz_(nz), nx_(nx) {}

  Eigen::Index size() const { return nxi_ * nxi_ + nxi_ * nz_ + nx_ * nxi_ + nx_ * nz_ + nz_ * nz_; }

  InputModel unpack(const Vector& theta) const {
    Eigen::Index at = 0;
    auto take = [&](Eigen::Index r, Eigen::Index c) {
      Matrix M(r, c);
      for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = theta[at++];
      }
      return M;
    };
    Matrix F = take(nxi_, nxi_);
    Matrix G = take(nxi_, nz_);
    Matrix Gamma = take(nx_, nxi_);
    Matrix D = take(nx_, nz_);
    const Matrix L = take(nz_, nz_);
    return InputModel::make(std::move(F), std::move(G), std::move(Gamma), std::move(D),
                            L * L.transpose());
  }

  Vector pack(const InputModel& in) const {
    Vector theta(size());
    Eigen::Index at = 0;
    auto put = [&](const Matrix& M) {
      for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) theta[at++] = M(i, j);
      }
    };
    put(in.F);
    put(in.G);
    put(in.Gamma);
    put(in.D);
    put(psd_sqrt(in.K_Z));
    return theta;
  }

 private:
  Eigen::Index nxi_, nz_, nx_;
};

struct Evaluation {
  double objective = kInvalid;
  double rate = 0.0;
  double power = 0.0;
};

class Objective {
 public:
  Objective(const NoiseModel& noise, const Channel& channel, const NoiseSteadyState& noise_state,
            const Layout& layout, const OptimizerConfig& config)
      : noise_(noise), channel_(channel), noise_state_(noise_state), layout_(layout), config_(config) {}

  /// The candidate with K_Z scaled so that its power does not exceed κ.
  InputModel projected(const Vector& theta, double* power = nullptr, Matrix* P = nullptr) const {
    InputModel in = layout_.unpack(theta);
    const LyapunovSolution lyap = lyap_solve(in.F, in.G, in.K_Z);
    double p = (in.Gamma * lyap.P_star * in.Gamma.transpose() + in.D * in.K_Z * in.D.transpose()).trace();
    double scale = 1.0;
    if (p > channel_.kappa) {
      scale = channel_.kappa > 0.0 ? channel_.kappa / p : 0.0;
      in.K_Z *= scale;
      p = channel_.kappa;
    }
    if (power != nullptr) *power = p;
    if (P != nullptr) *P = scale * lyap.P_star;
    return in;
  }

  Evaluation operator()(const Vector& theta) const {
    Evaluation ev;
    if (!theta.allFinite()) return ev;
    const Matrix F = layout_.unpack(theta).F;
    const double rho_F = spectral_radius(F);
    if (rho_F > 1.0 - config_.stability_margin) return ev;

    InputModel in;
    try {
      in = projected(theta, &ev.power);
    } catch (const NumericalError&) {
      return ev;
    }
    SystemQuadruple quad{block_diag(in.F, noise_.A), block_diag(in.G, noise_.B),
                         hstack(channel_.H * in.Gamma, noise_.C), hstack(channel_.H * in.D, noise_.N),
                         block_diag(in.K_Z, noise_.K_W)};
    const auto m = quad.state_dim();
    try {
      const RiccatiSolution pi = are_solve(quad, Matrix::Zero(m, m), config_.are);
      if (!pi.converged || pi.spectral_radius > 1.0 - config_.stability_margin) return ev;
      const double ld = logdet_spd(RiccatiRecursion(quad).innovations_covariance(pi.P_star));
      ev.rate = 0.5 * std::max(0.0, ld - noise_state_.logdet_KIhat);
    } catch (const NumericalError&) {
      return ev;
    }
    const double excess = std::max(0.0, rho_F - kSoftRadius);
    ev.objective = ev.rate - config_.penalty_weight * excess * excess;
    return ev;
  }

 private:
  const NoiseModel& noise_;
  const Channel& channel_;
  const NoiseSteadyState& noise_state_;
  const Layout& layout_;
  const OptimizerConfig& config_;
};

struct LocalResult {
  Vector theta;
  double objective = kInvalid;
  std::size_t iterations = 0;
};

Vector fd_gradient(const Objective& f, const Vector& x, double fx, double h0) {
  Vector g = Vector::Zero(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = h0 * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = f(probe).objective;
    probe[i] = x[i] - h;
    const double down = f(probe).objective;
    probe[i] = x[i];
    const bool up_ok = std::isfinite(up), down_ok = std::isfinite(down);
    if (up_ok && down_ok) {
      g[i] = (up - down) / (2.0 * h);
    } else if (up_ok) {
      g[i] = (up - fx) / h;
    } else if (down_ok) {
      g[i] = (fx - down) / h;
    }
  }
  return g;
}

// BFGS ascent with Armijo backtracking on the maximization objective.
LocalResult bfgs_ascent(const Objective& f, Vector x, const OptimizerConfig& config) {
  LocalResult out;
  double fx = f(x).objective;
  if (!std::isfinite(fx)) {
    out.theta = std::move(x);
    return out;
  }
  const Eigen::Index n = x.size();
  Vector g = fd_gradient(f, x, fx, config.fd_step);
  Matrix Hinv = Matrix::Identity(n, n);
  bool fresh = true;
  std::size_t stalls = 0;

  std::size_t it = 0;
  for (; it < config.max_iterations && n > 0; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < config.gradient_tol) break;
    Vector d = Hinv * g;
    double slope = g.dot(d);
    if (!(slope > 0.0)) {
      Hinv.setIdentity();
      fresh = true;
      d = g;
      slope = g.squaredNorm();
    }
    double step = 1.0;
    Vector x_new;
    double f_new = kInvalid;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      x_new = x + step * d;
      f_new = f(x_new).objective;
      if (std::isfinite(f_new) && f_new >= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) break;
      Hinv.setIdentity();
      fresh = true;
      continue;
    }

    const Vector g_new = fd_gradient(f, x_new, f_new, config.fd_step);
    const Vector s = x_new - x;
    // Curvature pair of φ = −f.
    const Vector y = g - g_new;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (fresh) Hinv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Matrix V = Matrix::Identity(n, n) - rho * s * y.transpose();
      Hinv = V * Hinv * V.transpose() + rho * s * s.transpose();
      fresh = false;
    }
    stalls = (f_new - fx <= 1e-14 * (1.0 + std::abs(fx))) ? stalls + 1 : 0;
    x = x_new;
    fx = f_new;
    g = g_new;
    if (stalls >= 3) break;
  }
  out.theta = std::move(x);
  out.objective = fx;
  out.iterations = it;
  return out;
}

Vector random_start(const Layout& layout, InputDims dims, Eigen::Index nx, std::uint64_t seed,
                    std::size_t index) {
  SplitMix64 engine(substream_seed(seed, index));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.1, 0.9);
  auto randn = [&](Eigen::Index r, Eigen::Index c) {
    Matrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) M(i, j) = normal(engine);
    }
    return M;
  };
  const auto nxi = dims.state_dim, nz = dims.noise_dim;
  Matrix F = randn(nxi, nxi);
  if (const double rho = spectral_radius(F); rho > 0.0) F *= radius(engine) / rho;
  Matrix G = randn(nxi, nz);
  Matrix Gamma = randn(nx, nxi);
  Matrix D = randn(nx, nz);
  const Matrix L = randn(nz, nz);
  return layout.pack(InputModel::make(std::move(F), std::move(G), std::move(Gamma), std::move(D),
                                      L * L.transpose()));
}

InputModel iid_witness(InputDims dims, Eigen::Index nx, double kappa) {
  const auto nxi = dims.state_dim, nz = dims.noise_dim;
  const Eigen::Index k = std::min(nx, nz);
  Matrix D = Matrix::Zero(nx, nz);
  for (Eigen::Index i = 0; i < k; ++i) D(i, i) = 1.0;
  Matrix K_Z = Matrix::Zero(nz, nz);
  for (Eigen::Index i = 0; i < k; ++i) K_Z(i, i) = kappa / static_cast<double>(k);
  return InputModel::make(Matrix::Zero(nxi, nxi), Matrix::Zero(nxi, nz), Matrix::Zero(nx, nxi),
                          std::move(D), std::move(K_Z));
}

}  // namespace

OptimizeOutcome optimize_input(const NoiseModel& noise, const Channel& channel, InputDims dims,
                               const OptimizerConfig& config) {
  require_ok(validate(noise), "optimize_input");
  require_ok(validate(channel), "optimize_input");
  if (dims.state_dim < 0 || dims.noise_dim < 0) throw ModelError("optimize_input: negative dimensions");
  if (channel.H.rows() != noise.output_dim()) {
    throw ModelError("optimize_input: H has " + std::to_string(channel.H.rows()) +
                     " rows, noise output dimension is " + std::to_string(noise.output_dim()));
  }
  const Eigen::Index nx = channel.H.cols();
  const Layout layout(dims.state_dim, dims.noise_dim, nx);

  AsymptoticOptions asym;
  asym.are = config.are;
  const NoiseSteadyState noise_state = noise_steady_state(noise, asym);
  const Objective objective(noise, channel, noise_state, layout, config);

  std::vector<Vector> starts;
  starts.push_back(layout.pack(iid_witness(dims, nx, channel.kappa)));
  for (const InputModel& warm : config.warm_starts) {
    if (warm.state_dim() == dims.state_dim && warm.noise_dim() == dims.noise_dim &&
        warm.output_dim() == nx) {
      starts.push_back(layout.pack(warm));
    }
  }
  for (std::size_t i = starts.size(); i < config.starts; ++i) {
    starts.push_back(random_start(layout, dims, nx, config.seed, i));
  }

  std::vector<LocalResult> local(starts.size());
  parallel_for(
      starts.size(), [&](std::size_t i) { local[i] = bfgs_ascent(objective, starts[i], config); },
      config.threads);

  // Verify every candidate with an independent evaluation; keep the best member
  // of the admissible set (lowest start index on ties).
  OptimizeOutcome out;
  double best = kInvalid;
  std::ostringstream diag;
  for (std::size_t i = 0; i < local.size(); ++i) {
    StartSummary summary{i, local[i].objective, local[i].iterations, false};
    if (std::isfinite(local[i].objective)) {
      try {
        double power = 0.0;
        InputModel candidate = objective.projected(local[i].theta, &power);
        CapacityResult res = asymptotic_rate(noise, candidate, channel, asym);
        if (res.power > channel.kappa + 1e-9) {
          candidate.K_Z *= channel.kappa / res.power;
          res = asymptotic_rate(noise, candidate, channel, asym);
        }
        summary.feasible = res.feasibility->member_of_P_infinity() && res.diagnostics.converged &&
                           res.power <= channel.kappa + 1e-9;
        if (summary.feasible && res.rate_nats > best) {
          best = res.rate_nats;
          out.input = std::move(candidate);
          out.result = std::move(res);
          out.best_start = i;
          out.status = OptimizeStatus::kOk;
        }
      } catch (const std::exception& e) {
        diag << "start " << i << ": " << e.what() << "\n";
      }
    }
    out.starts.push_back(summary);
  }
  if (!out.ok()) diag << "feasible set not reached: no start produced an admissible input\n";
  out.diagnostics = diag.str();
  return out;
}

std::vector<SweepPoint> sweep_kappa(const NoiseModel& noise, const Eigen::Ref<const Matrix>& H,
                                    InputDims dims, const std::vector<double>& kappas,
                                    const OptimizerConfig& config) {
  std::vector<SweepPoint> out;
  std::optional<SweepPoint> previous;
  for (double kappa : kappas) {
    OptimizerConfig local = config;
    if (previous && previous->feasible && previous->kappa > 0.0 && kappa > 0.0) {
      InputModel warm = previous->input;
      warm.K_Z *= kappa / previous->kappa;
      local.warm_starts.insert(local.warm_starts.begin(), std::move(warm));
    }
    const OptimizeOutcome res = optimize_input(noise, Channel{H, kappa}, dims, local);
    SweepPoint point;
    point.kappa = kappa;
    point.feasible = res.ok();
    if (res.ok()) {
      point.rate_nats = res.result.rate_nats;
      point.power = res.result.power;
      point.input = res.input;
    }
    out.push_back(point);
    previous = point;
  }
  return out;
}

}  // namespace riccap
