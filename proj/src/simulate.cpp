#include "riccap/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "riccap/errors.hpp"
#include "riccap/kernels.hpp"
#include "riccap/parallel.hpp"
#include "riccap/rng.hpp"
#include "riccap/riccati.hpp"
#include "riccap/systests.hpp"

namespace riccap {
namespace {

constexpr std::size_t kPathChunk = 4096;

// Row-major copy of a matrix, the layout the kernels take.
std::vector<double> row_major(const Matrix& M) {
  std::vector<double> out(static_cast<std::size_t>(M.size()));
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) out[r * M.cols() + c] = M(r, c);
  }
  return out;
}

// out = M·in (accumulate = false) or out += M·in over all lanes.
void apply(const Matrix& M, const double* in, double* out, std::size_t lanes, bool accumulate) {
  const auto& k = kernels::active();
  if (M.rows() == 0) return;
  if (M.cols() == 0) {
    if (!accumulate) std::fill(out, out + M.rows() * lanes, 0.0);
    return;
  }
  const std::vector<double> m = row_major(M);
  k.gemv(m.data(), M.rows(), M.cols(), in, out, lanes, accumulate);
}

void add_constant_rows(const Vector& mu, double* slab, std::size_t lanes) {
  for (Eigen::Index r = 0; r < mu.size(); ++r) {
    if (mu[r] == 0.0) continue;
    double* row = slab + r * lanes;
    for (std::size_t p = 0; p < lanes; ++p) row[p] += mu[r];
  }
}

// Draws `dims` standard normals per path into per-stream scratch slabs. Each
// path consumes its own stream in the order the dims list is given.
void draw(std::vector<NormalStream>& streams, std::initializer_list<std::pair<std::size_t, double*>> dims,
          std::size_t paths) {
  const std::size_t chunks = (paths + kPathChunk - 1) / kPathChunk;
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t end = std::min(paths, (chunk + 1) * kPathChunk);
    for (std::size_t p = chunk * kPathChunk; p < end; ++p) {
      NormalStream& s = streams[p];
      for (const auto& [dim, slab] : dims) {
        for (std::size_t c = 0; c < dim; ++c) slab[c * paths + p] = s.next();
      }
    }
  });
}

FilterOutput run_filter(const SystemQuadruple& quad, const Vector& mu, const Matrix& P1,
                        const SignalBlock& outputs, const SignalBlock* truth_head,
                        const SignalBlock* truth_tail) {
  const std::size_t horizon = outputs.horizon();
  const std::size_t paths = outputs.paths();
  const std::size_t m = static_cast<std::size_t>(quad.state_dim());
  const std::size_t q = static_cast<std::size_t>(quad.output_dim());
  if (outputs.dim() != q) throw ModelError("filter: output dimension does not match the model");

  FilterOutput out;
  out.innovations = SignalBlock(horizon, q, paths);
  const bool with_errors = truth_head != nullptr;
  if (with_errors) out.state_errors = SignalBlock(horizon, m, paths);
  if (horizon == 0) return out;

  out.covariances = dre_run(quad, P1, horizon);
  const RiccatiRecursion rec(quad);
  const Matrix negC = -quad.C;

  std::vector<double> theta(m * paths, 0.0), next(m * paths, 0.0);
  add_constant_rows(mu, theta.data(), paths);
  for (std::size_t t = 0; t < horizon; ++t) {
    out.innovation_covariances.push_back(rec.innovations_covariance(out.covariances[t]));
    double* innov = out.innovations.slab(t);
    std::copy(outputs.slab(t), outputs.slab(t) + q * paths, innov);
    apply(negC, theta.data(), innov, paths, /*accumulate=*/true);

    if (with_errors) {
      double* err = out.state_errors.slab(t);
      const std::size_t head = truth_head->dim();
      std::copy(truth_head->slab(t), truth_head->slab(t) + head * paths, err);
      std::copy(truth_tail->slab(t), truth_tail->slab(t) + truth_tail->dim() * paths,
                err + head * paths);
      for (std::size_t i = 0; i < m * paths; ++i) err[i] -= theta[i];
    }

    if (t + 1 < horizon) {
      const Matrix gain = rec.gain(out.covariances[t]).gain;
      apply(quad.A, theta.data(), next.data(), paths, /*accumulate=*/false);
      apply(gain, innov, next.data(), paths, /*accumulate=*/true);
      std::swap(theta, next);
    }
  }
  return out;
}

}  // namespace

void SignalBlock::truncate(std::size_t horizon) {
  if (horizon >= horizon_) return;
  horizon_ = horizon;
  data_.resize(horizon * dim_ * paths_);
}

TrajectoryBatch sample_paths(const NoiseModel& noise, const InputModel& input,
                             const Channel& channel, std::size_t horizon, std::size_t paths,
                             std::uint64_t master_seed, const SimulationOptions& options) {
  if (horizon == 0 || paths == 0) throw ModelError("sample_paths: horizon and paths must be >= 1");
  const AugmentedModel aug = build_augmented(noise, input, channel);

  const std::size_t ns = noise.state_dim(), nw = noise.noise_dim(), ny = noise.output_dim();
  const std::size_t nxi = input.state_dim(), nz = input.noise_dim(), nx = input.output_dim();

  TrajectoryBatch b;
  b.paths = paths;
  b.horizon = horizon;
  b.requested_horizon = horizon;
  b.master_seed = master_seed;
  b.S = SignalBlock(horizon, ns, paths);
  b.V = SignalBlock(horizon, ny, paths);
  b.Xi = SignalBlock(horizon, nxi, paths);
  b.X = SignalBlock(horizon, nx, paths);
  b.Y = SignalBlock(horizon, ny, paths);

  const Matrix sqrt_KW = psd_sqrt(noise.K_W);
  const Matrix sqrt_KZ = psd_sqrt(input.K_Z);

  std::vector<NormalStream> streams;
  streams.reserve(paths);
  for (std::size_t p = 0; p < paths; ++p) streams.emplace_back(master_seed, p);

  {
    std::vector<double> eps_s(ns * paths), eps_xi(nxi * paths);
    draw(streams, {{ns, eps_s.data()}, {nxi, eps_xi.data()}}, paths);
    apply(psd_sqrt(noise.K_S1), eps_s.data(), b.S.slab(0), paths, false);
    add_constant_rows(noise.mu_S1, b.S.slab(0), paths);
    apply(psd_sqrt(input.K_Xi1), eps_xi.data(), b.Xi.slab(0), paths, false);
    add_constant_rows(input.mu_Xi1, b.Xi.slab(0), paths);
  }

  std::vector<double> eps_w(nw * paths), eps_z(nz * paths), w(nw * paths), z(nz * paths);
  for (std::size_t t = 0; t < horizon; ++t) {
    draw(streams, {{nw, eps_w.data()}, {nz, eps_z.data()}}, paths);
    apply(sqrt_KW, eps_w.data(), w.data(), paths, false);
    apply(sqrt_KZ, eps_z.data(), z.data(), paths, false);

    double* v = b.V.slab(t);
    apply(noise.C, b.S.slab(t), v, paths, false);
    apply(noise.N, w.data(), v, paths, true);
    double* x = b.X.slab(t);
    apply(input.Gamma, b.Xi.slab(t), x, paths, false);
    apply(input.D, z.data(), x, paths, true);
    double* y = b.Y.slab(t);
    apply(channel.H, x, y, paths, false);
    for (std::size_t i = 0; i < ny * paths; ++i) y[i] += v[i];

    if (t + 1 < horizon) {
      double* s_next = b.S.slab(t + 1);
      apply(noise.A, b.S.slab(t), s_next, paths, false);
      apply(noise.B, w.data(), s_next, paths, true);
      apply(input.F, b.Xi.slab(t), b.Xi.slab(t + 1), paths, false);
      apply(input.G, z.data(), b.Xi.slab(t + 1), paths, true);
      if (kernels::active().max_abs(s_next, ns * paths) > options.overflow_guard) {
        b.saturated = true;
        b.horizon = t + 1;
        break;
      }
    }
  }
  for (SignalBlock* block : {&b.S, &b.V, &b.Xi, &b.X, &b.Y}) block->truncate(b.horizon);

  b.I = kalman_run(aug, b).innovations;
  return b;
}

FilterOutput kalman_run(const AugmentedModel& aug, const TrajectoryBatch& batch) {
  if (batch.Xi.dim() != static_cast<std::size_t>(aug.input_state_dim) ||
      batch.Xi.dim() + batch.S.dim() != static_cast<std::size_t>(aug.bA.rows())) {
    throw ModelError("kalman_run: batch state dimensions do not match the augmented model");
  }
  return run_filter(to_quadruple(aug), aug.mu_Theta1, aug.K_Theta1, batch.Y, &batch.Xi, &batch.S);
}

FilterOutput noise_innovations(const NoiseModel& noise, const TrajectoryBatch& batch) {
  if (batch.S.dim() != static_cast<std::size_t>(noise.state_dim())) {
    throw ModelError("noise_innovations: batch state dimension does not match the noise model");
  }
  const SignalBlock empty;
  return run_filter(to_quadruple(noise), noise.mu_S1, noise.K_S1, batch.V, &empty, &batch.S);
}

namespace {

CovarianceComparison compare_covariance(const SignalBlock& block, std::size_t t,
                                        const Matrix& analytic, double z) {
  const auto& k = kernels::active();
  const std::size_t d = block.dim();
  const std::size_t n = block.paths();
  const double nd = static_cast<double>(n);
  Vector mean(d);
  for (std::size_t i = 0; i < d; ++i) mean[i] = k.sum(block.lane(t, i), n) / nd;

  CovarianceComparison c;
  c.analytic = analytic;
  c.empirical = Matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = (k.dot(block.lane(t, i), block.lane(t, j), n) - nd * mean[i] * mean[j]) /
                       std::max(1.0, nd - 1.0);
      c.empirical(i, j) = c.empirical(j, i) = v;
    }
  }
  const double scale = std::max(sup_norm(analytic), 1e-300);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = std::abs(c.empirical(i, j) - analytic(i, j));
      const double se = std::sqrt((analytic(i, i) * analytic(j, j) + analytic(i, j) * analytic(i, j)) / nd);
      c.max_relative_deviation = std::max(c.max_relative_deviation, diff / scale);
      if (se > 0.0) {
        c.max_standard_errors = std::max(c.max_standard_errors, diff / se);
        if (diff > z * se) c.within_tolerance = false;
      } else if (diff > 1e-12 * std::max(1.0, scale)) {
        c.max_standard_errors = std::numeric_limits<double>::infinity();
        c.within_tolerance = false;
      }
    }
  }
  return c;
}

}  // namespace

EmpiricalReport empirical_report(const NoiseModel& noise, const InputModel& input,
                                 const Channel& channel, const TrajectoryBatch& batch,
                                 const CapacityResult& analytic, const ReportOptions& options) {
  if (batch.horizon == 0) throw ModelError("empirical_report: empty batch");
  const AugmentedModel aug = build_augmented(noise, input, channel);
  const FilterOutput filt = kalman_run(aug, batch);
  const FilterOutput noise_filt = noise_innovations(noise, batch);

  EmpiricalReport r;
  r.paths = batch.paths;
  r.t_eval = std::min(options.t_eval.value_or(batch.horizon - 1), batch.horizon - 1);
  const double z = options.standard_errors;
  r.innovations = compare_covariance(filt.innovations, r.t_eval, filt.innovation_covariances[r.t_eval], z);
  r.noise_innovations = compare_covariance(noise_filt.innovations, r.t_eval,
                                           noise_filt.innovation_covariances[r.t_eval], z);
  r.state_error = compare_covariance(filt.state_errors, r.t_eval, filt.covariances[r.t_eval], z);

  // Per-path average power, then its mean and standard error across paths.
  const auto& k = kernels::active();
  const std::size_t n = batch.paths;
  std::vector<double> per_path(n, 0.0);
  for (std::size_t t = 0; t < batch.horizon; ++t) {
    for (std::size_t c = 0; c < batch.X.dim(); ++c) {
      const double* x = batch.X.lane(t, c);
      for (std::size_t p = 0; p < n; ++p) per_path[p] += x[p] * x[p];
    }
  }
  for (double& v : per_path) v /= static_cast<double>(batch.horizon);
  const double nd = static_cast<double>(n);
  r.power_empirical = k.sum(per_path.data(), n) / nd;
  const double second = k.dot(per_path.data(), per_path.data(), n) / nd;
  r.power_standard_error =
      std::sqrt(std::max(0.0, second - r.power_empirical * r.power_empirical) / std::max(1.0, nd - 1.0));
  r.power_analytic = analytic.power;
  const double power_diff = std::abs(r.power_empirical - r.power_analytic);
  r.power_relative_deviation = r.power_analytic > 0.0 ? power_diff / r.power_analytic : power_diff;
  r.power_within_tolerance = power_diff <= z * r.power_standard_error + 1e-12;

  // Whiteness of the innovations across lags at t_eval.
  const SignalBlock& innov = filt.innovations;
  const std::size_t q = innov.dim();
  auto centered_cross = [&](std::size_t t1, std::size_t i, std::size_t t2, std::size_t j) {
    const double m1 = k.sum(innov.lane(t1, i), n) / nd;
    const double m2 = k.sum(innov.lane(t2, j), n) / nd;
    return (k.dot(innov.lane(t1, i), innov.lane(t2, j), n) - nd * m1 * m2) / std::max(1.0, nd - 1.0);
  };
  for (std::size_t lag = 1; lag <= options.max_lag && lag <= r.t_eval; ++lag) {
    const std::size_t t2 = r.t_eval - lag;
    double worst = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < q; ++j) {
        const double cov = centered_cross(r.t_eval, i, t2, j);
        const double se = std::sqrt(centered_cross(r.t_eval, i, r.t_eval, i) *
                                    centered_cross(t2, j, t2, j) / nd);
        if (lag == 1 && i == 0 && j == 0) {
          r.lag1_covariance = cov;
          r.lag1_standard_error = se;
        }
        if (se > 0.0) worst = std::max(worst, std::abs(cov) / se);
      }
    }
    r.whiteness_standard_errors.push_back(worst);
    if (worst > z) r.whiteness_within_tolerance = false;
  }
  return r;
}

}  // namespace riccap
