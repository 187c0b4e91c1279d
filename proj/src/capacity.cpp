#include "riccap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "riccap/errors.hpp"
#include "riccap/lyapunov.hpp"

namespace riccap {
namespace {

// Per-step quantities handed to the visitor of run_recursions.
struct StepValues {
  std::size_t t;
  double logdet_KI;
  double logdet_KIhat;
  double rate_term;  // ½ max(0, logdet_KI − logdet_KIhat)
  double power_term;
};

struct FinalState {
  Matrix Sigma, Pi, P, K_I, K_Ihat;
};

template <typename Visitor>
FinalState run_recursions(const CoefficientSchedule& schedule, const Channel& channel,
                          std::size_t n, const FiniteRateOptions& options, Visitor&& visit) {
  if (n == 0) throw ModelError("finite_n_rate: n must be at least 1");
  if (!schedule.noise_at || !schedule.input_at) {
    throw ModelError("finite_n_rate: schedule has no coefficient generators");
  }

  FinalState state;
  for (std::size_t t = 1; t <= n; ++t) {
    const NoiseModel noise = schedule.noise_at(t);
    const InputModel input = schedule.input_at(t);
    try {
      const AugmentedModel aug = build_augmented(noise, input, channel);
      const SystemQuadruple noise_quad = to_quadruple(noise);
      const SystemQuadruple aug_quad = to_quadruple(aug);

      if (t == 1) {
        state.Sigma = options.Sigma_1.value_or(noise.K_S1);
        if (state.Sigma.rows() != noise.state_dim() || state.Sigma.cols() != noise.state_dim()) {
          throw ModelError("Sigma_1 has wrong dimension");
        }
        require_symmetric_psd(state.Sigma, "Sigma_1");
        state.Pi = options.Pi_1.value_or(block_diag(input.K_Xi1, state.Sigma));
        if (state.Pi.rows() != aug_quad.state_dim() || state.Pi.cols() != aug_quad.state_dim()) {
          throw ModelError("Pi_1 has wrong dimension");
        }
        require_symmetric_psd(state.Pi, "Pi_1");
        state.P = input.K_Xi1;
      }

      const RiccatiRecursion noise_rec(noise_quad);
      const RiccatiRecursion aug_rec(aug_quad);
      state.K_Ihat = noise_rec.innovations_covariance(state.Sigma);
      state.K_I = aug_rec.innovations_covariance(state.Pi);
      const double ld_I = logdet_spd(state.K_I, "K_I");
      const double ld_Ihat = logdet_spd(state.K_Ihat, "K_Ihat");
      const double power =
          (input.Gamma * state.P * input.Gamma.transpose() + input.D * input.K_Z * input.D.transpose())
              .trace();
      visit(StepValues{t, ld_I, ld_Ihat, 0.5 * std::max(0.0, ld_I - ld_Ihat), power});

      if (t < n) {
        state.Sigma = noise_rec.step(state.Sigma);
        state.Pi = aug_rec.step(state.Pi);
        state.P = symmetrize(input.F * state.P * input.F.transpose() +
                             input.G * input.K_Z * input.G.transpose());
      }
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << "at t=" << t << ": " << e.what();
      throw NumericalError(os.str());
    } catch (const ModelError& e) {
      std::ostringstream os;
      os << "at t=" << t << ": " << e.what();
      throw ModelError(os.str());
    }
  }
  return state;
}

CapacityResult finish(const FinalState& state, double rate_sum, double power_sum, std::size_t n) {
  CapacityResult r;
  r.rate_nats = rate_sum / static_cast<double>(n);
  r.power = power_sum / static_cast<double>(n);
  r.Sigma_star = state.Sigma;
  r.Pi_star = state.Pi;
  r.P_star = state.P;
  r.K_I = state.K_I;
  r.K_Ihat = state.K_Ihat;
  return r;
}

}  // namespace

CoefficientSchedule CoefficientSchedule::constant(const NoiseModel& noise, const InputModel& input) {
  CoefficientSchedule s;
  s.noise_at = [noise](std::size_t) { return noise; };
  s.input_at = [input](std::size_t) { return input; };
  s.noise_limit = noise;
  s.input_limit = input;
  return s;
}

CapacityResult finite_n_rate(const CoefficientSchedule& schedule, const Channel& channel,
                             std::size_t n, const FiniteRateOptions& options) {
  double rate_sum = 0.0;
  double power_sum = 0.0;
  std::vector<TraceRow> trace;
  if (options.keep_trace) trace.reserve(n);
  const FinalState state = run_recursions(schedule, channel, n, options, [&](const StepValues& s) {
    rate_sum += s.rate_term;
    power_sum += s.power_term;
    if (options.keep_trace) {
      const double t = static_cast<double>(s.t);
      trace.push_back({s.t, s.logdet_KI, s.logdet_KIhat, rate_sum / t, power_sum / t});
    }
  });
  CapacityResult r = finish(state, rate_sum, power_sum, n);
  r.trace = std::move(trace);
  if (!options.skip_feasibility) {
    r.feasibility = feasibility_report(schedule.noise_limit, schedule.input_limit, channel);
    r.initial_condition_dependent = !r.feasibility->member_of_P_infinity();
  }
  return r;
}

CapacityResult finite_n_rate(const NoiseModel& noise, const InputModel& input,
                             const Channel& channel, std::size_t n,
                             const FiniteRateOptions& options) {
  return finite_n_rate(CoefficientSchedule::constant(noise, input), channel, n, options);
}

NoiseSteadyState noise_steady_state(const NoiseModel& noise, const AsymptoticOptions& options) {
  const SystemQuadruple quad = to_quadruple(noise);
  const auto ns = noise.state_dim();
  NoiseSteadyState out;
  out.sigma = are_solve(quad, options.Sigma_init.value_or(Matrix::Zero(ns, ns)), options.are);
  out.K_Ihat = RiccatiRecursion(quad).innovations_covariance(out.sigma.P_star);
  out.logdet_KIhat = logdet_spd(out.K_Ihat, "K_Ihat");
  return out;
}

CapacityResult asymptotic_rate(const NoiseModel& noise, const NoiseSteadyState& noise_state,
                               const InputModel& input, const Channel& channel,
                               const AsymptoticOptions& options) {
  const AugmentedModel aug = build_augmented(noise, input, channel);
  // Power first: an unstable F is a hard failure.
  const LyapunovSolution lyap = lyap_solve(input.F, input.G, input.K_Z);

  const SystemQuadruple quad = to_quadruple(aug);
  const auto m = quad.state_dim();
  const RiccatiSolution pi = are_solve(quad, options.Pi_init.value_or(Matrix::Zero(m, m)), options.are);

  CapacityResult r;
  r.Sigma_star = noise_state.sigma.P_star;
  r.Pi_star = pi.P_star;
  r.P_star = lyap.P_star;
  r.K_Ihat = noise_state.K_Ihat;
  r.K_I = RiccatiRecursion(quad).innovations_covariance(pi.P_star);
  r.rate_nats = 0.5 * std::max(0.0, logdet_spd(r.K_I, "K_I") - noise_state.logdet_KIhat);
  r.power = (input.Gamma * lyap.P_star * input.Gamma.transpose() +
             input.D * input.K_Z * input.D.transpose())
                .trace();

  auto& d = r.diagnostics;
  d.sigma_iterations = noise_state.sigma.iterations;
  d.sigma_residual = noise_state.sigma.residual;
  d.sigma_closed_loop_radius = noise_state.sigma.spectral_radius;
  d.pi_iterations = pi.iterations;
  d.pi_residual = pi.residual;
  d.pi_closed_loop_radius = pi.spectral_radius;
  d.converged = noise_state.sigma.converged && pi.converged;

  if (!options.skip_feasibility) {
    r.feasibility = feasibility_report(noise, input, channel, options.pbh);
    r.initial_condition_dependent = !r.feasibility->member_of_P_infinity();
  }
  return r;
}

CapacityResult asymptotic_rate(const NoiseModel& noise, const InputModel& input,
                               const Channel& channel, const AsymptoticOptions& options) {
  require_ok(validate(noise, input, channel), "asymptotic_rate");
  // Checked before the noise solve so that the failure names F.
  if (spectral_radius(input.F) > kLyapunovStabilityBound) {
    (void)lyap_solve(input.F, input.G, input.K_Z);
  }
  return asymptotic_rate(noise, noise_steady_state(noise, options), input, channel, options);
}

double asymptotic_power(const InputModel& input) {
  require_ok(validate(input), "asymptotic_power");
  const LyapunovSolution lyap = lyap_solve(input.F, input.G, input.K_Z);
  return (input.Gamma * lyap.P_star * input.Gamma.transpose() +
          input.D * input.K_Z * input.D.transpose())
      .trace();
}

std::vector<Case2Point> case2_rate(const CoefficientSchedule& schedule, const Channel& channel,
                                   std::size_t n_max, const FiniteRateOptions& options) {
  if (n_max == 0) throw ModelError("case2_rate: n_max must be at least 1");
  const FeasibilityReport limit_report =
      feasibility_report(schedule.noise_limit, schedule.input_limit, channel);
  if (!limit_report.member_of_P_infinity()) {
    std::string why;
    if (!limit_report.input_F_stable) why += " limit F is not exponentially stable;";
    if (!limit_report.noise_detectable || !limit_report.noise_stabilizable) {
      why += " limit noise pair fails detectability/stabilizability;";
    }
    if (!limit_report.augmented_detectable || !limit_report.augmented_stabilizable) {
      why += " limit augmented pair fails detectability/stabilizability;";
    }
    throw ModelError("case2_rate: schedule limit is not in the admissible set:" + why);
  }
  const double limit_rate =
      asymptotic_rate(schedule.noise_limit, schedule.input_limit, channel).rate_nats;

  std::vector<Case2Point> out;
  std::size_t next_grid = 1;
  double rate_sum = 0.0;
  run_recursions(schedule, channel, n_max, options, [&](const StepValues& s) {
    rate_sum += s.rate_term;
    if (s.t == next_grid || s.t == n_max) {
      const double avg = rate_sum / static_cast<double>(s.t);
      out.push_back({s.t, avg, std::abs(avg - limit_rate)});
      while (next_grid <= s.t) next_grid *= 2;
    }
  });
  return out;
}

}  // namespace riccap
