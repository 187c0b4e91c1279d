#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "riccap/capacity.hpp"
#include "riccap/errors.hpp"
#include "riccap/model_io.hpp"
#include "riccap/models.hpp"
#include "riccap/optimize.hpp"
#include "riccap/riccati.hpp"
#include "riccap/simulate.hpp"
#include "riccap/systests.hpp"

namespace riccap::cli {
namespace {

using nlohmann::json;

// Thrown for problems with the command line or the model file contents that
// are not model invariants (e.g. a missing section).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void emit(const json& j, const RunConfig& config, std::ostream& out) {
  Output o(config.out, out);
  *o << j.dump(2) << "\n";
}

double unit_scale(const RunConfig& config) {
  return config.units == "bits" ? 1.0 / std::numbers::ln2 : 1.0;
}

json witnesses_json(const PbhResult& r) {
  json out = json::array();
  for (const PbhWitness& w : r.witnesses) {
    out.push_back({{"eigenvalue", {w.eigenvalue.real(), w.eigenvalue.imag()}},
                   {"rank", w.rank},
                   {"required", w.required},
                   {"passed", w.passed()}});
  }
  return out;
}

json feasibility_json(const FeasibilityReport& f) {
  auto test = [](const PbhResult& r) { return json{{"passed", r.flag}, {"witnesses", witnesses_json(r)}}; };
  return {{"member_of_P_infinity", f.member_of_P_infinity()},
          {"noise_detectable", f.noise_detectable},
          {"noise_stabilizable", f.noise_stabilizable},
          {"augmented_detectable", f.augmented_detectable},
          {"augmented_stabilizable", f.augmented_stabilizable},
          {"input_F_stable", f.input_F_stable},
          {"unit_circle_controllable", f.unit_circle_controllable},
          {"input_F_spectral_radius", f.input_F_spectral_radius},
          {"tests",
           {{"noise_detectability", test(f.noise_detectability)},
            {"noise_stabilizability", test(f.noise_stabilizability)},
            {"augmented_detectability", test(f.augmented_detectability)},
            {"augmented_stabilizability", test(f.augmented_stabilizability)},
            {"noise_unit_circle", test(f.noise_unit_circle)},
            {"augmented_unit_circle", test(f.augmented_unit_circle)}}},
          {"warnings", f.warnings}};
}

json riccati_json(const RiccatiSolution& s) {
  return {{"P_star", matrix_to_json(s.P_star)},
          {"gain", matrix_to_json(s.gain)},
          {"closed_loop", matrix_to_json(s.closed_loop)},
          {"spectral_radius", s.spectral_radius},
          {"stabilizing", s.stabilizing()},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"converged", s.converged}};
}

json capacity_json(const CapacityResult& r, const RunConfig& config) {
  json j{{"rate", r.rate_nats * unit_scale(config)},
         {"units", config.units},
         {"rate_nats", r.rate_nats},
         {"power", r.power},
         {"Sigma_star", matrix_to_json(r.Sigma_star)},
         {"Pi_star", matrix_to_json(r.Pi_star)},
         {"P_star", matrix_to_json(r.P_star)},
         {"K_I", matrix_to_json(r.K_I)},
         {"K_Ihat", matrix_to_json(r.K_Ihat)},
         {"initial_condition_dependent", r.initial_condition_dependent},
         {"diagnostics",
          {{"sigma_iterations", r.diagnostics.sigma_iterations},
           {"pi_iterations", r.diagnostics.pi_iterations},
           {"sigma_residual", r.diagnostics.sigma_residual},
           {"pi_residual", r.diagnostics.pi_residual},
           {"sigma_closed_loop_radius", r.diagnostics.sigma_closed_loop_radius},
           {"pi_closed_loop_radius", r.diagnostics.pi_closed_loop_radius},
           {"converged", r.diagnostics.converged}}}};
  if (r.feasibility) j["feasibility"] = feasibility_json(*r.feasibility);
  return j;
}

json comparison_json(const CovarianceComparison& c) {
  return {{"empirical", matrix_to_json(c.empirical)},
          {"analytic", matrix_to_json(c.analytic)},
          {"max_relative_deviation", c.max_relative_deviation},
          {"max_standard_errors", c.max_standard_errors},
          {"within_tolerance", c.within_tolerance}};
}

struct Models {
  NoiseModel noise;
  InputModel input;
  Channel channel;
};

ModelDocument load(const RunConfig& config) {
  if (config.model_path.empty()) throw ConfigError("--model is required");
  ModelDocument doc = load_model(config.model_path);
  if (doc.channel && !config.kappa.empty()) doc.channel->kappa = config.kappa.front();
  return doc;
}

Models full_models(const ModelDocument& doc, const std::string& command) {
  if (!doc.input) throw ConfigError(command + " needs an input section in the model file");
  if (!doc.channel) throw ConfigError(command + " needs a channel section in the model file");
  require_ok(validate(doc.noise, *doc.input, *doc.channel), command);
  return {doc.noise, *doc.input, *doc.channel};
}

AreOptions are_options(const RunConfig& config) { return {config.tol, config.max_iter}; }

int check_system(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ModelDocument doc = load(config);
  ValidationReport report;
  if (doc.input && doc.channel) {
    report = validate(doc.noise, *doc.input, *doc.channel);
  } else {
    report = validate(doc.noise);
    if (doc.channel) {
      const ValidationReport c = validate(*doc.channel);
      report.violations.insert(report.violations.end(), c.violations.begin(), c.violations.end());
    }
  }
  json violations = json::array();
  for (const Violation& v : report.violations) {
    violations.push_back({{"invariant", v.invariant}, {"quantity", v.quantity}, {"detail", v.detail}});
  }
  json j{{"validation", {{"ok", report.ok()}, {"violations", violations}}}};
  if (!report.ok()) {
    emit(j, config, out);
    err << "error: " << report.summary() << "\n";
    return kConfigError;
  }
  const FeasibilityReport feas = (doc.input && doc.channel)
                                     ? feasibility_report(doc.noise, *doc.input, *doc.channel)
                                     : noise_feasibility(doc.noise);
  j["scope"] = (doc.input && doc.channel) ? "augmented" : "noise";
  j["feasibility"] = feasibility_json(feas);
  emit(j, config, out);
  return kOk;
}

int solve_are(const RunConfig& config, std::ostream& out, std::ostream&) {
  const ModelDocument doc = load(config);
  SystemQuadruple quad;
  if (config.which == "noise") {
    require_ok(validate(doc.noise), "solve-are");
    quad = to_quadruple(doc.noise);
  } else if (config.which == "augmented") {
    const Models m = full_models(doc, "solve-are");
    quad = to_quadruple(build_augmented(m.noise, m.input, m.channel));
  } else {
    throw ConfigError("--which must be noise or augmented");
  }
  const auto m = quad.state_dim();
  const RiccatiSolution s = are_solve(quad, Matrix::Zero(m, m), are_options(config));
  json j = riccati_json(s);
  j["which"] = config.which;
  emit(j, config, out);
  return config.strict && !s.converged ? kNotConverged : kOk;
}

int capacity_n(const RunConfig& config, std::ostream& out, std::ostream&) {
  if (config.n < 1) throw ConfigError("capacity-n needs --n ≥ 1");
  const Models m = full_models(load(config), "capacity-n");
  FiniteRateOptions opts;
  opts.keep_trace = true;
  const CapacityResult r = finite_n_rate(m.noise, m.input, m.channel, config.n, opts);
  json j = capacity_json(r, config);
  j["n"] = config.n;
  emit(j, config, out);
  if (!config.trace_out.empty()) {
    Output o(config.trace_out, out);
    *o << "t,logdet_KI,logdet_KIhat,rate_partial,power_partial\n";
    for (const TraceRow& row : r.trace) {
      *o << row.t << ',' << csv_number(row.logdet_KI) << ',' << csv_number(row.logdet_KIhat) << ','
         << csv_number(row.rate_partial * unit_scale(config)) << ',' << csv_number(row.power_partial)
         << '\n';
    }
  }
  return kOk;
}

int capacity_asym(const RunConfig& config, std::ostream& out, std::ostream&) {
  const Models m = full_models(load(config), "capacity-asym");
  AsymptoticOptions opts;
  opts.are = are_options(config);
  const CapacityResult r = asymptotic_rate(m.noise, m.input, m.channel, opts);
  emit(capacity_json(r, config), config, out);
  return config.strict && !r.diagnostics.converged ? kNotConverged : kOk;
}

OptimizerConfig optimizer_config(const RunConfig& config) {
  if (config.state_dim < 0 || config.noise_dim < 0) {
    throw ConfigError("--state-dim and --noise-dim must be nonnegative");
  }
  OptimizerConfig oc;
  oc.starts = config.starts;
  oc.seed = config.seed;
  oc.are = {config.tol, std::min<std::size_t>(config.max_iter, 200'000)};
  return oc;
}

int optimize(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ModelDocument doc = load(config);
  if (!doc.channel) throw ConfigError("optimize needs a channel section in the model file");
  const InputDims dims{config.state_dim, config.noise_dim};
  const OptimizeOutcome res = optimize_input(doc.noise, *doc.channel, dims, optimizer_config(config));
  json starts = json::array();
  for (const StartSummary& s : res.starts) {
    starts.push_back({{"index", s.index},
                      {"objective", std::isfinite(s.objective) ? json(s.objective) : json(nullptr)},
                      {"iterations", s.iterations},
                      {"feasible", s.feasible}});
  }
  json j{{"status", res.ok() ? "ok" : "feasible set not reached"},
         {"kappa", doc.channel->kappa},
         {"starts", starts},
         {"diagnostics", res.diagnostics}};
  if (res.ok()) {
    j["best_start"] = res.best_start;
    j["input"] = to_json(res.input);
    j["result"] = capacity_json(res.result, config);
  } else {
    err << "error: feasible set not reached\n";
  }
  emit(j, config, out);
  return config.strict && !res.ok() ? kNotConverged : kOk;
}

int sweep(const RunConfig& config, std::ostream& out, std::ostream&) {
  const ModelDocument doc = load(config);
  if (!doc.channel) throw ConfigError("sweep-kappa needs a channel section in the model file");
  const std::vector<double> grid =
      config.kappa.empty() ? std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0} : config.kappa;
  const InputDims dims{config.state_dim, config.noise_dim};
  const auto points = sweep_kappa(doc.noise, doc.channel->H, dims, grid, optimizer_config(config));
  Output o(config.out, out);
  *o << "kappa,rate_nats,power,feasible\n";
  bool all_feasible = true;
  for (const SweepPoint& p : points) {
    *o << csv_number(p.kappa) << ',' << csv_number(p.rate_nats) << ',' << csv_number(p.power) << ','
       << (p.feasible ? "true" : "false") << '\n';
    all_feasible = all_feasible && p.feasible;
  }
  return config.strict && !all_feasible ? kNotConverged : kOk;
}

int simulate(const RunConfig& config, std::ostream& out, std::ostream&) {
  if (config.paths < 1 || config.horizon < 1) throw ConfigError("--paths and --horizon must be ≥ 1");
  const Models m = full_models(load(config), "simulate");
  const TrajectoryBatch batch =
      sample_paths(m.noise, m.input, m.channel, config.horizon, config.paths, config.seed);
  FiniteRateOptions fopts;
  fopts.keep_trace = false;
  const CapacityResult analytic = finite_n_rate(m.noise, m.input, m.channel, batch.horizon, fopts);
  const EmpiricalReport rep = empirical_report(m.noise, m.input, m.channel, batch, analytic);

  json j{{"paths", batch.paths},
         {"horizon", batch.horizon},
         {"requested_horizon", batch.requested_horizon},
         {"saturated", batch.saturated},
         {"seed", batch.master_seed},
         {"t_eval", rep.t_eval},
         {"innovations", comparison_json(rep.innovations)},
         {"noise_innovations", comparison_json(rep.noise_innovations)},
         {"state_error", comparison_json(rep.state_error)},
         {"power",
          {{"empirical", rep.power_empirical},
           {"analytic", rep.power_analytic},
           {"standard_error", rep.power_standard_error},
           {"relative_deviation", rep.power_relative_deviation},
           {"within_tolerance", rep.power_within_tolerance}}},
         {"whiteness",
          {{"standard_errors_by_lag", rep.whiteness_standard_errors},
           {"lag1_covariance", rep.lag1_covariance},
           {"lag1_standard_error", rep.lag1_standard_error},
           {"within_tolerance", rep.whiteness_within_tolerance}}},
         {"all_within_tolerance", rep.all_within_tolerance()}};
  emit(j, config, out);

  if (!config.trace_out.empty()) {
    Output o(config.trace_out, out);
    *o << "path,t";
    for (std::size_t c = 0; c < batch.Y.dim(); ++c) *o << ",y" << c;
    for (std::size_t c = 0; c < batch.I.dim(); ++c) *o << ",i" << c;
    *o << '\n';
    for (std::size_t p = 0; p < batch.paths; ++p) {
      for (std::size_t t = 0; t < batch.horizon; ++t) {
        *o << p << ',' << t + 1;
        for (std::size_t c = 0; c < batch.Y.dim(); ++c) *o << ',' << csv_number(batch.Y.at(t, c, p));
        for (std::size_t c = 0; c < batch.I.dim(); ++c) *o << ',' << csv_number(batch.I.at(t, c, p));
        *o << '\n';
      }
    }
  }
  return kOk;
}

using Handler = int (*)(const RunConfig&, std::ostream&, std::ostream&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"check-system", check_system}, {"solve-are", solve_are}, {"capacity-n", capacity_n},
      {"capacity-asym", capacity_asym}, {"optimize", optimize},   {"sweep-kappa", sweep},
      {"simulate", simulate}};
  return table;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto it = handlers().find(config.subcommand);
  if (it == handlers().end()) {
    err << "error: unknown subcommand '" << config.subcommand << "'\n";
    return kConfigError;
  }
  if (config.units != "nats" && config.units != "bits") {
    err << "error: --units must be nats or bits\n";
    return kConfigError;
  }
  try {
    return it->second(config, out, err);
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
  }
  return kConfigError;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonfeedback capacity of Gaussian channels with state-space noise",
               "riccati-capacity"};
  RunConfig config;
  app.add_option("--model", config.model_path, "JSON model file");
  app.add_option("--n", config.n, "Horizon for capacity-n");
  app.add_option("--tol", config.tol, "Fixed-point tolerance of the Riccati solves");
  app.add_option("--max-iter", config.max_iter, "Iteration cap of the Riccati solves");
  app.add_option("--seed", config.seed, "Master seed (optimize, sweep-kappa, simulate)");
  app.add_option("--starts", config.starts, "Optimizer multi-starts");
  app.add_option("--kappa", config.kappa, "Power budget, or a comma-separated grid for sweep-kappa")
      ->delimiter(',');
  app.add_option("--units", config.units, "Rate units")->check(CLI::IsMember({"nats", "bits"}));
  app.add_option("--out", config.out, "Result file (default: stdout)");
  app.add_option("--trace", config.trace_out, "CSV trace file (capacity-n, simulate)");
  app.add_flag("--strict", config.strict, "Exit 3 when a solver does not converge");
  app.add_option("--which", config.which, "solve-are: noise or augmented")
      ->check(CLI::IsMember({"noise", "augmented"}));
  app.add_option("--state-dim", config.state_dim, "Input state dimension n_xi");
  app.add_option("--noise-dim", config.noise_dim, "Input noise dimension n_z");
  app.add_option("--paths", config.paths, "Monte Carlo paths");
  app.add_option("--horizon", config.horizon, "Monte Carlo horizon");

  const std::vector<std::pair<const char*, const char*>> commands{
      {"check-system", "Validate the models and report feasibility tests"},
      {"solve-are", "Steady-state Riccati solution of the noise or augmented system"},
      {"capacity-n", "Finite-horizon rate with per-step trace"},
      {"capacity-asym", "Asymptotic rate of the given input"},
      {"optimize", "Optimize the input realization"},
      {"sweep-kappa", "Optimized rate over a grid of power budgets"},
      {"simulate", "Monte Carlo check of the analytic quantities"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  config.subcommand = app.get_subcommands().front()->get_name();
  return run(config, out, err);
}

}  // namespace riccap::cli
