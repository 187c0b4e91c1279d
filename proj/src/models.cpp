#include "riccap/models.hpp"

#include <cmath>
#include <sstream>

#include "riccap/errors.hpp"

namespace riccap {
namespace {

constexpr double kPsdFloor = -1e-10;

double symmetry_tol(const Matrix& M) { return 1e-12 * std::max(1.0, sup_norm(M)); }

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void fail(std::string invariant, std::string quantity, std::string detail = {}) {
    report_.violations.push_back({std::move(invariant), std::move(quantity), std::move(detail)});
  }

  bool shape(const Matrix& M, const char* name, Eigen::Index rows, Eigen::Index cols) {
    if (M.rows() == rows && M.cols() == cols) return true;
    std::ostringstream os;
    os << name << " is " << M.rows() << "x" << M.cols() << ", expected " << rows << "x" << cols;
    fail("dimension mismatch", name, os.str());
    return false;
  }

  bool length(const Vector& v, const char* name, Eigen::Index n) {
    if (v.size() == n) return true;
    std::ostringstream os;
    os << name << " has length " << v.size() << ", expected " << n;
    fail("dimension mismatch", name, os.str());
    return false;
  }

  bool finite(const Matrix& M, const char* name) {
    if (M.allFinite()) return true;
    fail(std::string(name) + " has non-finite entries", name);
    return false;
  }

  void covariance(const Matrix& M, const char* name, bool definite) {
    if (!is_symmetric(M, symmetry_tol(M))) {
      fail(std::string(name) + " not symmetric", name);
      return;
    }
    if (M.size() == 0) return;
    const double lo = min_symmetric_eigenvalue(M);
    if (definite ? !(lo > 0.0) : !(lo >= kPsdFloor)) {
      std::ostringstream os;
      os << "smallest eigenvalue " << lo;
      fail(std::string(name) + (definite ? " not positive definite" : " not positive semidefinite"),
           name, os.str());
    }
  }

 private:
  ValidationReport& report_;
};

}  // namespace

NoiseModel NoiseModel::make(Matrix A, Matrix B, Matrix C, Matrix N, Matrix K_W, Matrix K_S1) {
  NoiseModel m;
  const auto ns = A.rows();
  if (K_S1.size() == 0) K_S1 = Matrix::Zero(ns, ns);
  m.A = std::move(A);
  m.B = std::move(B);
  m.C = std::move(C);
  m.N = std::move(N);
  m.K_W = std::move(K_W);
  m.K_S1 = std::move(K_S1);
  m.mu_S1 = Vector::Zero(ns);
  return m;
}

InputModel InputModel::make(Matrix F, Matrix G, Matrix Gamma, Matrix D, Matrix K_Z, Matrix K_Xi1) {
  InputModel m;
  const auto nxi = F.rows();
  if (K_Xi1.size() == 0) K_Xi1 = Matrix::Zero(nxi, nxi);
  m.F = std::move(F);
  m.G = std::move(G);
  m.Gamma = std::move(Gamma);
  m.D = std::move(D);
  m.K_Z = std::move(K_Z);
  m.K_Xi1 = std::move(K_Xi1);
  m.mu_Xi1 = Vector::Zero(nxi);
  return m;
}

InputModel InputModel::iid(Matrix D, Matrix K_Z) {
  const auto nx = D.rows();
  const auto nz = D.cols();
  return make(Matrix(0, 0), Matrix(0, nz), Matrix(nx, 0), std::move(D), std::move(K_Z));
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.invariant;
    if (!v.detail.empty()) out += " (" + v.detail + ")";
  }
  return out;
}

ValidationReport validate(const NoiseModel& m) {
  ValidationReport report;
  Checker check(report);
  for (auto [M, name] : {std::pair{&m.A, "A"}, {&m.B, "B"}, {&m.C, "C"}, {&m.N, "N"},
                         {&m.K_W, "K_W"}, {&m.K_S1, "K_S1"}}) {
    check.finite(*M, name);
  }
  if (!m.mu_S1.allFinite()) check.fail("mu_S1 has non-finite entries", "mu_S1");

  const auto ns = m.A.rows();
  const auto nw = m.K_W.rows();
  const auto ny = m.N.rows();
  bool dims = check.shape(m.A, "A", ns, ns);
  dims &= check.shape(m.K_W, "K_W", nw, nw);
  dims &= check.shape(m.B, "B", ns, nw);
  dims &= check.shape(m.C, "C", ny, ns);
  dims &= check.shape(m.N, "N", ny, nw);
  dims &= check.shape(m.K_S1, "K_S1", ns, ns);
  dims &= check.length(m.mu_S1, "mu_S1", ns);
  if (ny == 0) check.fail("noise output dimension must be positive", "N");
  if (nw == 0) check.fail("noise input dimension must be positive", "K_W");
  if (!dims || !report.ok()) return report;

  check.covariance(m.K_W, "K_W", /*definite=*/true);
  check.covariance(m.K_S1, "K_S1", /*definite=*/false);
  const Matrix R = m.R();
  if (!(min_symmetric_eigenvalue(R) > 0.0)) {
    check.fail("R not positive definite", "R", "R = N K_W N^T must be positive definite");
  }
  return report;
}

ValidationReport validate(const InputModel& m) {
  ValidationReport report;
  Checker check(report);
  for (auto [M, name] : {std::pair{&m.F, "F"}, {&m.G, "G"}, {&m.Gamma, "Gamma"}, {&m.D, "D"},
                         {&m.K_Z, "K_Z"}, {&m.K_Xi1, "K_Xi1"}}) {
    check.finite(*M, name);
  }
  if (!m.mu_Xi1.allFinite()) check.fail("mu_Xi1 has non-finite entries", "mu_Xi1");

  const auto nxi = m.F.rows();
  const auto nz = m.K_Z.rows();
  const auto nx = m.D.rows();
  bool dims = check.shape(m.F, "F", nxi, nxi);
  dims &= check.shape(m.K_Z, "K_Z", nz, nz);
  dims &= check.shape(m.G, "G", nxi, nz);
  dims &= check.shape(m.Gamma, "Gamma", nx, nxi);
  dims &= check.shape(m.D, "D", nx, nz);
  dims &= check.shape(m.K_Xi1, "K_Xi1", nxi, nxi);
  dims &= check.length(m.mu_Xi1, "mu_Xi1", nxi);
  if (nx == 0) check.fail("input dimension must be positive", "D");
  if (!dims || !report.ok()) return report;

  check.covariance(m.K_Z, "K_Z", /*definite=*/false);
  check.covariance(m.K_Xi1, "K_Xi1", /*definite=*/false);
  return report;
}

ValidationReport validate(const Channel& ch) {
  ValidationReport report;
  Checker check(report);
  check.finite(ch.H, "H");
  if (ch.H.rows() == 0 || ch.H.cols() == 0) check.fail("H must be non-empty", "H");
  if (!(ch.kappa >= 0.0) || !std::isfinite(ch.kappa)) {
    check.fail("kappa must be a finite nonnegative number", "kappa");
  }
  return report;
}

ValidationReport validate(const NoiseModel& noise, const InputModel& input, const Channel& channel) {
  ValidationReport report = validate(noise);
  auto ri = validate(input);
  report.violations.insert(report.violations.end(), ri.violations.begin(), ri.violations.end());
  auto rc = validate(channel);
  report.violations.insert(report.violations.end(), rc.violations.begin(), rc.violations.end());
  if (!report.ok()) return report;

  Checker check(report);
  check.shape(channel.H, "H", noise.output_dim(), input.output_dim());
  return report;
}

AugmentedModel build_augmented(const NoiseModel& noise, const InputModel& input,
                               const Channel& channel) {
  require_ok(validate(noise, input, channel), "build_augmented");

  AugmentedModel aug;
  aug.input_state_dim = input.state_dim();
  aug.bA = block_diag(input.F, noise.A);
  aug.bB = block_diag(input.G, noise.B);
  aug.bC = hstack(channel.H * input.Gamma, noise.C);
  aug.bD = hstack(channel.H * input.D, noise.N);
  aug.K_Wbar = block_diag(input.K_Z, noise.K_W);
  aug.mu_Theta1 = vstack(input.mu_Xi1, noise.mu_S1);
  aug.K_Theta1 = block_diag(input.K_Xi1, noise.K_S1);
  return aug;
}

SystemQuadruple to_quadruple(const NoiseModel& noise) {
  require_ok(validate(noise), "to_quadruple");
  SystemQuadruple q{noise.A, noise.B, noise.C, noise.N, noise.K_W};
  require_valid(q);
  return q;
}

SystemQuadruple to_quadruple(const AugmentedModel& aug) {
  SystemQuadruple q{aug.bA, aug.bB, aug.bC, aug.bD, aug.K_Wbar};
  require_valid(q);
  return q;
}

void require_valid(const SystemQuadruple& q) {
  const auto m = q.A.rows();
  const auto p = q.K.rows();
  const auto k = q.C.rows();
  if (q.A.cols() != m || q.B.rows() != m || q.B.cols() != p || q.C.cols() != m ||
      q.D.rows() != k || q.D.cols() != p || q.K.cols() != p) {
    throw ModelError("system quadruple has inconsistent dimensions");
  }
  if (k == 0 || !(min_symmetric_eigenvalue(q.denominator()) > 0.0)) {
    throw ModelError("Riccati denominator D K D^T is not positive definite");
  }
}

void require_ok(const ValidationReport& report, const std::string& context) {
  if (!report.ok()) throw ModelError(context + ": " + report.summary());
}

}  // namespace riccap
