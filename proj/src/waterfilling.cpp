#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "riccap/capacity.hpp"
#include "riccap/errors.hpp"

namespace riccap {

WaterfillingResult waterfilling_oracle(const Eigen::Ref<const Matrix>& H,
                                       const Eigen::Ref<const Matrix>& R, double kappa) {
  if (R.rows() != R.cols() || R.rows() != H.rows()) {
    throw ModelError("waterfilling_oracle: R must be square with as many rows as H");
  }
  if (!(kappa >= 0.0)) throw ModelError("waterfilling_oracle: kappa must be nonnegative");
  Eigen::LLT<Matrix> llt(symmetrize(R));
  if (llt.info() != Eigen::Success) throw NumericalError("waterfilling_oracle: R is not PD");

  // L⁻¹H has the singular values of R^{-1/2}H (they differ by an orthogonal factor).
  const Matrix whitened = llt.matrixL().solve(H);
  Eigen::JacobiSVD<Matrix> svd(whitened);
  const Vector sv = svd.singularValues();

  WaterfillingResult out;
  Eigen::Index active = 0;
  const double floor = sv.size() > 0 ? sv[0] * 1e-14 : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > floor) ++active;
  }
  out.gains = sv.head(active).array().square().matrix();
  out.powers = Vector::Zero(active);
  if (active == 0 || kappa == 0.0) return out;

  auto allocated = [&](double level) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < active; ++i) total += std::max(0.0, level - 1.0 / out.gains[i]);
    return total;
  };
  double lo = 0.0;
  double hi = kappa + 1.0 / out.gains.minCoeff();
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (allocated(mid) < kappa ? lo : hi) = mid;
  }
  out.water_level = 0.5 * (lo + hi);
  for (Eigen::Index i = 0; i < active; ++i) {
    out.powers[i] = std::max(0.0, out.water_level - 1.0 / out.gains[i]);
    out.rate_nats += 0.5 * std::log1p(out.gains[i] * out.powers[i]);
  }
  return out;
}

}  // namespace riccap
