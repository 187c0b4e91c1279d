#include <cmath>
#include <limits>

#include "riccap/kernels.hpp"

namespace riccap::kernels {
namespace {

void gemv(const double* M, std::size_t rows, std::size_t cols, const double* in, double* out,
          std::size_t lanes, bool accumulate) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out + r * lanes;
    if (!accumulate) {
      for (std::size_t p = 0; p < lanes; ++p) dst[p] = 0.0;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const double m = M[r * cols + c];
      const double* src = in + c * lanes;
      for (std::size_t p = 0; p < lanes; ++p) dst[p] += m * src[p];
    }
  }
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x[i]));
  }
  return m;
}

constexpr KernelTable kTable{"scalar", &gemv, &sum, &dot, &max_abs};

}  // namespace

const KernelTable& scalar_table() { return kTable; }

}  // namespace riccap::kernels
