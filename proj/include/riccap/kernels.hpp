#pragma once

#include <cstddef>
#include <string_view>

// Batched kernels over structure-of-arrays blocks. A block of `rows` signals
// across `lanes` Monte Carlo paths stores signal r of path p at
// data[r * lanes + p], so each row is a contiguous lane vector.

namespace riccap::kernels {

struct KernelTable {
  const char* name;

  /// out[r][p] = (accumulate ? out[r][p] : 0) + Σ_c M[r][c] · in[c][p]
  /// with M row-major rows × cols. `in` and `out` must not overlap.
  void (*gemv)(const double* M, std::size_t rows, std::size_t cols, const double* in,
               double* out, std::size_t lanes, bool accumulate);

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);

  /// max |x_i|; +inf if any entry is not finite; 0 for n = 0.
  double (*max_abs)(const double* x, std::size_t n);
};

/// Plain loops; the reference every other table is tested against.
const KernelTable& scalar_table();

/// AVX2+FMA table, or nullptr if it was not built or the CPU lacks the
/// instructions.
const KernelTable* avx2_table();

/// Table chosen once per process: AVX2 when available, unless the environment
/// variable RICCATI_CAPACITY_SIMD is "scalar".
const KernelTable& active();

/// Looks a table up by name ("scalar", "avx2"); nullptr when unavailable.
const KernelTable* table_by_name(std::string_view name);

}  // namespace riccap::kernels
