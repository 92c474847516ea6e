#pragma once

// Data-parallel inner loops shared by the fitters and the evaluators.
//
// Every kernel has a scalar reference implementation and, where the CPU
// supports it, a vectorized variant. The variant is chosen once at first use
// (override with IXAI_SIMD=scalar|avx2). linear_predict is bit-identical
// across variants; the reductions agree to rounding only.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ixai::kernels {

inline constexpr std::size_t kMaxColumns = 8;

enum class Isa : std::uint8_t { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  // out[i] = intercept + coef[0]*c0[i] + coef[1]*c1[i] + ..., summed left to
  // right with separate multiply and add.
  void (*linear_predict)(const double* const* cols, std::size_t ncols,
                         std::size_t n, double intercept, const double* coef,
                         double* out);

  // Weighted moments of the augmented design [1, c0, c1, ...]:
  //   gram[a*(ncols+1)+b] = sum_i w_i a_i b_i   (full symmetric matrix)
  //   moment[a]           = sum_i w_i a_i y_i
  //   *target_sq          = sum_i w_i y_i^2
  // weights may be null (unit weights).
  void (*weighted_gram)(const double* const* cols, std::size_t ncols,
                        std::size_t n, const double* weights,
                        const double* target, double* gram, double* moment,
                        double* target_sq);

  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);

  // out[0] = sum_i r_i, out[j+1] = sum_i c_j[i] r_i
  void (*transpose_matvec)(const double* const* cols, std::size_t ncols,
                           std::size_t n, const double* r, double* out);
};

bool isa_supported(Isa isa);
std::vector<Isa> supported_isas();
const KernelTable& table_for(Isa isa);

// The table selected for this process.
const KernelTable& active();

// Convenience wrappers over active().

struct GramResult {
  std::size_t dim = 0;             // ncols + 1
  std::vector<double> gram;        // dim*dim, row-major
  std::vector<double> moment;      // dim
  double target_sq = 0.0;
};

void linear_predict(std::span<const double* const> cols, std::size_t n,
                    double intercept, std::span<const double> coef,
                    std::span<double> out);

GramResult weighted_gram(std::span<const double* const> cols, std::size_t n,
                         std::span<const double> weights,
                         std::span<const double> target);

double sum_abs_diff(std::span<const double> a, std::span<const double> b);

// Returns [sum r, sum c0*r, sum c1*r, ...].
std::vector<double> transpose_matvec(std::span<const double* const> cols,
                                     std::span<const double> r);

}  // namespace ixai::kernels
