// Compiled with -mavx2 only; callers reach these through the dispatch table
// after a cpuid check. No FMA: products and sums are rounded separately so
// linear_predict matches the scalar path bit for bit.

#include <immintrin.h>

#include <array>
#include <cmath>
#include <utility>

#include "kernels_internal.hpp"

namespace ixai::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const double l0 = _mm_cvtsd_f64(lo);
  const double l1 = _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
  const double h0 = _mm_cvtsd_f64(hi);
  const double h1 = _mm_cvtsd_f64(_mm_unpackhi_pd(hi, hi));
  return (l0 + l1) + (h0 + h1);
}

void linear_predict_avx2(const double* const* cols, std::size_t ncols,
                         std::size_t n, double intercept, const double* coef,
                         double* out) {
  const __m256d b = _mm256_set1_pd(intercept);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = b;
    for (std::size_t j = 0; j < ncols; ++j) {
      const __m256d x = _mm256_loadu_pd(cols[j] + i);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(coef[j]), x));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = intercept;
    for (std::size_t j = 0; j < ncols; ++j) acc = acc + coef[j] * cols[j][i];
    out[i] = acc;
  }
}

// D = number of feature columns; the augmented design has D + 1 columns.
template <std::size_t D>
void weighted_gram_fixed(const double* const* cols, std::size_t n,
                         const double* weights, const double* target,
                         double* gram, double* moment, double* target_sq) {
  constexpr std::size_t kDim = D + 1;
  constexpr std::size_t kTri = kDim * (kDim + 1) / 2;
  __m256d g[kTri];
  __m256d m[kDim];
  for (auto& v : g) v = _mm256_setzero_pd();
  for (auto& v : m) v = _mm256_setzero_pd();
  __m256d yy = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d row[kDim];
    row[0] = one;
    for (std::size_t j = 0; j < D; ++j) row[j + 1] = _mm256_loadu_pd(cols[j] + i);
    const __m256d w = weights ? _mm256_loadu_pd(weights + i) : one;
    const __m256d y = _mm256_loadu_pd(target + i);
    const __m256d wy = _mm256_mul_pd(w, y);
    std::size_t t = 0;
    for (std::size_t a = 0; a < kDim; ++a) {
      const __m256d wa = _mm256_mul_pd(w, row[a]);
      for (std::size_t b = a; b < kDim; ++b, ++t)
        g[t] = _mm256_add_pd(g[t], _mm256_mul_pd(wa, row[b]));
      m[a] = _mm256_add_pd(m[a], _mm256_mul_pd(wy, row[a]));
    }
    yy = _mm256_add_pd(yy, _mm256_mul_pd(wy, y));
  }

  std::array<double, kTri> gs{};
  std::array<double, kDim> ms{};
  double yys = 0.0;
  for (; i < n; ++i) {
    std::array<double, kDim> row;
    row[0] = 1.0;
    for (std::size_t j = 0; j < D; ++j) row[j + 1] = cols[j][i];
    const double w = weights ? weights[i] : 1.0;
    const double y = target[i];
    const double wy = w * y;
    std::size_t t = 0;
    for (std::size_t a = 0; a < kDim; ++a) {
      const double wa = w * row[a];
      for (std::size_t b = a; b < kDim; ++b, ++t) gs[t] += wa * row[b];
      ms[a] += wy * row[a];
    }
    yys += wy * y;
  }

  std::size_t t = 0;
  for (std::size_t a = 0; a < kDim; ++a) {
    for (std::size_t b = a; b < kDim; ++b, ++t) {
      const double v = hsum(g[t]) + gs[t];
      gram[a * kDim + b] = v;
      gram[b * kDim + a] = v;
    }
    moment[a] = hsum(m[a]) + ms[a];
  }
  *target_sq = hsum(yy) + yys;
}

template <std::size_t... Ds>
void weighted_gram_switch(std::size_t ncols, const double* const* cols,
                          std::size_t n, const double* weights,
                          const double* target, double* gram, double* moment,
                          double* target_sq, std::index_sequence<Ds...>) {
  ((ncols == Ds ? weighted_gram_fixed<Ds>(cols, n, weights, target, gram,
                                          moment, target_sq)
                : void()),
   ...);
}

void weighted_gram_avx2(const double* const* cols, std::size_t ncols,
                        std::size_t n, const double* weights,
                        const double* target, double* gram, double* moment,
                        double* target_sq) {
  weighted_gram_switch(ncols, cols, n, weights, target, gram, moment, target_sq,
                       std::make_index_sequence<kMaxColumns + 1>{});
}

double sum_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += std::fabs(a[i] - b[i]);
  return hsum(acc) + tail;
}

void transpose_matvec_avx2(const double* const* cols, std::size_t ncols,
                           std::size_t n, const double* r, double* out) {
  __m256d acc[kMaxColumns + 1];
  for (auto& v : acc) v = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d rv = _mm256_loadu_pd(r + i);
    acc[0] = _mm256_add_pd(acc[0], rv);
    for (std::size_t j = 0; j < ncols; ++j)
      acc[j + 1] = _mm256_add_pd(acc[j + 1],
                                 _mm256_mul_pd(_mm256_loadu_pd(cols[j] + i), rv));
  }
  std::array<double, kMaxColumns + 1> tail{};
  for (; i < n; ++i) {
    tail[0] += r[i];
    for (std::size_t j = 0; j < ncols; ++j) tail[j + 1] += cols[j][i] * r[i];
  }
  for (std::size_t j = 0; j <= ncols; ++j) out[j] = hsum(acc[j]) + tail[j];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      Isa::kAvx2,        linear_predict_avx2,  weighted_gram_avx2,
      sum_abs_diff_avx2, transpose_matvec_avx2,
  };
  return table;
}

}  // namespace ixai::kernels::detail
