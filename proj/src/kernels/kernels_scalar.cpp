#include "kernels_internal.hpp"

#include <cmath>

namespace ixai::kernels::detail {
namespace {

void linear_predict_scalar(const double* const* cols, std::size_t ncols,
                           std::size_t n, double intercept, const double* coef,
                           double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = intercept;
    for (std::size_t j = 0; j < ncols; ++j) acc = acc + coef[j] * cols[j][i];
    out[i] = acc;
  }
}

void weighted_gram_scalar(const double* const* cols, std::size_t ncols,
                          std::size_t n, const double* weights,
                          const double* target, double* gram, double* moment,
                          double* target_sq) {
  const std::size_t dim = ncols + 1;
  for (std::size_t k = 0; k < dim * dim; ++k) gram[k] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) moment[k] = 0.0;
  double yy = 0.0;
  double row[kMaxColumns + 1];
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights ? weights[i] : 1.0;
    const double y = target[i];
    row[0] = 1.0;
    for (std::size_t j = 0; j < ncols; ++j) row[j + 1] = cols[j][i];
    const double wy = w * y;
    for (std::size_t a = 0; a < dim; ++a) {
      const double wa = w * row[a];
      for (std::size_t b = a; b < dim; ++b) gram[a * dim + b] += wa * row[b];
      moment[a] += wy * row[a];
    }
    yy += wy * y;
  }
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < a; ++b) gram[a * dim + b] = gram[b * dim + a];
  *target_sq = yy;
}

double sum_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void transpose_matvec_scalar(const double* const* cols, std::size_t ncols,
                             std::size_t n, const double* r, double* out) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += r[i];
  out[0] = s;
  for (std::size_t j = 0; j < ncols; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += cols[j][i] * r[i];
    out[j + 1] = acc;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      Isa::kScalar,       linear_predict_scalar,  weighted_gram_scalar,
      sum_abs_diff_scalar, transpose_matvec_scalar,
  };
  return table;
}

}  // namespace ixai::kernels::detail
