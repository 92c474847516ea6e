#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace ixai::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(IXAI_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2})
    if (isa_supported(isa)) out.push_back(isa);
  return out;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_supported(isa))
    throw std::runtime_error("kernel variant not supported on this CPU: " +
                             std::string(isa_name(isa)));
#if defined(IXAI_HAVE_AVX2_TU)
  if (isa == Isa::kAvx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("IXAI_SIMD")) {
    const std::string_view want(env);
    for (Isa isa : supported_isas())
      if (isa_name(isa) == want) return table_for(isa);
  }
  const auto isas = supported_isas();
  return table_for(isas.back());
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

void linear_predict(std::span<const double* const> cols, std::size_t n,
                    double intercept, std::span<const double> coef,
                    std::span<double> out) {
  if (cols.size() != coef.size() || cols.size() > kMaxColumns || out.size() < n)
    throw std::invalid_argument("linear_predict: shape mismatch");
  active().linear_predict(cols.data(), cols.size(), n, intercept, coef.data(),
                          out.data());
}

GramResult weighted_gram(std::span<const double* const> cols, std::size_t n,
                         std::span<const double> weights,
                         std::span<const double> target) {
  if (cols.size() > kMaxColumns || target.size() < n ||
      (!weights.empty() && weights.size() < n))
    throw std::invalid_argument("weighted_gram: shape mismatch");
  GramResult r;
  r.dim = cols.size() + 1;
  r.gram.assign(r.dim * r.dim, 0.0);
  r.moment.assign(r.dim, 0.0);
  active().weighted_gram(cols.data(), cols.size(), n,
                         weights.empty() ? nullptr : weights.data(),
                         target.data(), r.gram.data(), r.moment.data(),
                         &r.target_sq);
  return r;
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("sum_abs_diff: length mismatch");
  return active().sum_abs_diff(a.data(), b.data(), a.size());
}

std::vector<double> transpose_matvec(std::span<const double* const> cols,
                                     std::span<const double> r) {
  if (cols.size() > kMaxColumns)
    throw std::invalid_argument("transpose_matvec: too many columns");
  std::vector<double> out(cols.size() + 1, 0.0);
  active().transpose_matvec(cols.data(), cols.size(), r.size(), r.data(),
                            out.data());
  return out;
}

}  // namespace ixai::kernels
