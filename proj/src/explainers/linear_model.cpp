#include <cmath>

#include "ixai/error.hpp"
#include "ixai/explainers.hpp"
#include "ixai/kernels.hpp"

namespace ixai {

std::string to_string(XaiType t) {
  switch (t) {
    case XaiType::kGlobal: return "global";
    case XaiType::kSubglobal: return "subglobal";
    case XaiType::kIncremental: return "incremental";
    case XaiType::kLocal: return "local";
  }
  return "unknown";
}

XaiType xai_type_from_string(const std::string& s) {
  for (XaiType t : kAllXaiTypes)
    if (to_string(t) == s) return t;
  throw UserError("unknown xai type '" + s +
                  "' (expected global, subglobal, incremental or local)");
}

std::string to_string(Subspace s) {
  return s == Subspace::kTypical ? "typical" : "outlier";
}

std::string to_string(Side s) { return s == Side::kBelow ? "below" : "at_or_above"; }

namespace {

void check_instance(std::span<const double> x, std::size_t d) {
  if (x.size() != d)
    throw UserError("instance has " + std::to_string(x.size()) + " values, expected " +
                    std::to_string(d));
  for (double v : x)
    if (!std::isfinite(v)) throw UserError("instance contains a non-finite value");
}

}  // namespace

double LinearFactorModel::estimate(std::span<const double> x) const {
  check_instance(x, factors.size());
  double acc = intercept;
  for (std::size_t r = 0; r < factors.size(); ++r) acc = acc + factors[r] * x[r];
  return acc;
}

std::vector<double> LinearFactorModel::estimate_batch(const FeatureMatrix& X) const {
  if (X.cols() != factors.size())
    throw UserError("matrix has " + std::to_string(X.cols()) + " columns, expected " +
                    std::to_string(factors.size()));
  std::vector<double> out(X.rows());
  const auto cols = X.column_pointers();
  kernels::linear_predict(cols, X.rows(), intercept, factors, out);
  return out;
}

bool LinearFactorModel::is_finite() const {
  if (!std::isfinite(intercept)) return false;
  for (double f : factors)
    if (!std::isfinite(f)) return false;
  return true;
}

Side PartitionRule::side_of(std::span<const double> x) const {
  if (feature_index >= x.size()) throw UserError("rule feature index out of range");
  return x[feature_index] < threshold ? Side::kBelow : Side::kAtOrAbove;
}

Subspace subspace_of(const PartitionRule& rule, std::span<const double> x) {
  return rule.side_of(x) == rule.typical_side ? Subspace::kTypical : Subspace::kOutlier;
}

PartitionRule majority_rule(std::size_t feature_index, double threshold,
                            std::size_t rows_below, std::size_t rows_at_or_above) {
  return {feature_index, threshold,
          rows_below >= rows_at_or_above ? Side::kBelow : Side::kAtOrAbove};
}

LinearFactorModel IncrementalModel::outlier_effective() const {
  LinearFactorModel m;
  m.intercept = base.intercept + delta.at(0);
  m.factors.resize(base.factors.size());
  for (std::size_t r = 0; r < base.factors.size(); ++r)
    m.factors[r] = base.factors[r] + delta.at(r + 1);
  return m;
}

double IncrementalModel::estimate(std::span<const double> x) const {
  if (subspace_of(rule, x) == Subspace::kTypical) return base.estimate(x);
  return outlier_effective().estimate(x);
}

std::size_t IncrementalModel::nonzero_deltas() const {
  std::size_t n = 0;
  for (double d : delta) n += d != 0.0;
  return n;
}

double IncrementalModel::delta_l1() const {
  double s = 0.0;
  for (double d : delta) s += std::abs(d);
  return s;
}

void LocalConfig::validate() const {
  if (n_samples < 50) throw UserError("local: n_samples must be >= 50");
  if (!(kernel_width > 0.0) || !std::isfinite(kernel_width))
    throw UserError("local: kernel_width must be > 0");
  if (!(perturb_scale > 0.0) || !std::isfinite(perturb_scale))
    throw UserError("local: perturb_scale must be > 0");
}

double estimate(const FittedExplainer& explainer, std::span<const double> x) {
  return std::visit([&](const auto& m) { return m.estimate(x); }, explainer);
}

std::vector<double> estimate_batch(const FittedExplainer& explainer,
                                   const FeatureMatrix& X) {
  if (const auto* lin = std::get_if<LinearFactorModel>(&explainer))
    return lin->estimate_batch(X);
  std::vector<double> out(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) out[i] = estimate(explainer, X.row(i));
  return out;
}

}  // namespace ixai
