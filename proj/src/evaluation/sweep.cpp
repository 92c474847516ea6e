#include "ixai/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "ixai/error.hpp"
#include "ixai/faithfulness.hpp"
#include "ixai/least_squares.hpp"
#include "ixai/split_search.hpp"

namespace ixai {

namespace {

double parse_number(std::string_view s, const std::string& whole) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw UserError("bad percentile grid '" + whole + "' (expected lo:hi:step)");
  return v;
}

// Per-side MAE of a model pair against yhat.
struct SideMae {
  double below = 0.0, above = 0.0, combined = 0.0;
};

SideMae side_mae(const FeatureMatrix& X, std::span<const double> yhat, std::size_t feature,
                 double threshold, const LinearFactorModel& below,
                 const LinearFactorModel& above) {
  const std::vector<double> eb = below.estimate_batch(X);
  const std::vector<double> ea = above.estimate_batch(X);
  std::vector<double> est(X.rows());
  std::vector<Subspace> side(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const bool is_below = X(i, feature) < threshold;
    est[i] = is_below ? eb[i] : ea[i];
    // typical slot holds the below side here
    side[i] = is_below ? Subspace::kTypical : Subspace::kOutlier;
  }
  const SubspaceMae m = subspace_mae(est, yhat, side);
  return {m.typical, m.outlier, m.combined};
}

std::optional<std::size_t> argmin(const std::vector<SweepPoint>& pts,
                                  double SweepPoint::*field) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].skipped) continue;
    if (!best || pts[i].*field < pts[*best].*field) best = i;
  }
  return best;
}

}  // namespace

std::vector<double> parse_percentile_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (b == std::string::npos) throw UserError("bad percentile grid '" + spec + "' (expected lo:hi:step)");
  const std::string_view sv(spec);
  const double lo = parse_number(sv.substr(0, a), spec);
  const double hi = parse_number(sv.substr(a + 1, b - a - 1), spec);
  const double step = parse_number(sv.substr(b + 1), spec);
  if (!(lo >= 0.0 && hi <= 100.0 && lo <= hi && step > 0.0))
    throw UserError("bad percentile grid '" + spec + "' (need 0 <= lo <= hi <= 100, step > 0)");
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw UserError("percentile of an empty column");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::optional<std::size_t> SweepResult::subglobal_min() const {
  return argmin(points, &SweepPoint::subglobal_mae_combined);
}

std::optional<std::size_t> SweepResult::incremental_min() const {
  return argmin(points, &SweepPoint::incremental_mae_combined);
}

bool SweepResult::minimum_matches_learned() const {
  const auto m = subglobal_min();
  if (!m) return false;
  const std::size_t i = *m;
  const double t = points[i].threshold;
  // Grid spacing at the ends is taken from the single available neighbour.
  const double lo = i > 0 ? points[i - 1].threshold
                          : (points.size() > 1 ? 2 * t - points[1].threshold : t);
  const double hi = i + 1 < points.size()
                        ? points[i + 1].threshold
                        : (i > 0 ? 2 * t - points[i - 1].threshold : t);
  return learned_threshold >= lo && learned_threshold <= hi;
}

bool SweepResult::has_zero_delta_with_differing_subglobal() const {
  for (const SweepPoint& p : points) {
    if (p.skipped) continue;
    for (std::size_t r = 0; r < p.subglobal_below.factors.size(); ++r) {
      const double a = p.subglobal_below.factors[r];
      const double b = p.subglobal_at_or_above.factors[r];
      const double gap = std::abs(a - b);
      if (p.delta[r + 1] == 0.0 && gap > 1e-6 * std::max(std::abs(a), std::abs(b))) return true;
    }
  }
  return false;
}

std::vector<double> SweepResult::normalize(const std::vector<double>& curve,
                                           const std::vector<bool>& skipped) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (!skipped[i]) {
      lo = std::min(lo, curve[i]);
      hi = std::max(hi, curve[i]);
    }
  std::vector<double> out(curve.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < curve.size(); ++i)
    if (!skipped[i]) out[i] = hi > lo ? (curve[i] - lo) / (hi - lo) : 0.0;
  return out;
}

SweepResult threshold_sweep(const FeatureMatrix& X, std::span<const double> yhat,
                            std::size_t feature_index, std::span<const double> percentiles,
                            double lambda, double learned_threshold,
                            const IncrementalOptions& opts) {
  if (feature_index >= X.cols()) throw UserError("sweep: feature index out of range");
  if (X.rows() != yhat.size()) throw std::invalid_argument("sweep: size mismatch");
  SweepResult res;
  res.feature_index = feature_index;
  res.lambda = lambda;
  res.learned_threshold = learned_threshold;
  res.global = fit_global(X, yhat).model;

  const std::vector<double> col(X.col(feature_index).begin(), X.col(feature_index).end());
  const std::size_t min_rows = min_subspace_rows(X.rows(), opts.split);
  for (double p : percentiles) {
    SweepPoint pt;
    pt.percentile = p;
    pt.threshold = percentile(col, p);
    for (double v : col) (v < pt.threshold ? pt.n_below : pt.n_at_or_above)++;
    pt.skipped = pt.n_below < min_rows || pt.n_at_or_above < min_rows;
    if (!pt.skipped) {
      const PartitionRule rule =
          majority_rule(feature_index, pt.threshold, pt.n_below, pt.n_at_or_above);
      pt.typical_side = rule.typical_side;
      const bool below_typical = rule.typical_side == Side::kBelow;

      const SubglobalModel sub = fit_subglobal(X, yhat, rule, opts.split);
      pt.subglobal_below = below_typical ? sub.typical : sub.outlier;
      pt.subglobal_at_or_above = below_typical ? sub.outlier : sub.typical;
      const SideMae sm = side_mae(X, yhat, feature_index, pt.threshold, pt.subglobal_below,
                                  pt.subglobal_at_or_above);
      pt.subglobal_mae_below = sm.below;
      pt.subglobal_mae_at_or_above = sm.above;
      pt.subglobal_mae_combined = sm.combined;

      const IncrementalModel inc = fit_incremental(X, yhat, lambda, rule, opts);
      pt.delta = inc.delta;
      pt.incremental_below = below_typical ? inc.base : inc.outlier_effective();
      pt.incremental_at_or_above = below_typical ? inc.outlier_effective() : inc.base;
      const SideMae im = side_mae(X, yhat, feature_index, pt.threshold, pt.incremental_below,
                                  pt.incremental_at_or_above);
      pt.incremental_mae_below = im.below;
      pt.incremental_mae_at_or_above = im.above;
      pt.incremental_mae_combined = im.combined;
    }
    res.points.push_back(std::move(pt));
  }
  return res;
}

}  // namespace ixai
