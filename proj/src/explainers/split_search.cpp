#include "ixai/split_search.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ixai/least_squares.hpp"

namespace ixai {

std::size_t min_subspace_rows(std::size_t n, const SplitSearchOptions& opts) {
  const auto frac = static_cast<std::size_t>(std::ceil(opts.min_fraction * static_cast<double>(n)));
  return std::max(opts.min_rows, frac);
}

std::vector<double> candidate_thresholds(std::span<const double> values,
                                         const SplitSearchOptions& opts) {
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  std::vector<double> out;
  if (s.size() < 2) return out;
  if (s.size() <= opts.exhaustive_max_rows) {
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (!(s[i - 1] < s[i])) continue;
      double mid = 0.5 * (s[i - 1] + s[i]);
      if (!(mid > s[i - 1])) mid = s[i];
      out.push_back(mid);
    }
    return out;
  }
  // Linear interpolation between order statistics at p/100 * (n - 1).
  const double last = static_cast<double>(s.size() - 1);
  for (int p = 1; p <= 99; ++p) {
    const double pos = p / 100.0 * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    const double v = s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

RulePartition partition_rows(const FeatureMatrix& X, const PartitionRule& rule) {
  RulePartition p;
  const auto col = X.col(rule.feature_index);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const Side s = col[i] < rule.threshold ? Side::kBelow : Side::kAtOrAbove;
    (s == rule.typical_side ? p.typical : p.outlier).push_back(i);
  }
  return p;
}

std::optional<SplitCandidate> score_split(const FeatureMatrix& X, std::span<const double> y,
                                          std::size_t feature, double threshold,
                                          const SplitSearchOptions& opts) {
  std::vector<std::size_t> below, above;
  const auto col = X.col(feature);
  for (std::size_t i = 0; i < X.rows(); ++i)
    (col[i] < threshold ? below : above).push_back(i);
  const std::size_t need = min_subspace_rows(X.rows(), opts);
  if (below.size() < need || above.size() < need) return std::nullopt;
  const auto side_sse = [&](const std::vector<std::size_t>& rows) {
    const std::vector<double> ys = select(y, std::span<const std::size_t>(rows));
    return fit_ols(X.select_rows(rows), ys).sse;
  };
  return SplitCandidate{feature, threshold, below.size(), above.size(),
                        side_sse(below) + side_sse(above)};
}

namespace {

// Running moments of the standardized augmented design [1, z] and target.
struct Moments {
  std::size_t dim = 0;
  std::size_t n = 0;
  std::vector<double> gram;
  std::vector<double> moment;
  double target_sq = 0.0;

  explicit Moments(std::size_t d) : dim(d), gram(d * d, 0.0), moment(d, 0.0) {}

  void add(const double* a, double y) {
    ++n;
    for (std::size_t i = 0; i < dim; ++i) {
      moment[i] += a[i] * y;
      for (std::size_t j = i; j < dim; ++j) gram[i * dim + j] += a[i] * a[j];
    }
    target_sq += y * y;
  }

  // Residual sum of squares of the least-squares fit with these moments.
  double residual() const {
    Eigen::MatrixXd G(dim, dim);
    Eigen::VectorXd c(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      c(i) = moment[i];
      for (std::size_t j = i; j < dim; ++j) G(i, j) = G(j, i) = gram[i * dim + j];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
      G.diagonal().array() += 1e-10 * std::max(G.diagonal().mean(), 1.0);
      llt.compute(G);
    }
    const double r = target_sq - c.dot(llt.solve(c));
    return std::max(r, 0.0);
  }

  Moments minus(const Moments& o) const {
    Moments m(dim);
    m.n = n - o.n;
    for (std::size_t i = 0; i < gram.size(); ++i) m.gram[i] = gram[i] - o.gram[i];
    for (std::size_t i = 0; i < dim; ++i) m.moment[i] = moment[i] - o.moment[i];
    m.target_sq = target_sq - o.target_sq;
    return m;
  }
};

bool precedes(const SplitCandidate& a, const SplitCandidate& b) {
  return a.feature != b.feature ? a.feature < b.feature : a.threshold < b.threshold;
}

}  // namespace

SplitCandidate find_best_split(const FeatureMatrix& X, std::span<const double> y,
                               const SplitSearchOptions& opts) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  const std::size_t dim = d + 1;
  const std::size_t need = min_subspace_rows(n, opts);
  if (n < 2 * need) throw NoAdmissibleSplit("too few rows for two subspaces");

  // Standardize once so the prefix moments stay well conditioned.
  std::vector<double> rows(n * dim);
  double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = X.col(c);
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double v = 0.0;
    for (double x : col) v += (x - m) * (x - m);
    const double sd = v > 0.0 ? std::sqrt(v / static_cast<double>(n)) : 1.0;
    for (std::size_t i = 0; i < n; ++i) rows[i * dim + c + 1] = (col[i] - m) / sd;
  }
  Moments total(dim);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i * dim] = 1.0;
    total.add(&rows[i * dim], y[i] - ybar);
  }

  std::vector<SplitCandidate> scanned;
  std::vector<std::size_t> order(n);
  for (std::size_t f = 0; f < d; ++f) {
    const auto col = X.col(f);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return col[a] < col[b]; });
    Moments left(dim);
    std::size_t p = 0;
    for (double t : candidate_thresholds(col, opts)) {
      while (p < n && col[order[p]] < t) {
        left.add(&rows[order[p] * dim], y[order[p]] - ybar);
        ++p;
      }
      if (p < need || n - p < need) continue;
      const double approx = left.residual() + total.minus(left).residual();
      scanned.push_back({f, t, p, n - p, approx});
    }
  }
  if (scanned.empty()) throw NoAdmissibleSplit("no split leaves both subspaces large enough");

  const std::size_t k = std::min(opts.rescore_top, scanned.size());
  std::partial_sort(scanned.begin(), scanned.begin() + static_cast<std::ptrdiff_t>(k),
                    scanned.end(), [](const SplitCandidate& a, const SplitCandidate& b) {
                      return a.sse != b.sse ? a.sse < b.sse : precedes(a, b);
                    });
  scanned.resize(k);
  std::sort(scanned.begin(), scanned.end(), precedes);

  std::optional<SplitCandidate> best;
  for (const SplitCandidate& c : scanned) {
    const auto exact = score_split(X, y, c.feature, c.threshold, opts);
    if (exact && (!best || exact->sse < best->sse)) best = exact;
  }
  if (!best) throw NoAdmissibleSplit("no split leaves both subspaces large enough");
  return *best;
}

SubglobalModel fit_subglobal(const FeatureMatrix& X, std::span<const double> yhat,
                             const PartitionRule& rule, const SplitSearchOptions& opts) {
  const RulePartition p = partition_rows(X, rule);
  if (p.typical.size() < opts.min_rows || p.outlier.size() < opts.min_rows)
    throw NoAdmissibleSplit("rule leaves a subspace with fewer than " +
                            std::to_string(opts.min_rows) + " rows");
  const auto fit_side = [&](const std::vector<std::size_t>& rows) {
    const std::vector<double> ys = select(yhat, std::span<const std::size_t>(rows));
    return fit_ols(X.select_rows(rows), ys);
  };
  OlsFit typ = fit_side(p.typical);
  OlsFit out = fit_side(p.outlier);
  SubglobalModel m;
  m.rule = rule;
  m.typical = std::move(typ.model);
  m.outlier = std::move(out.model);
  m.info.ridge_fallback = typ.ridge_fallback || out.ridge_fallback;
  m.info.final_loss = typ.sse + out.sse;
  return m;
}

SubglobalModel fit_subglobal(const FeatureMatrix& X, std::span<const double> yhat,
                             const SplitSearchOptions& opts) {
  const SplitCandidate best = find_best_split(X, yhat, opts);
  return fit_subglobal(
      X, yhat, majority_rule(best.feature, best.threshold, best.n_below, best.n_at_or_above),
      opts);
}

}  // namespace ixai
