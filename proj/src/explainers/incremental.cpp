#include "ixai/incremental.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ixai/error.hpp"
#include "ixai/kernels.hpp"
#include "ixai/least_squares.hpp"

namespace ixai {

IncrementalCoordinates::IncrementalCoordinates(const FeatureMatrix& X, double target_offset)
    : mean_(X.cols(), 0.0), scale_(X.cols(), 1.0), offset_(target_offset) {
  const double n = static_cast<double>(X.rows());
  for (std::size_t c = 0; c < X.cols(); ++c) {
    const auto col = X.col(c);
    double m = 0.0;
    for (double v : col) m += v;
    m /= n;
    double var = 0.0;
    for (double v : col) var += (v - m) * (v - m);
    const double sd = std::sqrt(var / n);
    mean_[c] = m;
    scale_[c] = sd > 0.0 ? sd : 1.0;
  }
}

std::pair<LinearFactorModel, std::vector<double>> IncrementalCoordinates::to_raw(
    std::span<const double> theta) const {
  const std::size_t d = features();
  LinearFactorModel base;
  base.factors.resize(d);
  double intercept = offset_ + theta[0];
  for (std::size_t r = 0; r < d; ++r) {
    base.factors[r] = theta[r + 1] / scale_[r];
    intercept -= base.factors[r] * mean_[r];
  }
  base.intercept = intercept;
  std::vector<double> delta(d + 1);
  delta[0] = theta[d + 1];
  for (std::size_t r = 0; r < d; ++r) delta[r + 1] = theta[d + 2 + r] / scale_[r];
  return {std::move(base), std::move(delta)};
}

std::vector<double> IncrementalCoordinates::from_raw(const LinearFactorModel& base,
                                                     std::span<const double> delta) const {
  const std::size_t d = features();
  std::vector<double> theta(dim());
  double b0 = base.intercept - offset_;
  for (std::size_t r = 0; r < d; ++r) {
    theta[r + 1] = base.factors[r] * scale_[r];
    b0 += base.factors[r] * mean_[r];
  }
  theta[0] = b0;
  theta[d + 1] = delta[0];
  for (std::size_t r = 0; r < d; ++r) theta[d + 2 + r] = delta[r + 1] * scale_[r];
  return theta;
}

std::vector<double> IncrementalCoordinates::l1_weights(double lambda) const {
  const std::size_t d = features();
  std::vector<double> w(dim(), 0.0);
  w[d + 1] = lambda;
  for (std::size_t r = 0; r < d; ++r) w[d + 2 + r] = lambda / scale_[r];
  return w;
}

IncrementalProblem::IncrementalProblem(const FeatureMatrix& X, std::span<const double> yhat,
                                       const PartitionRule& rule)
    : X_(X), yhat_(yhat), rule_(rule) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (yhat.size() != n) throw std::invalid_argument("IncrementalProblem: size mismatch");
  if (n == 0) throw UserError("incremental explainer needs training rows");
  if (2 * d > kernels::kMaxColumns)
    throw std::invalid_argument("IncrementalProblem: too many features");
  double mu = 0.0;
  for (double v : yhat) mu += v;
  coords_ = IncrementalCoordinates(X, mu / static_cast<double>(n));

  const RulePartition part = partition_rows(X, rule);
  outlier_rows_ = part.outlier.size();
  const auto& m = coords_.mean();
  const auto& s = coords_.scale();

  // Typical rows see [1, z]; outlier rows see [1, z, 1, v] with v = x / s.
  const auto moments = [&](const std::vector<std::size_t>& rows, bool with_delta) {
    std::vector<std::vector<double>> cols(with_delta ? 2 * d : d,
                                          std::vector<double>(rows.size()));
    std::vector<double> target(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t k = rows[i];
      for (std::size_t r = 0; r < d; ++r) {
        cols[r][i] = (X(k, r) - m[r]) / s[r];
        if (with_delta) cols[d + r][i] = X(k, r) / s[r];
      }
      target[i] = yhat[k] - coords_.target_offset();
    }
    std::vector<const double*> ptrs;
    for (const auto& c : cols) ptrs.push_back(c.data());
    return kernels::weighted_gram(ptrs, rows.size(), {}, target);
  };
  const kernels::GramResult typ = moments(part.typical, false);
  const kernels::GramResult out = moments(part.outlier, true);

  const std::size_t dim = coords_.dim();
  const auto map = [d](std::size_t j) { return j <= d ? j : (j == d + 1 ? 0 : j - 1); };
  H_.assign(dim * dim, 0.0);
  g_.assign(dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a) {
    g_[a] = out.moment[map(a)] + (a <= d ? typ.moment[a] : 0.0);
    for (std::size_t b = 0; b < dim; ++b) {
      double h = out.gram[map(a) * out.dim + map(b)];
      if (a <= d && b <= d) h += typ.gram[a * typ.dim + b];
      H_[a * dim + b] = h;
    }
  }
  c_ = typ.target_sq + out.target_sq;
}

double IncrementalProblem::smooth_value(std::span<const double> theta) const {
  const std::size_t dim = g_.size();
  double quad = 0.0, lin = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < dim; ++b) row += H_[a * dim + b] * theta[b];
    quad += theta[a] * row;
    lin += g_[a] * theta[a];
  }
  return quad - 2.0 * lin + c_;
}

std::vector<double> IncrementalProblem::smooth_gradient(std::span<const double> theta) const {
  const std::size_t dim = g_.size();
  std::vector<double> grad(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < dim; ++b) row += H_[a * dim + b] * theta[b];
    grad[a] = 2.0 * (row - g_[a]);
  }
  return grad;
}

double IncrementalProblem::rowwise_smooth_loss(const LinearFactorModel& base,
                                               std::span<const double> delta) const {
  const std::size_t d = X_.cols();
  double loss = 0.0;
  for (std::size_t k = 0; k < X_.rows(); ++k) {
    const bool outlier = subspace_of(rule_, X_.row(k)) == Subspace::kOutlier;
    double est = base.intercept + (outlier ? delta[0] : 0.0);
    for (std::size_t r = 0; r < d; ++r)
      est += (base.factors[r] + (outlier ? delta[r + 1] : 0.0)) * X_(k, r);
    const double e = est - yhat_[k];
    loss += e * e;
  }
  return loss;
}

namespace {

// Exact minimizer on the iterate's active set, accepted only when it keeps
// the iterate's delta signs and satisfies the optimality conditions of the
// excluded coordinates.
bool polish(const IncrementalProblem& prob, std::span<const double> weights,
            std::vector<double>& theta) {
  const std::size_t dim = theta.size();
  const std::size_t base_dim = dim / 2;
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < dim; ++j)
    if (j < base_dim || theta[j] != 0.0) free.push_back(j);

  const auto& H = prob.hessian_half();
  const auto& g = prob.linear_term();
  const std::size_t m = free.size();
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = free[i];
    const double sign = theta[a] > 0.0 ? 1.0 : (theta[a] < 0.0 ? -1.0 : 0.0);
    b(i) = g[a] - 0.5 * weights[a] * sign;
    for (std::size_t k = 0; k < m; ++k) A(i, k) = H[a * dim + free[k]];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd sol = llt.solve(b);

  std::vector<double> cand(dim, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t a = free[i];
    if (a >= base_dim && (sol(i) > 0.0) != (theta[a] > 0.0)) return false;
    cand[a] = sol(i);
  }
  const std::vector<double> grad = prob.smooth_gradient(cand);
  double gscale = 0.0;
  for (double v : g) gscale = std::max(gscale, std::abs(v));
  for (std::size_t j = base_dim; j < dim; ++j)
    if (cand[j] == 0.0 && std::abs(grad[j]) > weights[j] * (1.0 + 1e-9) + 1e-12 * gscale)
      return false;

  const auto objective = [&](const std::vector<double>& t) {
    double p = 0.0;
    for (std::size_t j = 0; j < dim; ++j) p += weights[j] * std::abs(t[j]);
    return prob.smooth_value(t) + p;
  };
  const double before = objective(theta);
  if (!(objective(cand) <= before + 1e-12 * std::abs(before))) return false;
  theta = std::move(cand);
  return true;
}

}  // namespace

IncrementalModel fit_incremental(const FeatureMatrix& X, std::span<const double> yhat,
                                 double lambda, std::optional<PartitionRule> rule,
                                 const IncrementalOptions& opts) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw UserError("incremental: lambda must be a finite value >= 0");
  if (!rule) rule = fit_subglobal(X, yhat, opts.split).rule;

  const IncrementalProblem prob(X, yhat, *rule);
  const auto& coords = prob.coords();
  const double n = static_cast<double>(prob.rows());
  const std::vector<double> weights = coords.l1_weights(lambda);
  std::vector<double> scaled(weights);
  for (double& w : scaled) w /= n;

  const SmoothObjective f = [&](std::span<const double> theta, std::span<double> grad) {
    if (!grad.empty()) {
      const std::vector<double> g = prob.smooth_gradient(theta);
      for (std::size_t j = 0; j < g.size(); ++j) grad[j] = g[j] / n;
    }
    return prob.smooth_value(theta) / n;
  };

  const GlobalModel start = fit_global(X, yhat);
  std::vector<double> theta0 =
      coords.from_raw(start.model, std::vector<double>(X.cols() + 1, 0.0));
  ProximalResult res = minimize_l1_composite(f, scaled, std::move(theta0), opts.solver);

  IncrementalModel model;
  model.rule = *rule;
  model.lambda = lambda;
  model.info.iterations = res.iterations;
  model.info.converged = res.converged;
  if (opts.polish) model.info.polished = polish(prob, weights, res.x);

  auto [base, delta] = coords.to_raw(res.x);
  for (double& v : delta)
    if (std::abs(v) < opts.snap) v = 0.0;
  if (!base.is_finite())
    throw NumericalError("incremental: non-finite weights after optimization");
  model.base = std::move(base);
  model.delta = std::move(delta);
  model.info.final_loss =
      prob.rowwise_smooth_loss(model.base, model.delta) + lambda * model.delta_l1();
  return model;
}

LambdaSelection select_lambda(const FeatureMatrix& X, std::span<const double> yhat,
                              const PartitionRule& rule, const IncrementalOptions& opts) {
  const RulePartition part = partition_rows(X, rule);
  const double unit =
      static_cast<double>(part.outlier.size()) / static_cast<double>(X.rows());
  LambdaSelection sel;
  sel.grid = {0.0, 1.0 * unit, 10.0 * unit, 100.0 * unit, 1000.0 * unit};
  for (double lambda : sel.grid) {
    const IncrementalModel m = fit_incremental(X, yhat, lambda, rule, opts);
    double sum = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) sum += std::abs(m.estimate(X.row(i)) - yhat[i]);
    sel.train_score.push_back(sum / static_cast<double>(X.rows()));
  }
  sel.lambda = 0.0;
  for (std::size_t i = 1; i < sel.grid.size(); ++i)
    if (sel.train_score[i] <= 1.05 * sel.train_score[0]) sel.lambda = sel.grid[i];
  return sel;
}

}  // namespace ixai
