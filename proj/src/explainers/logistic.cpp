#include "ixai/logistic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ixai/error.hpp"
#include "ixai/split_search.hpp"

namespace ixai {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void check_labels(std::span<const double> labels) {
  for (double v : labels)
    if (v != 0.0 && v != 1.0) throw UserError("logistic fit needs labels in {0, 1}");
}

double log_loss_sum(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) s += softplus(eta(i)) - y(i) * eta(i);
  return s;
}

}  // namespace

double mean_log_loss(std::span<const double> logits, std::span<const double> labels) {
  if (logits.size() != labels.size() || logits.empty())
    throw std::invalid_argument("mean_log_loss: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    s += softplus(logits[i]) - labels[i] * logits[i];
  return s / static_cast<double>(logits.size());
}

GlobalModel fit_logistic(const FeatureMatrix& X, std::span<const double> labels,
                         const LogisticOptions& opts) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (labels.size() != n) throw std::invalid_argument("fit_logistic: size mismatch");
  if (n < 2) throw UserError("logistic fit needs at least 2 rows");
  check_labels(labels);

  std::vector<double> mean(d), scale(d);
  Eigen::MatrixXd A(n, d + 1);
  A.col(0).setOnes();
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = X.col(c);
    double m = 0.0;
    for (double v : col) m += v;
    m /= static_cast<double>(n);
    double var = 0.0;
    for (double v : col) var += (v - m) * (v - m);
    const double sd = std::sqrt(var / static_cast<double>(n));
    mean[c] = m;
    scale[c] = sd > 0.0 ? sd : 1.0;
    for (std::size_t i = 0; i < n; ++i) A(i, c + 1) = (col[i] - m) / scale[c];
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(labels.data(), n);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  double loss = log_loss_sum(A * theta, y);
  GlobalModel out;
  out.info.converged = false;
  for (std::size_t it = 1; it <= opts.max_newton_iterations; ++it) {
    out.info.iterations = it;
    const Eigen::VectorXd eta = A * theta;
    Eigen::VectorXd p(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      p(i) = sigmoid(eta(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    const Eigen::VectorXd grad = A.transpose() * (p - y);
    Eigen::MatrixXd H = A.transpose() * w.asDiagonal() * A;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-14)) {
      H.diagonal().array() += 1e-8 * std::max(H.diagonal().mean(), 1e-300);
      ldlt.compute(H);
      out.info.ridge_fallback = true;
    }
    const Eigen::VectorXd step = ldlt.solve(grad);
    double t = 1.0;
    double next = loss;
    Eigen::VectorXd cand = theta;
    for (int halvings = 0; halvings < 40; ++halvings, t *= 0.5) {
      cand = theta - t * step;
      next = log_loss_sum(A * cand, y);
      if (std::isfinite(next) && next <= loss) break;
    }
    if (!(next <= loss)) break;
    const double decrease = (loss - next) / std::max(loss, 1e-300);
    theta = cand;
    loss = next;
    if (decrease < opts.relative_tolerance) {
      out.info.converged = true;
      break;
    }
  }

  out.model.factors.resize(d);
  double intercept = theta(0);
  for (std::size_t r = 0; r < d; ++r) {
    out.model.factors[r] = theta(r + 1) / scale[r];
    intercept -= out.model.factors[r] * mean[r];
  }
  out.model.intercept = intercept;
  out.info.final_loss = loss;
  if (!out.model.is_finite()) throw NumericalError("logistic fit produced non-finite weights");
  return out;
}

SubglobalModel fit_logistic_subglobal(const FeatureMatrix& X, std::span<const double> labels,
                                      const PartitionRule& rule,
                                      const LogisticOptions& opts) {
  const RulePartition part = partition_rows(X, rule);
  const auto side = [&](const std::vector<std::size_t>& rows) {
    const std::vector<double> ys = select(labels, std::span<const std::size_t>(rows));
    return fit_logistic(X.select_rows(rows), ys, opts);
  };
  GlobalModel typ = side(part.typical);
  GlobalModel out = side(part.outlier);
  SubglobalModel m;
  m.rule = rule;
  m.typical = std::move(typ.model);
  m.outlier = std::move(out.model);
  m.info.iterations = typ.info.iterations + out.info.iterations;
  m.info.converged = typ.info.converged && out.info.converged;
  m.info.ridge_fallback = typ.info.ridge_fallback || out.info.ridge_fallback;
  m.info.final_loss = typ.info.final_loss + out.info.final_loss;
  return m;
}

IncrementalModel fit_logistic_incremental(const FeatureMatrix& X,
                                          std::span<const double> labels, double lambda,
                                          const PartitionRule& rule,
                                          const LogisticOptions& opts) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw UserError("incremental: lambda must be a finite value >= 0");
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  check_labels(labels);
  const IncrementalCoordinates coords(X, 0.0);

  Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(n, coords.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const bool outlier = subspace_of(rule, X.row(i)) == Subspace::kOutlier;
    Phi(i, 0) = 1.0;
    if (outlier) Phi(i, d + 1) = 1.0;
    for (std::size_t r = 0; r < d; ++r) {
      Phi(i, r + 1) = (X(i, r) - coords.mean()[r]) / coords.scale()[r];
      if (outlier) Phi(i, d + 2 + r) = X(i, r) / coords.scale()[r];
    }
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(labels.data(), n);
  const double nd = static_cast<double>(n);

  const SmoothObjective f = [&](std::span<const double> theta, std::span<double> grad) {
    const Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(theta.data(), theta.size());
    const Eigen::VectorXd eta = Phi * t;
    if (!grad.empty()) {
      Eigen::VectorXd r(n);
      for (std::size_t i = 0; i < n; ++i) r(i) = sigmoid(eta(i)) - y(i);
      const Eigen::VectorXd g = Phi.transpose() * r / nd;
      for (Eigen::Index j = 0; j < g.size(); ++j) grad[j] = g(j);
    }
    return log_loss_sum(eta, y) / nd;
  };

  std::vector<double> weights = coords.l1_weights(lambda);
  for (double& w : weights) w /= nd;
  const GlobalModel start = fit_logistic(X, labels, opts);
  ProximalResult res = minimize_l1_composite(
      f, weights, coords.from_raw(start.model, std::vector<double>(d + 1, 0.0)), opts.solver);

  IncrementalModel m;
  m.rule = rule;
  m.lambda = lambda;
  m.info.iterations = res.iterations;
  m.info.converged = res.converged;
  auto [base, delta] = coords.to_raw(res.x);
  for (double& v : delta)
    if (std::abs(v) < 1e-6) v = 0.0;
  m.base = std::move(base);
  m.delta = std::move(delta);
  m.info.final_loss = res.objective * nd;
  return m;
}

LambdaSelection select_logistic_lambda(const FeatureMatrix& X,
                                       std::span<const double> labels,
                                       const PartitionRule& rule,
                                       const LogisticOptions& opts) {
  const RulePartition part = partition_rows(X, rule);
  const double unit =
      static_cast<double>(part.outlier.size()) / static_cast<double>(X.rows());
  LambdaSelection sel;
  sel.grid = {0.0, 1.0 * unit, 10.0 * unit, 100.0 * unit, 1000.0 * unit};
  for (double lambda : sel.grid) {
    const IncrementalModel m = fit_logistic_incremental(X, labels, lambda, rule, opts);
    std::vector<double> logits(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) logits[i] = m.estimate(X.row(i));
    sel.train_score.push_back(mean_log_loss(logits, labels));
  }
  sel.lambda = 0.0;
  for (std::size_t i = 1; i < sel.grid.size(); ++i)
    if (sel.train_score[i] <= 1.05 * sel.train_score[0]) sel.lambda = sel.grid[i];
  return sel;
}

}  // namespace ixai
