#include "ixai/least_squares.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ixai/error.hpp"
#include "ixai/kernels.hpp"

namespace ixai {

namespace {

constexpr double kRidge = 1e-8;
constexpr double kMinRcond = 1e-12;

}  // namespace

double sum_squared_error(const LinearFactorModel& m, const FeatureMatrix& X,
                         std::span<const double> y) {
  const std::vector<double> est = m.estimate_batch(X);
  double s = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double r = y[i] - est[i];
    s += r * r;
  }
  return s;
}

OlsFit fit_ols(const FeatureMatrix& X, std::span<const double> y,
               std::span<const double> weights) {
  const std::size_t n = X.rows();
  const std::size_t d = X.cols();
  if (y.size() != n || (!weights.empty() && weights.size() != n))
    throw std::invalid_argument("fit_ols: size mismatch");
  if (d > kernels::kMaxColumns) throw std::invalid_argument("fit_ols: too many columns");
  if (n == 0) throw NumericalError("least squares on zero rows");

  double wsum = 0.0;
  double ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    wsum += w;
    ybar += w * y[i];
  }
  if (!(wsum > 0.0)) throw NumericalError("least squares with zero total weight");
  ybar /= wsum;

  std::vector<double> mean(d, 0.0), scale(d, 1.0);
  FeatureMatrix Z(n, d);
  for (std::size_t c = 0; c < d; ++c) {
    const auto col = X.col(c);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += (weights.empty() ? 1.0 : weights[i]) * col[i];
    m /= wsum;
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = col[i] - m;
      v += (weights.empty() ? 1.0 : weights[i]) * t * t;
    }
    const double sd = std::sqrt(v / wsum);
    mean[c] = m;
    scale[c] = sd > 0.0 ? sd : 1.0;
    auto z = Z.col(c);
    for (std::size_t i = 0; i < n; ++i) z[i] = (col[i] - m) / scale[c];
  }
  std::vector<double> yc(n);
  for (std::size_t i = 0; i < n; ++i) yc[i] = y[i] - ybar;

  const auto cols = Z.column_pointers();
  const kernels::GramResult g = kernels::weighted_gram(cols, n, weights, yc);
  const std::size_t dim = g.dim;
  Eigen::MatrixXd G(dim, dim);
  Eigen::VectorXd c(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    c(a) = g.moment[a];
    for (std::size_t b = 0; b < dim; ++b) G(a, b) = g.gram[a * dim + b];
  }

  OlsFit fit;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
    const double ridge = kRidge * G.diagonal().mean();
    G.diagonal().array() += ridge > 0.0 ? ridge : kRidge;
    llt.compute(G);
    fit.ridge_fallback = true;
    if (llt.info() != Eigen::Success)
      throw NumericalError("least squares: normal equations not solvable");
  }
  const Eigen::VectorXd beta = llt.solve(c);

  fit.model.factors.resize(d);
  double intercept = ybar + beta(0);
  for (std::size_t r = 0; r < d; ++r) {
    fit.model.factors[r] = beta(r + 1) / scale[r];
    intercept -= fit.model.factors[r] * mean[r];
  }
  fit.model.intercept = intercept;
  if (!fit.model.is_finite()) throw NumericalError("least squares produced non-finite weights");

  const std::vector<double> est = fit.model.estimate_batch(X);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - est[i];
    fit.sse += (weights.empty() ? 1.0 : weights[i]) * r * r;
  }
  return fit;
}

GlobalModel fit_global(const FeatureMatrix& X, std::span<const double> yhat) {
  if (X.rows() < 6)
    throw UserError("global explainer needs at least 6 rows, got " +
                    std::to_string(X.rows()));
  OlsFit ols = fit_ols(X, yhat);
  GlobalModel g;
  g.model = std::move(ols.model);
  g.info.ridge_fallback = ols.ridge_fallback;
  g.info.final_loss = ols.sse;
  return g;
}

}  // namespace ixai
