#include "ixai/local.hpp"

#include <algorithm>
#include <cmath>

#include "ixai/error.hpp"
#include "ixai/least_squares.hpp"
#include "ixai/rng.hpp"

namespace ixai {

bool LocalFit::degenerate() const {
  for (bool d : dropped)
    if (d) return true;
  return false;
}

std::vector<double> feature_std(const FeatureMatrix& X) {
  std::vector<double> out(X.cols(), 0.0);
  if (X.rows() < 2) return out;
  const double n = static_cast<double>(X.rows());
  for (std::size_t c = 0; c < X.cols(); ++c) {
    const auto col = X.col(c);
    double m = 0.0;
    for (double v : col) m += v;
    m /= n;
    double ss = 0.0;
    for (double v : col) ss += (v - m) * (v - m);
    out[c] = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::uint64_t local_seed(std::uint64_t base_seed, std::span<const double> instance) {
  return base_seed ^ fnv1a64(instance);
}

LocalFit fit_local(std::span<const double> target, const Predictor& blackbox,
                   std::span<const double> feature_std, const LocalConfig& config) {
  config.validate();
  const std::size_t d = target.size();
  if (feature_std.size() != d) throw std::invalid_argument("fit_local: std size mismatch");
  for (double v : target)
    if (!std::isfinite(v)) throw UserError("local: target instance contains a non-finite value");

  LocalFit fit;
  fit.dropped.assign(d, false);
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < d; ++j) {
    if (feature_std[j] > 0.0 && std::isfinite(feature_std[j]))
      active.push_back(j);
    else
      fit.dropped[j] = true;
  }

  const std::size_t n = config.n_samples;
  FeatureMatrix samples(n, d);
  std::vector<double> weights(n);
  Rng rng(config.seed);
  const double width2 = config.kernel_width * config.kernel_width;
  for (std::size_t i = 0; i < n; ++i) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (fit.dropped[j]) {
        samples(i, j) = target[j];
        continue;
      }
      const double z = config.perturb_scale * rng.normal();
      samples(i, j) = target[j] + z * feature_std[j];
      dist2 += z * z;
    }
    weights[i] = std::exp(-dist2 / width2);
  }
  const std::vector<double> response = blackbox.predict_batch(samples);

  fit.model.factors.assign(d, 0.0);
  if (active.empty()) {
    double sw = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sw += weights[i];
      swy += weights[i] * response[i];
    }
    fit.model.intercept = swy / sw;
    return fit;
  }
  FeatureMatrix design(n, active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    const auto src = samples.col(active[a]);
    auto dst = design.col(a);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  const OlsFit ols = fit_ols(design, response, weights);
  fit.ridge_fallback = ols.ridge_fallback;
  fit.model.intercept = ols.model.intercept;
  for (std::size_t a = 0; a < active.size(); ++a) fit.model.factors[active[a]] = ols.model.factors[a];
  return fit;
}

}  // namespace ixai
