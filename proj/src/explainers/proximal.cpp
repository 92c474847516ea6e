#include "ixai/proximal.hpp"

#include <cmath>
#include <sstream>

#include "ixai/error.hpp"

namespace ixai {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

namespace {

double penalty(std::span<const double> w, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * std::abs(x[j]);
  return s;
}

constexpr double kMaxLipschitz = 1e300;

}  // namespace

ProximalResult minimize_l1_composite(const SmoothObjective& f,
                                     std::span<const double> l1_weights,
                                     std::vector<double> x0,
                                     const ProximalOptions& opts) {
  const std::size_t n = x0.size();
  if (l1_weights.size() != n)
    throw std::invalid_argument("minimize_l1_composite: weight size mismatch");

  std::vector<double> x = std::move(x0);
  std::vector<double> gx(n), y(n), gy(n), z(n), diff(n);
  double fx = f(x, gx);
  if (!std::isfinite(fx)) throw NumericalError("objective is non-finite at the start point");
  double F = fx + penalty(l1_weights, x);

  y = x;
  gy = gx;
  double fy = fx;
  double t = 1.0;
  bool at_x = true;  // y == x, so a failed step cannot be retried from a better point

  // Initial curvature guess from a short gradient step.
  double L = 1.0;
  {
    double gnorm = 0.0;
    for (double g : gx) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm > 0.0) {
      const double h = 1e-4 / gnorm;
      std::vector<double> xs(n), gs(n);
      for (std::size_t j = 0; j < n; ++j) xs[j] = x[j] - h * gx[j];
      if (std::isfinite(f(xs, gs))) {
        double num = 0.0;
        for (std::size_t j = 0; j < n; ++j) num += (gs[j] - gx[j]) * (gs[j] - gx[j]);
        const double est = std::sqrt(num) / (h * gnorm);
        if (est > 0.0 && std::isfinite(est)) L = est;
      }
    }
  }

  ProximalResult result;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    result.iterations = it;
    double fz = 0.0;
    for (;;) {
      for (std::size_t j = 0; j < n; ++j) {
        z[j] = soft_threshold(y[j] - gy[j] / L, l1_weights[j] / L);
        diff[j] = z[j] - y[j];
      }
      fz = f(z, {});
      double lin = 0.0, sq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        lin += gy[j] * diff[j];
        sq += diff[j] * diff[j];
      }
      const double slack = 1e-12 * std::abs(fy);
      if (std::isfinite(fz) && fz <= fy + lin + 0.5 * L * sq + slack) break;
      L *= 2.0;
      if (L > kMaxLipschitz) {
        std::ostringstream msg;
        msg << "proximal gradient diverged: objective non-finite at step size " << 1.0 / L;
        throw NumericalError(msg.str());
      }
    }

    const double Fz = fz + penalty(l1_weights, z);
    if (!(Fz <= F)) {
      if (at_x) {
        // A plain proximal step from the incumbent no longer descends.
        result.converged = true;
        break;
      }
      y = x;
      fy = f(y, gy);
      t = 1.0;
      at_x = true;
      continue;
    }

    const double decrease = (F - Fz) / std::max(std::abs(Fz), 1e-300);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    for (std::size_t j = 0; j < n; ++j) y[j] = z[j] + beta * (z[j] - x[j]);
    x.swap(z);
    F = Fz;
    t = t_next;
    at_x = beta == 0.0;
    fy = f(y, gy);
    if (!std::isfinite(fy)) {
      // Momentum overshot into a non-finite region; restart from x.
      y = x;
      fy = f(y, gy);
      t = 1.0;
      at_x = true;
    }
    L *= 0.95;
    if (decrease < opts.relative_tolerance) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(x);
  result.objective = F;
  return result;
}

}  // namespace ixai
