#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ixai {

struct ProximalOptions {
  // Stop once an accepted step lowers the objective by less than this
  // fraction of its value.
  double relative_tolerance = 1e-9;
  std::size_t max_iterations = 50000;
};

struct ProximalResult {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Smooth part of the objective. Returns f(x); writes the gradient into grad
// when grad is non-empty.
using SmoothObjective =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

double soft_threshold(double v, double t);

// Minimizes f(x) + sum_j l1_weights[j] * |x[j]| with accelerated proximal
// gradient (FISTA): backtracking on the step size, momentum reset whenever a
// step would raise the objective, so accepted iterates are monotone.
// Throws NumericalError if f stays non-finite as the step shrinks.
ProximalResult minimize_l1_composite(const SmoothObjective& f,
                                     std::span<const double> l1_weights,
                                     std::vector<double> x0,
                                     const ProximalOptions& opts = {});

}  // namespace ixai
