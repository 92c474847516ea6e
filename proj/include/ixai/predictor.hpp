#pragma once

#include <span>
#include <vector>

#include "ixai/matrix.hpp"

namespace ixai {

// Anything an explainer can be fit against: the forest, or in tests an exact
// closed-form function.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double predict(std::span<const double> x) const = 0;
  virtual std::vector<double> predict_batch(const FeatureMatrix& X) const;
};

}  // namespace ixai
