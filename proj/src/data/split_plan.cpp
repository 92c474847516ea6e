#include "ixai/split_plan.hpp"

#include <cmath>
#include <numeric>

#include "ixai/error.hpp"
#include "ixai/rng.hpp"

namespace ixai {

SplitPlan make_split_plan(std::size_t n, std::uint64_t seed, double test_fraction,
                          std::size_t folds) {
  if (folds == 0) throw UserError("split plan needs at least one fold");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw UserError("test fraction must lie in [0, 1)");
  const auto n_test = static_cast<std::size_t>(std::round(test_fraction * n));
  if (n < folds || n - n_test < folds)
    throw UserError("split plan: " + std::to_string(n) + " rows cannot fill " +
                    std::to_string(folds) + " folds");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(perm, rng);

  SplitPlan plan;
  plan.seed = seed;
  plan.test_fraction = test_fraction;
  plan.folds = folds;
  plan.fold.assign(n, -1);
  for (std::size_t p = n_test; p < n; ++p)
    plan.fold[perm[p]] = static_cast<int>((p - n_test) % folds);
  return plan;
}

std::vector<std::size_t> SplitPlan::test_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] < 0) out.push_back(i);
  return out;
}

std::vector<std::size_t> SplitPlan::train_rows() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] >= 0) out.push_back(i);
  return out;
}

std::vector<std::size_t> SplitPlan::fold_train_rows(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] >= 0 && static_cast<std::size_t>(fold[i]) != k) out.push_back(i);
  return out;
}

std::vector<std::size_t> SplitPlan::fold_validation_rows(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i)
    if (fold[i] >= 0 && static_cast<std::size_t>(fold[i]) == k) out.push_back(i);
  return out;
}

}  // namespace ixai
