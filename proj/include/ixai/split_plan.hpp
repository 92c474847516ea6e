#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ixai {

// Train/test assignment plus k folds over the training rows.
//
// Construction: shuffle [0, n) with Fisher-Yates under Rng(seed) (see rng.hpp).
// The first round(test_fraction * n) shuffled rows form the test set; the
// training row at shuffled position p gets fold (p - n_test) mod folds.
struct SplitPlan {
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::size_t folds = 5;
  std::vector<int> fold;   // per row; -1 for test rows

  std::size_t size() const { return fold.size(); }
  bool is_test(std::size_t row) const { return fold[row] < 0; }

  // All index lists are ascending.
  std::vector<std::size_t> test_rows() const;
  std::vector<std::size_t> train_rows() const;
  std::vector<std::size_t> fold_train_rows(std::size_t k) const;
  std::vector<std::size_t> fold_validation_rows(std::size_t k) const;
};

SplitPlan make_split_plan(std::size_t n, std::uint64_t seed,
                          double test_fraction = 0.2, std::size_t folds = 5);

}  // namespace ixai
