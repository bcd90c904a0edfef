#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wic/diffnum.hpp"
#include "wic/gridworld.hpp"

namespace wic::detail {

// Deduplicated set of network inputs. With `paired`, an input is
// featurize(s) ++ featurize(s0); otherwise featurize(s) alone. Losses that
// touch the same input many times accumulate their upstream gradient in one
// column, so a single forward and backward pass covers the whole batch.
class InputBatch {
 public:
  InputBatch(const GridSpec& spec, bool paired) : spec_(&spec), paired_(paired) {}

  int add(Cell s, Cell s0 = {}) {
    const std::uint64_t key =
        static_cast<std::uint64_t>(spec_->index_of(s)) * static_cast<std::uint64_t>(spec_->cell_count()) +
        (paired_ ? static_cast<std::uint64_t>(spec_->index_of(s0)) : 0U);
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(items_.size()));
    if (inserted) items_.emplace_back(s, s0);
    return it->second;
  }

  int size() const { return static_cast<int>(items_.size()); }

  Matrix inputs() const {
    const int dim = spec_->feature_dim();
    Matrix x(paired_ ? 2 * dim : dim, size());
    for (int j = 0; j < size(); ++j) {
      double* col = x.col(j).data();
      featurize_into(*spec_, items_[j].first, {col, static_cast<std::size_t>(dim)});
      if (paired_)
        featurize_into(*spec_, items_[j].second, {col + dim, static_cast<std::size_t>(dim)});
    }
    return x;
  }

 private:
  const GridSpec* spec_;
  bool paired_;
  std::unordered_map<std::uint64_t, int> index_;
  std::vector<std::pair<Cell, Cell>> items_;
};

}  // namespace wic::detail
