#include "momt/grid.hpp"

#include <algorithm>

#include "momt/error.hpp"

namespace momt {

Grid::Grid(std::vector<int> arities) : arities_(std::move(arities)) {
  strides_.assign(arities_.size(), 1);
  size_ = 1;
  for (int k = static_cast<int>(arities_.size()) - 1; k >= 0; --k) {
    if (arities_[k] <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "grid arity must be positive");
    }
    strides_[k] = size_;
    size_ *= static_cast<std::size_t>(arities_[k]);
  }
}

std::size_t Grid::ravel(std::span<const int> index) const {
  std::size_t linear = 0;
  for (std::size_t k = 0; k < arities_.size(); ++k) {
    linear += strides_[k] * static_cast<std::size_t>(index[k]);
  }
  return linear;
}

MultiIndex Grid::unravel(std::size_t linear) const {
  MultiIndex index(arities_.size());
  for (std::size_t k = 0; k < arities_.size(); ++k) {
    index[k] = static_cast<int>(linear / strides_[k]);
    linear %= strides_[k];
  }
  return index;
}

bool Grid::contains(std::span<const int> index) const {
  if (index.size() != arities_.size()) return false;
  for (std::size_t k = 0; k < arities_.size(); ++k) {
    if (index[k] < 0 || index[k] >= arities_[k]) return false;
  }
  return true;
}

bool Grid::next(MultiIndex& index) const {
  for (int k = static_cast<int>(arities_.size()) - 1; k >= 0; --k) {
    if (++index[k] < arities_[k]) return true;
    index[k] = 0;
  }
  return false;
}

MultiIndex project_index(std::span<const int> index, std::span<const int> axes) {
  MultiIndex out;
  out.reserve(axes.size());
  for (int a : axes) out.push_back(index[a]);
  return out;
}

std::vector<int> complement_axes(std::span<const int> axes, int n) {
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    if (std::find(axes.begin(), axes.end(), k) == axes.end()) out.push_back(k);
  }
  return out;
}

}  // namespace momt
