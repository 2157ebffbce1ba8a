#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace momt {

// A multi-index into a product of finite atom sets, one entry per axis.
using MultiIndex = std::vector<int>;

enum class Sense { kMin, kMax };

// Row-major (last axis fastest) layout over a product of atom counts. The
// linear order coincides with lexicographic order on multi-indices.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<int> arities);

  const std::vector<int>& arities() const { return arities_; }
  int axes() const { return static_cast<int>(arities_.size()); }
  std::size_t size() const { return size_; }

  std::size_t ravel(std::span<const int> index) const;
  MultiIndex unravel(std::size_t linear) const;
  bool contains(std::span<const int> index) const;

  // Advances `index` to its lexicographic successor; false after the last.
  bool next(MultiIndex& index) const;

 private:
  std::vector<int> arities_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

// Picks the entries of `index` at `axes`.
MultiIndex project_index(std::span<const int> index, std::span<const int> axes);

// Sorted complement of `axes` within 0..n-1.
std::vector<int> complement_axes(std::span<const int> axes, int n);

}  // namespace momt
