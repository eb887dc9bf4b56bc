#pragma once

#include <utility>
#include <vector>

namespace dagkkt {

/// Set of zero-value constraints W_ij = 0 on a d x d matrix. The diagonal is
/// always present and cannot be erased.
class ConstraintSet {
 public:
  explicit ConstraintSet(int dimension);

  /// Diagonal only.
  static ConstraintSet diagonal(int dimension) { return ConstraintSet(dimension); }
  /// Every pair.
  static ConstraintSet full(int dimension);

  int dimension() const { return d_; }
  bool contains(int i, int j) const { return mask_[index(i, j)] != 0; }
  /// Returns true if the pair was not already present.
  bool insert(int i, int j);
  /// Returns true if the pair was present. Throws on diagonal pairs.
  bool erase(int i, int j);
  int size() const { return count_; }
  int off_diagonal_size() const { return count_ - d_; }

  /// Rows i with (i, j) not in the set.
  std::vector<int> free_rows(int j) const;
  /// All pairs, row-major.
  std::vector<std::pair<int, int>> pairs() const;

  bool operator==(const ConstraintSet& other) const {
    return d_ == other.d_ && mask_ == other.mask_;
  }

 private:
  std::size_t index(int i, int j) const;

  int d_;
  int count_;
  std::vector<char> mask_;
};

}  // namespace dagkkt
