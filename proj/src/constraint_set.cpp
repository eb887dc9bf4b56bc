#include "dagkkt/constraint_set.hpp"

#include <stdexcept>
#include <string>

namespace dagkkt {

ConstraintSet::ConstraintSet(int dimension)
    : d_(dimension), count_(0), mask_() {
  if (dimension < 1) throw std::invalid_argument("ConstraintSet: dimension must be >= 1");
  mask_.assign(static_cast<std::size_t>(d_) * d_, 0);
  for (int i = 0; i < d_; ++i) insert(i, i);
}

ConstraintSet ConstraintSet::full(int dimension) {
  ConstraintSet z(dimension);
  for (int i = 0; i < dimension; ++i)
    for (int j = 0; j < dimension; ++j) z.insert(i, j);
  return z;
}

std::size_t ConstraintSet::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= d_ || j >= d_)
    throw std::out_of_range("ConstraintSet: pair (" + std::to_string(i) + "," +
                            std::to_string(j) + ") out of range");
  return static_cast<std::size_t>(i) * d_ + j;
}

bool ConstraintSet::insert(int i, int j) {
  char& slot = mask_[index(i, j)];
  if (slot) return false;
  slot = 1;
  ++count_;
  return true;
}

bool ConstraintSet::erase(int i, int j) {
  if (i == j) throw std::invalid_argument("ConstraintSet: diagonal pairs are permanent");
  char& slot = mask_[index(i, j)];
  if (!slot) return false;
  slot = 0;
  --count_;
  return true;
}

std::vector<int> ConstraintSet::free_rows(int j) const {
  std::vector<int> rows;
  for (int i = 0; i < d_; ++i)
    if (!contains(i, j)) rows.push_back(i);
  return rows;
}

std::vector<std::pair<int, int>> ConstraintSet::pairs() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(count_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j)
      if (contains(i, j)) out.emplace_back(i, j);
  return out;
}

}  // namespace dagkkt
