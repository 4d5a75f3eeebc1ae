#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fhx {

/// A contiguous sequence indexed from an arbitrary (possibly negative) first index.
template <class T>
class OffsetVector {
 public:
  OffsetVector() = default;

  OffsetVector(int first, std::vector<T> values)
      : first_(first), values_(std::move(values)) {}

  OffsetVector(int first, int last, const T& fill)
      : first_(first),
        values_(last >= first ? static_cast<std::size_t>(last - first + 1) : 0, fill) {}

  int first_index() const { return first_; }
  int last_index() const { return first_ + static_cast<int>(values_.size()) - 1; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  bool contains(int i) const { return i >= first_ && i <= last_index(); }

  T& operator[](int i) { return values_[static_cast<std::size_t>(i - first_)]; }
  const T& operator[](int i) const { return values_[static_cast<std::size_t>(i - first_)]; }

  T& at(int i) {
    check(i);
    return (*this)[i];
  }
  const T& at(int i) const {
    check(i);
    return (*this)[i];
  }

  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }

  /// Elements with index in [first, last] as a span.
  std::span<const T> slice(int first, int last) const {
    check(first);
    check(last);
    return std::span<const T>(values_).subspan(static_cast<std::size_t>(first - first_),
                                               static_cast<std::size_t>(last - first + 1));
  }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  void check(int i) const {
    if (!contains(i)) {
      throw std::out_of_range("index " + std::to_string(i) + " outside [" +
                              std::to_string(first_) + ", " + std::to_string(last_index()) + "]");
    }
  }

  int first_ = 0;
  std::vector<T> values_;
};

}  // namespace fhx
