#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhx/mp.hpp"
#include "fhx/offset_vector.hpp"

namespace fhx {

enum class WeightFamily { fh, extended_fh, custom };

/// Barycentric weights together with the index range they are attached to.
template <class Real>
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(OffsetVector<Real> values, WeightFamily family, int n, int param)
      : values_(std::move(values)), family_(family), n_(n), param_(param) {}

  const Real& operator[](int i) const { return values_[i]; }
  int first_index() const { return values_.first_index(); }
  int last_index() const { return values_.last_index(); }
  std::size_t size() const { return values_.size(); }
  std::span<const Real> values() const { return values_.values(); }
  const OffsetVector<Real>& indexed() const { return values_; }

  WeightFamily family() const { return family_; }
  /// n of the underlying grid (the original n for extended weights).
  int n() const { return n_; }
  /// delta for FH weights, d for extended weights.
  int parameter() const { return param_; }

  template <class U>
  WeightVector<U> convert() const {
    std::vector<U> out;
    out.reserve(values_.size());
    for (const auto& v : values_) out.push_back(numeric_cast<U>(v));
    return WeightVector<U>(OffsetVector<U>(first_index(), std::move(out)), family_, n_, param_);
  }

 private:
  OffsetVector<Real> values_;
  WeightFamily family_ = WeightFamily::custom;
  int n_ = 0;
  int param_ = 0;
};

namespace detail {

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;  // exact: c*(n-k+i) is divisible by i
  return static_cast<std::int64_t>(c);
}

}  // namespace detail

/// Integer FH weights (-1)^(i-delta) * sum_{j=max(0,i-delta)}^{min(n-delta,i)} C(delta, i-j).
inline std::vector<std::int64_t> fh_integer_weights(int n, int delta) {
  if (n < 0) throw std::invalid_argument("fh weights need n >= 0");
  if (delta < 0 || delta > n) {
    throw std::invalid_argument("fh weights need 0 <= delta <= n (got delta=" +
                                std::to_string(delta) + ", n=" + std::to_string(n) + ")");
  }
  if (delta > 61) throw std::invalid_argument("fh weights need delta <= 61 to stay in int64");
  std::vector<std::int64_t> w(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    std::int64_t s = 0;
    for (int j = std::max(0, i - delta); j <= std::min(n - delta, i); ++j) {
      s += detail::binomial(delta, i - j);
    }
    w[static_cast<std::size_t>(i)] = ((i - delta) % 2 == 0) ? s : -s;
  }
  return w;
}

template <class Real = double>
WeightVector<Real> fh_weights(int n, int delta) {
  const auto iw = fh_integer_weights(n, delta);
  std::vector<Real> v;
  v.reserve(iw.size());
  for (auto x : iw) v.push_back(Real(x));
  return WeightVector<Real>(OffsetVector<Real>(0, std::move(v)), WeightFamily::fh, n, delta);
}

/// w~_{n,d,i} = w_{n+2d,d,i+d} for -d <= i <= n+d.
template <class Real = double>
WeightVector<Real> extended_weights(int n, int d) {
  if (d < 0) throw std::invalid_argument("extended weights need d >= 0");
  const auto iw = fh_integer_weights(n + 2 * d, d);
  std::vector<Real> v;
  v.reserve(iw.size());
  for (auto x : iw) v.push_back(Real(x));
  return WeightVector<Real>(OffsetVector<Real>(-d, std::move(v)), WeightFamily::extended_fh, n, d);
}

}  // namespace fhx
