#pragma once

// Extended Floater-Hormann interpolants: the grid is continued by d nodes on
// each side, the data are continued by a linear extrapolation map, and the
// usual FH interpolant with parameter d is applied to the longer sequence.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fhx/fh.hpp"
#include "fhx/grid.hpp"
#include "fhx/mp.hpp"
#include "fhx/offset_vector.hpp"
#include "fhx/precision.hpp"
#include "fhx/weights.hpp"

namespace fhx {

/// Parameters (n, d, ntilde, dtilde) of an extended interpolant.
struct ExtendedConfig {
  int n = 0;
  int d = 0;
  int ntilde = 0;
  int dtilde = 0;

  static ExtendedConfig make(int n, int d, int ntilde, int dtilde) {
    ExtendedConfig c{n, d, ntilde, dtilde};
    c.validate();
    return c;
  }

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const {
    if (n < 1) throw std::invalid_argument("constraint n >= 1 violated (n=" + std::to_string(n) + ")");
    if (d < 0) throw std::invalid_argument("constraint d >= 0 violated (d=" + std::to_string(d) + ")");
    if (dtilde < 0) {
      throw std::invalid_argument("constraint dtilde >= 0 violated (dtilde=" + std::to_string(dtilde) + ")");
    }
    if (dtilde > ntilde) {
      throw std::invalid_argument("constraint dtilde <= ntilde violated (dtilde=" +
                                  std::to_string(dtilde) + ", ntilde=" + std::to_string(ntilde) + ")");
    }
    if (ntilde >= n) {
      throw std::invalid_argument("constraint ntilde < n violated (ntilde=" + std::to_string(ntilde) +
                                  ", n=" + std::to_string(n) + ")");
    }
    if (d > 61) throw std::invalid_argument("constraint d <= 61 violated");
    if (dtilde > kMaxDerivativeOrder) {
      throw std::invalid_argument("constraint dtilde <= " + std::to_string(kMaxDerivativeOrder) +
                                  " violated");
    }
  }

  int mu() const { return std::min(d, dtilde); }
  bool two_sided_overlap() const { return 2 * ntilde >= n; }

  friend bool operator==(const ExtendedConfig&, const ExtendedConfig&) = default;
};

/// Taylor extrapolation coefficients a(i, j), -d <= i < 0, 0 <= j <= ntilde, and
/// b(i, j), 0 < i <= d, -ntilde <= j <= 0.
template <class Real>
class ExtrapolationMap {
 public:
  ExtrapolationMap() = default;
  ExtrapolationMap(int ntilde, int dtilde, int d, std::vector<Real> a, std::vector<Real> b)
      : ntilde_(ntilde), dtilde_(dtilde), d_(d), a_(std::move(a)), b_(std::move(b)) {}

  int ntilde() const { return ntilde_; }
  int dtilde() const { return dtilde_; }
  int d() const { return d_; }

  const Real& a(int i, int j) const {
    return a_[static_cast<std::size_t>((i + d_) * (ntilde_ + 1) + j)];
  }
  const Real& b(int i, int j) const {
    return b_[static_cast<std::size_t>((i - 1) * (ntilde_ + 1) + (j + ntilde_))];
  }

  std::span<const Real> a_entries() const { return a_; }
  std::span<const Real> b_entries() const { return b_; }

  template <class U>
  ExtrapolationMap<U> convert() const {
    std::vector<U> a, b;
    a.reserve(a_.size());
    b.reserve(b_.size());
    for (const auto& v : a_) a.push_back(numeric_cast<U>(v));
    for (const auto& v : b_) b.push_back(numeric_cast<U>(v));
    return ExtrapolationMap<U>(ntilde_, dtilde_, d_, std::move(a), std::move(b));
  }

 private:
  int ntilde_ = 0;
  int dtilde_ = 0;
  int d_ = 0;
  std::vector<Real> a_;
  std::vector<Real> b_;
};

/// Arbitrary linear extrapolation y~_i = sum_j h(i, j) y_j for i in {-d..-1, n+1..n+d}.
template <class Real>
class GeneralExtrapolationMap {
 public:
  GeneralExtrapolationMap(int n, int d)
      : n_(n), d_(d), h_(static_cast<std::size_t>(2 * d) * (static_cast<std::size_t>(n) + 1), Real(0)) {}

  int n() const { return n_; }
  int d() const { return d_; }

  const Real& operator()(int i, int j) const { return h_[offset(i, j)]; }
  Real& operator()(int i, int j) { return h_[offset(i, j)]; }

  static GeneralExtrapolationMap zero(int n, int d) { return GeneralExtrapolationMap(n, d); }

  /// Dense form of a Taylor map: zeros outside the first/last ntilde+1 columns.
  static GeneralExtrapolationMap from_taylor(const ExtrapolationMap<Real>& map, int n) {
    if (map.ntilde() > n) throw std::invalid_argument("map ntilde exceeds n");
    GeneralExtrapolationMap g(n, map.d());
    for (int i = -map.d(); i < 0; ++i) {
      for (int j = 0; j <= map.ntilde(); ++j) g(i, j) = map.a(i, j);
    }
    for (int i = 1; i <= map.d(); ++i) {
      for (int j = -map.ntilde(); j <= 0; ++j) g(n + i, n + j) = map.b(i, j);
    }
    return g;
  }

 private:
  std::size_t offset(int i, int j) const {
    const int row = i < 0 ? i + d_ : (i - n_ - 1) + d_;
    if (j < 0 || j > n_ || !((i >= -d_ && i < 0) || (i > n_ && i <= n_ + d_))) {
      throw std::out_of_range("general extrapolation index outside map");
    }
    return static_cast<std::size_t>(row) * (static_cast<std::size_t>(n_) + 1) + static_cast<std::size_t>(j);
  }

  int n_;
  int d_;
  std::vector<Real> h_;
};

/// a(i,j) = sum_k Ebar^(k)_{0j} i^k and b(i,j) = sum_k Ebar^(k)_{ntilde,j+ntilde} i^k, computed in Real.
template <class Real>
ExtrapolationMap<Real> extrapolation_coeffs(int ntilde, int dtilde, int d) {
  if (dtilde > ntilde) {
    throw std::invalid_argument("constraint dtilde <= ntilde violated (dtilde=" +
                                std::to_string(dtilde) + ", ntilde=" + std::to_string(ntilde) + ")");
  }
  if (d < 0) throw std::invalid_argument("constraint d >= 0 violated");
  const auto w = fh_weights<Real>(ntilde, dtilde);
  const auto left = derivative_row<Real>(w, Real(1), dtilde, 0, true);
  const auto right = derivative_row<Real>(w, Real(1), dtilde, ntilde, true);
  const auto cols = static_cast<std::size_t>(ntilde) + 1;
  std::vector<Real> a, b;
  a.reserve(static_cast<std::size_t>(d) * cols);
  b.reserve(static_cast<std::size_t>(d) * cols);
  for (int i = -d; i < 0; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      Real s(0);
      Real ik(1);
      for (int k = 0; k <= dtilde; ++k) {
        if (k > 0) ik *= Real(i);
        s += left[static_cast<std::size_t>(k)][j] * ik;
      }
      a.push_back(std::move(s));
    }
  }
  for (int i = 1; i <= d; ++i) {
    for (int j = -ntilde; j <= 0; ++j) {
      Real s(0);
      Real ik(1);
      for (int k = 0; k <= dtilde; ++k) {
        if (k > 0) ik *= Real(i);
        s += right[static_cast<std::size_t>(k)][static_cast<std::size_t>(j + ntilde)] * ik;
      }
      b.push_back(std::move(s));
    }
  }
  return ExtrapolationMap<Real>(ntilde, dtilde, d, std::move(a), std::move(b));
}

inline constexpr int kDefaultCoefficientBits = 320;

/// Coefficients computed with `bits` of precision and rounded to double; cached per (ntilde, dtilde, d, bits).
inline std::shared_ptr<const ExtrapolationMap<double>> taylor_map(int ntilde, int dtilde, int d,
                                                                  int bits = kDefaultCoefficientBits) {
  using Key = std::tuple<int, int, int, int>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const ExtrapolationMap<double>>> cache;
  const Key key{ntilde, dtilde, d, bits};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::unique_lock lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::shared_ptr<const ExtrapolationMap<double>> map;
  {
    mp::ScopedContext ctx(bits, mp::Rounding::nearest);
    map = std::make_shared<const ExtrapolationMap<double>>(
        extrapolation_coeffs<mp::Real>(ntilde, dtilde, d).template convert<double>());
  }
  cache.emplace(key, map);
  return map;
}

/// y~ = (a y, y, b y) over indices -d..n+d.
template <class Real, class YReal>
OffsetVector<Real> extrapolate_matrix(std::span<const YReal> y, const ExtrapolationMap<Real>& map) {
  if (y.empty()) throw std::invalid_argument("extrapolation needs data");
  const int n = static_cast<int>(y.size()) - 1;
  if (map.ntilde() > n) {
    throw std::invalid_argument("map dimension mismatch: ntilde=" + std::to_string(map.ntilde()) +
                                " exceeds n=" + std::to_string(n));
  }
  const int d = map.d();
  OffsetVector<Real> out(-d, n + d, Real(0));
  for (int i = 0; i <= n; ++i) out[i] = numeric_cast<Real>(y[static_cast<std::size_t>(i)]);
  for (int i = -d; i < 0; ++i) {
    Real s(0);
    for (int j = 0; j <= map.ntilde(); ++j) s += map.a(i, j) * out[j];
    out[i] = std::move(s);
  }
  for (int i = 1; i <= d; ++i) {
    Real s(0);
    for (int j = -map.ntilde(); j <= 0; ++j) s += map.b(i, j) * out[n + j];
    out[n + i] = std::move(s);
  }
  return out;
}

/// Matrix-route extrapolation with each extrapolated value computed under the policy's context for its index.
template <class YReal>
OffsetVector<mp::Real> extrapolate_matrix(std::span<const YReal> y, const ExtrapolationMap<mp::Real>& map,
                                          const PrecisionPolicy& policy) {
  const int n = static_cast<int>(y.size()) - 1;
  const int d = map.d();
  if (map.ntilde() > n) throw std::invalid_argument("map dimension mismatch");
  std::vector<mp::Real> yr;
  {
    mp::ScopedContext ctx(policy.context());
    for (const auto& v : y) yr.push_back(numeric_cast<mp::Real>(v));
  }
  OffsetVector<mp::Real> out(-d, n + d, mp::Real(0));
  for (int i = -d; i <= n + d; ++i) {
    mp::ScopedContext ctx(policy.context_for_index(i));
    mp::Real s(0);
    if (i < 0) {
      for (int j = 0; j <= map.ntilde(); ++j) s += map.a(i, j) * yr[static_cast<std::size_t>(j)];
    } else if (i > n) {
      for (int j = -map.ntilde(); j <= 0; ++j) {
        s += map.b(i - n, j) * yr[static_cast<std::size_t>(n + j)];
      }
    } else {
      s = yr[static_cast<std::size_t>(i)];
    }
    out[i] = std::move(s);
  }
  return out;
}

namespace detail {

// Discrete Taylor value at offset `steps` (negative: left of x_0, positive:
// right of x_n) from the boundary node, using FH derivatives with parameter
// dtilde on the ntilde+1 boundary nodes. `local` holds those node values in order.
template <class Real>
Real taylor_value(std::span<const Real> local, int dtilde, const Real& h, int steps, bool right) {
  const int ntilde = static_cast<int>(local.size()) - 1;
  const auto w = fh_weights<Real>(ntilde, dtilde);
  const int row = right ? ntilde : 0;
  const auto rows = derivative_row<Real>(w, h, dtilde, row, false);
  const Real dx = Real(steps) * h;
  Real value = local[static_cast<std::size_t>(row)];
  Real factor(1);  // dx^k / k!
  for (int k = 1; k <= dtilde; ++k) {
    Real deriv(0);
    const auto& ek = rows[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < local.size(); ++j) deriv += ek[j] * local[j];
    factor = factor * dx / Real(k);
    value += deriv * factor;
  }
  return value;
}

}  // namespace detail

/// Taylor-route extrapolation carried out entirely in Real under the current context.
template <class Real, class YReal>
OffsetVector<Real> extrapolate_taylor(const EquispacedGrid& grid, const ExtendedConfig& cfg,
                                      std::span<const YReal> y) {
  cfg.validate();
  if (cfg.n != grid.n()) throw std::invalid_argument("config n does not match grid");
  detail::require_size<Real>(y.size(), static_cast<std::size_t>(grid.n()) + 1, "data");
  const int n = cfg.n;
  std::vector<Real> yr;
  yr.reserve(y.size());
  for (const auto& v : y) yr.push_back(numeric_cast<Real>(v));
  const Real h = grid.spacing_as<Real>();
  const std::span<const Real> lo(yr.data(), static_cast<std::size_t>(cfg.ntilde) + 1);
  const std::span<const Real> hi(yr.data() + (n - cfg.ntilde), static_cast<std::size_t>(cfg.ntilde) + 1);
  OffsetVector<Real> out(-cfg.d, n + cfg.d, Real(0));
  for (int i = 0; i <= n; ++i) out[i] = yr[static_cast<std::size_t>(i)];
  for (int i = -cfg.d; i < 0; ++i) out[i] = detail::taylor_value<Real>(lo, cfg.dtilde, h, i, false);
  for (int i = 1; i <= cfg.d; ++i) out[n + i] = detail::taylor_value<Real>(hi, cfg.dtilde, h, i, true);
  return out;
}

/// Taylor-route extrapolation under a precision policy. Each extrapolated
/// value, derivatives included, is computed in the context the policy assigns
/// to its index.
template <class YReal>
OffsetVector<mp::Real> extrapolate_taylor(const EquispacedGrid& grid, const ExtendedConfig& cfg,
                                          std::span<const YReal> y, const PrecisionPolicy& policy) {
  cfg.validate();
  policy.validate();
  if (cfg.n != grid.n()) throw std::invalid_argument("config n does not match grid");
  detail::require_size<double>(y.size(), static_cast<std::size_t>(grid.n()) + 1, "data");
  const int n = cfg.n;
  OffsetVector<mp::Real> out(-cfg.d, n + cfg.d, mp::Real(0));
  for (int i = -cfg.d; i <= n + cfg.d; ++i) {
    mp::ScopedContext ctx(policy.context_for_index(i));
    if (i >= 0 && i <= n) {
      out[i] = numeric_cast<mp::Real>(y[static_cast<std::size_t>(i)]);
      continue;
    }
    const bool right = i > n;
    const int start = right ? n - cfg.ntilde : 0;
    std::vector<mp::Real> local;
    for (int j = 0; j <= cfg.ntilde; ++j) local.push_back(numeric_cast<mp::Real>(y[static_cast<std::size_t>(start + j)]));
    const mp::Real h = grid.spacing_as<mp::Real>();
    out[i] = detail::taylor_value<mp::Real>(local, cfg.dtilde, h, right ? i - n : i, right);
  }
  return out;
}

/// Barycentric evaluation over the extended nodes -d..n+d.
template <class Real>
Real extended_eval(const ExtendedGrid& gridx, const WeightVector<Real>& w, const OffsetVector<Real>& ytilde,
                   const Real& t) {
  if (w.first_index() != gridx.first_index() || w.last_index() != gridx.last_index() ||
      ytilde.first_index() != gridx.first_index() || ytilde.last_index() != gridx.last_index()) {
    throw std::invalid_argument("extended evaluation index ranges do not match");
  }
  const auto x = gridx.nodes_as<Real>();
  return detail::barycentric<Real>(x, w.values(), ytilde.values(), t);
}

/// Q(t) = sum_{i=-d}^{n+d} w~_i / (t - x~_i).
template <class Real>
Real extended_denominator(const ExtendedGrid& gridx, const WeightVector<Real>& w, const Real& t) {
  Real q(0);
  const Real h = gridx.base().spacing_as<Real>();
  const Real a(gridx.base().a());
  for (int i = gridx.first_index(); i <= gridx.last_index(); ++i) q += w[i] / (t - (a + Real(i) * h));
  return q;
}

enum class ReducedBranch { disjoint, overlap };

inline ReducedBranch default_branch(const ExtendedConfig& cfg) {
  return 2 * cfg.ntilde < cfg.n ? ReducedBranch::disjoint : ReducedBranch::overlap;
}

namespace detail {

template <class Real>
struct OffGridFactors {
  // g_i = w~_i / (t - x~_i) for the 2d extrapolated nodes.
  OffsetVector<Real> g;
  std::vector<Real> mid;  // w~_j / (t - x_j), 0 <= j <= n
};

template <class Real>
OffGridFactors<Real> off_grid_factors(const ExtendedGrid& gridx, const WeightVector<Real>& w, const Real& t) {
  const int n = gridx.n();
  const int d = gridx.d();
  const Real h = gridx.base().spacing_as<Real>();
  const Real a(gridx.base().a());
  OffGridFactors<Real> f{OffsetVector<Real>(-d, n + d, Real(0)), {}};
  f.mid.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = -d; i <= n + d; ++i) {
    const Real xi = a + Real(i) * h;
    if (t == xi) throw std::invalid_argument("reduced coefficients are undefined at a node");
    Real gi = w[i] / (t - xi);
    if (i >= 0 && i <= n) f.mid.push_back(gi);
    f.g[i] = std::move(gi);
  }
  return f;
}

}  // namespace detail

namespace detail {

template <class Real>
std::vector<Real> reduced_from_factors(const ExtendedConfig& cfg, const ExtrapolationMap<Real>& map,
                                       const OffGridFactors<Real>& f, ReducedBranch branch) {
  const int n = cfg.n;
  const int d = cfg.d;
  const int nt = cfg.ntilde;
  if (branch == ReducedBranch::disjoint && 2 * nt >= n) {
    throw std::invalid_argument("disjoint branch requires 2*ntilde < n");
  }
  // For 2*ntilde = n - 1 both branches reduce to the same index ranges.
  if (branch == ReducedBranch::overlap && 2 * nt < n - 1) {
    throw std::invalid_argument("overlap branch requires 2*ntilde >= n - 1");
  }
  std::vector<Real> c;
  c.reserve(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    bool use_left = false;
    bool use_right = false;
    if (branch == ReducedBranch::disjoint) {
      use_left = j <= nt;
      use_right = j >= n - nt;
    } else {
      const bool shared = j >= n - nt && j <= nt;
      use_left = j < n - nt || shared;
      use_right = shared || j > nt;
    }
    Real acc(0);
    if (use_left) {
      for (int i = -d; i < 0; ++i) acc += f.g[i] * map.a(i, j);
    }
    acc += f.mid[static_cast<std::size_t>(j)];
    if (use_right) {
      for (int i = n + 1; i <= n + d; ++i) acc += f.g[i] * map.b(i - n, j - n);
    }
    c.push_back(std::move(acc));
  }
  return c;
}

template <class Real>
void check_reduced_dims(const ExtendedConfig& cfg, const ExtrapolationMap<Real>& map, const ExtendedGrid& gridx) {
  if (map.ntilde() != cfg.ntilde || map.d() != cfg.d || gridx.n() != cfg.n || gridx.d() != cfg.d) {
    throw std::invalid_argument("reduced coefficients: dimension mismatch");
  }
}

}  // namespace detail

/// Reduced-form coefficients c_j(t), 0 <= j <= n, for the Taylor map.
/// Terms are accumulated as (left sum) + middle + (right sum).
template <class Real>
std::vector<Real> reduced_coeffs(const ExtendedConfig& cfg, const ExtrapolationMap<Real>& map,
                                 const WeightVector<Real>& w, const ExtendedGrid& gridx, const Real& t,
                                 std::optional<ReducedBranch> force = std::nullopt) {
  detail::check_reduced_dims(cfg, map, gridx);
  const auto f = detail::off_grid_factors(gridx, w, t);
  return detail::reduced_from_factors(cfg, map, f, force.value_or(default_branch(cfg)));
}

/// d_j(t) for an arbitrary linear extrapolation map, all 0 <= j <= n.
template <class Real>
std::vector<Real> general_reduced_coeffs(const GeneralExtrapolationMap<Real>& map, const WeightVector<Real>& w,
                                         const ExtendedGrid& gridx, const Real& t) {
  const int n = gridx.n();
  const int d = gridx.d();
  if (map.n() != n || map.d() != d) throw std::invalid_argument("general map: dimension mismatch");
  const auto f = detail::off_grid_factors(gridx, w, t);
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    Real acc(0);
    for (int i = -d; i < 0; ++i) acc += f.g[i] * map(i, j);
    acc += f.mid[static_cast<std::size_t>(j)];
    for (int i = n + 1; i <= n + d; ++i) acc += f.g[i] * map(i, j);
    out.push_back(std::move(acc));
  }
  return out;
}

/// Single coefficient d_j(t); same accumulation order as general_reduced_coeffs.
template <class Real>
Real general_reduced_coeff(const GeneralExtrapolationMap<Real>& map, const WeightVector<Real>& w,
                           const ExtendedGrid& gridx, int j, const Real& t) {
  const int n = gridx.n();
  const int d = gridx.d();
  const Real h = gridx.base().spacing_as<Real>();
  const Real a(gridx.base().a());
  Real acc(0);
  for (int i = -d; i < 0; ++i) acc += (w[i] / (t - (a + Real(i) * h))) * map(i, j);
  acc += w[j] / (t - (a + Real(j) * h));
  for (int i = n + 1; i <= n + d; ++i) acc += (w[i] / (t - (a + Real(i) * h))) * map(i, j);
  return acc;
}

/// sum_j c_j y_j / Q.
template <class Real>
Real reduced_eval(std::span<const Real> c, std::span<const Real> y, const Real& q) {
  detail::require_size<Real>(y.size(), c.size(), "data");
  if (q == Real(0)) throw numeric_error("reduced form denominator is zero");
  Real s(0);
  for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * y[j];
  return s / q;
}

/// Everything needed to evaluate one extended interpolant in double precision.
struct ExtendedSetup {
  ExtendedConfig cfg;
  ExtendedGrid gridx;
  WeightVector<double> weights;
  std::shared_ptr<const ExtrapolationMap<double>> map;

  static ExtendedSetup make(double a, double b, const ExtendedConfig& cfg) {
    cfg.validate();
    ExtendedGrid gx = extend(make_equispaced(a, b, cfg.n), cfg.d);
    return ExtendedSetup{cfg, gx, extended_weights<double>(cfg.n, cfg.d),
                         taylor_map(cfg.ntilde, cfg.dtilde, cfg.d)};
  }

  OffsetVector<double> extrapolate(std::span<const double> y) const {
    return extrapolate_matrix<double, double>(y, *map);
  }

  double operator()(const OffsetVector<double>& ytilde, double t) const {
    return extended_eval(gridx, weights, ytilde, t);
  }
};

}  // namespace fhx
