#pragma once

// Lebesgue functions and sampled Lebesgue constants for usual, extended and
// polynomial interpolation, plus the worst-case machinery for the lower bound
// Lambda~_{d,d,d} >= kappa_d * Lambda_d.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "fhx/dd.hpp"
#include "fhx/extended.hpp"
#include "fhx/grid.hpp"
#include "fhx/mp.hpp"
#include "fhx/weights.hpp"

namespace fhx {

/// sum |w_j/(t - x_j)| / |sum w_j/(t - x_j)|; 1 at the nodes.
template <class Real = double>
Real fh_lebesgue_function(const EquispacedGrid& grid, const WeightVector<Real>& w, const Real& t) {
  using std::abs;
  const Real h = grid.spacing_as<Real>();
  const Real a(grid.a());
  Real num(0);
  Real den(0);
  for (int j = 0; j <= grid.n(); ++j) {
    const Real xj = a + Real(j) * h;
    if (t == xj) return Real(1);
    const Real g = w[j] / (t - xj);
    num += abs(g);
    den += g;
  }
  return num / abs(den);
}

namespace detail {

template <class Real>
Real lebesgue_from_coeffs(const std::vector<Real>& c, const OffGridFactors<Real>& f) {
  using std::abs;
  Real num(0);
  for (const auto& v : c) num += abs(v);
  Real q(0);
  for (const auto& g : f.g) q += g;
  return num / abs(q);
}

template <class Real>
bool is_extended_node(const ExtendedGrid& gridx, const Real& t) {
  const Real h = gridx.base().spacing_as<Real>();
  const Real a(gridx.base().a());
  for (int i = gridx.first_index(); i <= gridx.last_index(); ++i) {
    if (t == a + Real(i) * h) return true;
  }
  return false;
}

}  // namespace detail

/// sum_j |c_j(t)| / |Q(t)| with the reduced coefficients of the Taylor map; 1 at the nodes.
template <class Real = double>
Real extended_lebesgue_function(const ExtendedConfig& cfg, const ExtrapolationMap<Real>& map,
                                const WeightVector<Real>& w, const ExtendedGrid& gridx, const Real& t) {
  detail::check_reduced_dims(cfg, map, gridx);
  if (detail::is_extended_node(gridx, t)) return Real(1);
  const auto f = detail::off_grid_factors(gridx, w, t);
  return detail::lebesgue_from_coeffs(detail::reduced_from_factors(cfg, map, f, default_branch(cfg)), f);
}

/// Same with the coefficients d_j(t) of an arbitrary linear extrapolation map.
template <class Real = double>
Real extended_lebesgue_function(const GeneralExtrapolationMap<Real>& map, const WeightVector<Real>& w,
                                const ExtendedGrid& gridx, const Real& t) {
  if (detail::is_extended_node(gridx, t)) return Real(1);
  const auto c = general_reduced_coeffs(map, w, gridx, t);
  const auto f = detail::off_grid_factors(gridx, w, t);
  return detail::lebesgue_from_coeffs(c, f);
}

/// sum_{i=-d}^{n+d} |w~_i/(t - x~_i)| / |Q(t)|. This treats the extrapolated
/// values as if they were exact data and is not a bound on the true Lebesgue function.
template <class Real = double>
Real naive_bound_function(const WeightVector<Real>& w, const ExtendedGrid& gridx, const Real& t) {
  using std::abs;
  if (detail::is_extended_node(gridx, t)) return Real(1);
  const auto f = detail::off_grid_factors(gridx, w, t);
  Real num(0);
  Real den(0);
  for (const auto& g : f.g) {
    num += abs(g);
    den += g;
  }
  return num / abs(den);
}

/// A double value of a Lebesgue function and a bound on its rounding error.
struct LebesgueEstimate {
  double value = 1.0;
  double error = 0.0;
};

/// Evaluators that can also report a cheap estimate with an error bound let the
/// scan skip intervals that cannot contain the maximum.
template <class F>
concept EstimatingEvaluator = requires(const F& f, double t) {
  { f.estimate(t) } -> std::same_as<LebesgueEstimate>;
};

/// Relative accuracy the guarded evaluator guarantees for each value.
inline constexpr double kLebesgueGuardTolerance = 1e-6;

/// Extended Lebesgue function of a setup, safe against cancellation.
///
/// Each value is computed in double together with a bound on the rounding
/// error of the reduced coefficients, roughly (2d + 6) u sum_j (|g_j| +
/// sum_i |a_ij| |g_i|) / |Q|. When the bound exceeds kLebesgueGuardTolerance
/// times the value the point is redone in double-double, and if that is still
/// not enough, in MPFR with extra bits for the largest coefficient. For
/// d = ntilde = dtilde = 40 the plain double formula overestimates the
/// constant by a factor of ~300.
class GuardedExtendedLebesgue {
 public:
  explicit GuardedExtendedLebesgue(const ExtendedSetup& s) : setup_(s) {
    const auto& map = *setup_.map;
    std::vector<double> aa, bb;
    double big = 1.0;
    for (double v : map.a_entries()) {
      aa.push_back(std::abs(v));
      big = std::max(big, std::abs(v));
    }
    for (double v : map.b_entries()) {
      bb.push_back(std::abs(v));
      big = std::max(big, std::abs(v));
    }
    abs_map_ = ExtrapolationMap<double>(map.ntilde(), map.dtilde(), map.d(), std::move(aa), std::move(bb));
    const int n = setup_.cfg.n;
    bits_ = 64 + 53 + static_cast<int>(std::ceil(std::log2(big * (n + 2.0 * setup_.cfg.d + 1.0))));
  }

  /// Double value with its rounding-error bound; no MPFR work.
  LebesgueEstimate estimate(double t) const {
    const auto& cfg = setup_.cfg;
    if (detail::is_extended_node(setup_.gridx, t)) return {1.0, 0.0};
    const auto f = detail::off_grid_factors(setup_.gridx, setup_.weights, t);
    const auto branch = default_branch(cfg);
    const auto c = detail::reduced_from_factors(cfg, *setup_.map, f, branch);

    detail::OffGridFactors<double> fa{f.g, f.mid};
    double gsum = 0.0;
    for (int i = fa.g.first_index(); i <= fa.g.last_index(); ++i) {
      fa.g[i] = std::abs(fa.g[i]);
      gsum += fa.g[i];
    }
    for (auto& v : fa.mid) v = std::abs(v);
    const auto bound = detail::reduced_from_factors(cfg, abs_map_, fa, branch);

    double num = 0.0, bsum = 0.0, q = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      num += std::abs(c[j]);
      bsum += bound[j];
    }
    for (int i = f.g.first_index(); i <= f.g.last_index(); ++i) q += f.g[i];
    const double value = num / std::abs(q);
    const double err = error_bound(0x1.0p-53, value, bsum, gsum, q);
    if (err <= kLebesgueGuardTolerance * value) return {value, err};
    dd_evaluations_.fetch_add(1, std::memory_order_relaxed);
    return double_double(t, bsum, gsum);
  }

  double operator()(double t) const {
    const auto e = estimate(t);
    if (e.error <= kLebesgueGuardTolerance * e.value) return e.value;
    escalations_.fetch_add(1, std::memory_order_relaxed);
    return high_precision(t);
  }

  /// Number of points recomputed in MPFR so far.
  std::size_t escalations() const { return escalations_.load(std::memory_order_relaxed); }
  std::size_t dd_evaluations() const { return dd_evaluations_.load(std::memory_order_relaxed); }
  int escalation_bits() const { return bits_; }

 private:
  struct MpData {
    ExtrapolationMap<mp::Real> map;
    WeightVector<mp::Real> weights;
  };

  struct DDData {
    ExtrapolationMap<DD> map;
    OffsetVector<DD> nodes;
  };

  double error_bound(double u, double value, double bsum, double gsum, double q) const {
    const auto& cfg = setup_.cfg;
    return (2.0 * cfg.d + 6.0) * u * bsum / std::abs(q) +
           (cfg.n + 2.0 * cfg.d + 2.0) * u * value * gsum / std::abs(q);
  }

  static DD split(const mp::Real& x) {
    const double hi = static_cast<double>(x);
    return {hi, static_cast<double>(x - mp::Real(hi))};
  }

  const DDData& dd_data() const {
    std::call_once(dd_once_, [&] {
      const auto& cfg = setup_.cfg;
      mp::ScopedContext ctx(kDefaultCoefficientBits, mp::Rounding::nearest);
      const auto m = extrapolation_coeffs<mp::Real>(cfg.ntilde, cfg.dtilde, cfg.d);
      std::vector<DD> a, b;
      for (const auto& v : m.a_entries()) a.push_back(split(v));
      for (const auto& v : m.b_entries()) b.push_back(split(v));
      OffsetVector<DD> x(-cfg.d, cfg.n + cfg.d, DD(0.0));
      const auto& base = setup_.gridx.base();
      const mp::Real h = base.spacing_as<mp::Real>();
      for (int i = -cfg.d; i <= cfg.n + cfg.d; ++i) x[i] = split(mp::Real(base.a()) + mp::Real(i) * h);
      dd_ = std::make_unique<DDData>(
          DDData{ExtrapolationMap<DD>(cfg.ntilde, cfg.dtilde, cfg.d, std::move(a), std::move(b)), std::move(x)});
    });
    return *dd_;
  }

  LebesgueEstimate double_double(double t, double bsum, double gsum) const {
    const auto& cfg = setup_.cfg;
    const auto& dd = dd_data();
    detail::OffGridFactors<DD> f{OffsetVector<DD>(-cfg.d, cfg.n + cfg.d, DD(0.0)), {}};
    DD q(0.0);
    for (int i = -cfg.d; i <= cfg.n + cfg.d; ++i) {
      f.g[i] = DD(setup_.weights[i]) / (DD(t) - dd.nodes[i]);
      q += f.g[i];
      if (i >= 0 && i <= cfg.n) f.mid.push_back(f.g[i]);
    }
    const auto c = detail::reduced_from_factors(cfg, dd.map, f, default_branch(cfg));
    DD num(0.0);
    for (const auto& v : c) num += abs(v);
    const double qd = static_cast<double>(q);
    const double value = static_cast<double>(num / abs(q));
    // A few bits below the nominal 106 to cover the quotient and splitting.
    return {value, error_bound(0x1.0p-100, value, bsum, gsum, qd)};
  }

  double high_precision(double t) const {
    const auto& cfg = setup_.cfg;
    mp::ScopedContext ctx(bits_, mp::Rounding::nearest);
    std::call_once(mp_once_, [&] {
      mp_ = std::make_unique<MpData>(MpData{extrapolation_coeffs<mp::Real>(cfg.ntilde, cfg.dtilde, cfg.d),
                                            extended_weights<mp::Real>(cfg.n, cfg.d)});
    });
    const mp::Real v = extended_lebesgue_function<mp::Real>(cfg, mp_->map, mp_->weights, setup_.gridx, mp::Real(t));
    return static_cast<double>(v);
  }

  ExtendedSetup setup_;
  ExtrapolationMap<double> abs_map_;
  int bits_ = 128;
  mutable std::once_flag dd_once_;
  mutable std::unique_ptr<DDData> dd_;
  mutable std::once_flag mp_once_;
  mutable std::unique_ptr<MpData> mp_;
  mutable std::atomic<std::size_t> escalations_{0};
  mutable std::atomic<std::size_t> dd_evaluations_{0};
};

struct LebesgueReport {
  double constant = 1.0;
  double argmax_t = 0.0;
  int samples_per_interval = 256;
  double refinement_tolerance = 1e-6;
  std::optional<double> naive_bound_constant;
  double log_bound = 0.0;  // 2 + ln(n + 2d)
};

inline constexpr int kDefaultLebesgueSamples = 256;
inline constexpr double kLebesgueRefinement = 1e-6;

namespace detail {

struct ScanMax {
  double value = 1.0;
  double argmax = 0.0;
};

// Golden-section maximization on (lo, hi); returns the best point evaluated.
template <class F>
ScanMax golden_max(F& f, double lo, double hi, double width, ScanMax best) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - r * (hi - lo);
  double d = lo + r * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > width) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = f(d);
    }
    if (fc > best.value) best = {fc, c};
    if (fd > best.value) best = {fd, d};
  }
  return best;
}

template <class F>
ScanMax scan_interval(F& f, double x0, double x1, int samples, double tol) {
  // Node values are 1 in the limit.
  std::vector<double> t(static_cast<std::size_t>(samples) + 1);
  std::vector<double> v(static_cast<std::size_t>(samples) + 1, 1.0);
  const double len = x1 - x0;
  t[0] = x0;
  t[static_cast<std::size_t>(samples)] = x1;
  for (int m = 1; m < samples; ++m) {
    const auto um = static_cast<std::size_t>(m);
    t[um] = x0 + len * (static_cast<double>(m) / samples);
    v[um] = f(t[um]);
  }
  ScanMax best{1.0, x0};
  for (int m = 1; m < samples; ++m) {
    const auto um = static_cast<std::size_t>(m);
    if (v[um] > best.value) best = {v[um], t[um]};
  }
  for (int m = 1; m < samples; ++m) {
    const auto um = static_cast<std::size_t>(m);
    if (v[um] >= v[um - 1] && v[um] >= v[um + 1]) {
      best = golden_max(f, t[um - 1], t[um + 1], tol * len, best);
    }
  }
  return best;
}

}  // namespace detail

/// Sampled maximum of f over [x_0, x_n]: a uniform scan of every internodal
/// interval, then golden-section refinement of each local maximum down to
/// tol*h. The result is a lower bound for the true supremum.
template <class F>
LebesgueReport lebesgue_constant(F&& f, const EquispacedGrid& grid,
                                 int samples_per_interval = kDefaultLebesgueSamples,
                                 double tol = kLebesgueRefinement) {
  if (samples_per_interval < 16) {
    throw std::invalid_argument("samples_per_interval must be >= 16 (got " +
                                std::to_string(samples_per_interval) + ")");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("refinement tolerance must be positive");
  detail::ScanMax best{1.0, grid.a()};
  std::vector<int> order(static_cast<std::size_t>(grid.n()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> upper(order.size(), std::numeric_limits<double>::infinity());
  if constexpr (EstimatingEvaluator<std::remove_cvref_t<F>>) {
    // Visit intervals by decreasing upper bound and skip those that cannot win.
    for (int k = 0; k < grid.n(); ++k) {
      const double x0 = grid.node(k);
      const double len = grid.node(k + 1) - x0;
      double u = 1.0;
      for (int m = 1; m < samples_per_interval; ++m) {
        const auto e = f.estimate(x0 + len * (static_cast<double>(m) / samples_per_interval));
        u = std::max(u, e.value + e.error);
      }
      upper[static_cast<std::size_t>(k)] = u;
    }
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
      return upper[static_cast<std::size_t>(l)] > upper[static_cast<std::size_t>(r)];
    });
  }
  for (int k : order) {
    // Slack for refinement between samples, which can only add a little.
    if (upper[static_cast<std::size_t>(k)] * (1.0 + 1e-3) <= best.value) continue;
    const auto m = detail::scan_interval(f, grid.node(k), grid.node(k + 1), samples_per_interval, tol);
    if (m.value > best.value || (m.value == best.value && m.argmax < best.argmax)) best = m;
  }
  LebesgueReport r;
  r.constant = best.value;
  r.argmax_t = best.argmax;
  r.samples_per_interval = samples_per_interval;
  r.refinement_tolerance = tol;
  r.log_bound = 2.0 + std::log(static_cast<double>(grid.n()));
  return r;
}

template <class F>
LebesgueReport lebesgue_constant(F&& f, const ExtendedGrid& gridx,
                                 int samples_per_interval = kDefaultLebesgueSamples,
                                 double tol = kLebesgueRefinement) {
  auto r = lebesgue_constant(f, gridx.base(), samples_per_interval, tol);
  r.log_bound = 2.0 + std::log(static_cast<double>(gridx.n() + 2 * gridx.d()));
  return r;
}

/// Lebesgue constant of the extended interpolant with the Taylor map, together
/// with the maximum of the naive bound function.
inline LebesgueReport extended_lebesgue_report(const ExtendedSetup& s,
                                               int samples_per_interval = kDefaultLebesgueSamples) {
  const GuardedExtendedLebesgue lf(s);
  auto r = lebesgue_constant(lf, s.gridx, samples_per_interval);
  const auto naive = lebesgue_constant(
      [&](double t) { return naive_bound_function<double>(s.weights, s.gridx, t); }, s.gridx,
      samples_per_interval);
  r.naive_bound_constant = naive.constant;
  return r;
}

inline LebesgueReport extended_lebesgue_report(double a, double b, const ExtendedConfig& cfg,
                                               int samples_per_interval = kDefaultLebesgueSamples) {
  return extended_lebesgue_report(ExtendedSetup::make(a, b, cfg), samples_per_interval);
}

struct PolyLebesgue {
  double value = 1.0;          // global maximum over [0, d]
  double first_interval = 1.0;  // maximum over (0, 1)
  double t_star = 0.0;          // argmax in (0, 1)
};

/// Lebesgue function of polynomial interpolation at the nodes 0..d, maximized
/// over (0, 1) first and then over the whole of [0, d].
inline PolyLebesgue poly_lebesgue(int d, int samples_per_interval = 1024) {
  if (d < 1) throw std::invalid_argument("polynomial Lebesgue constant needs d >= 1");
  const EquispacedGrid grid(0.0, static_cast<double>(d), d);
  const auto w = fh_weights<double>(d, d);
  auto f = [&](double t) { return fh_lebesgue_function<double>(grid, w, t); };
  const auto first = detail::scan_interval(f, 0.0, 1.0, samples_per_interval, kLebesgueRefinement);
  PolyLebesgue out{first.value, first.value, first.argmax};
  if (d == 1) out.t_star = 0.5;
  const auto global = lebesgue_constant(f, grid, samples_per_interval);
  if (global.constant > out.value) out.value = global.constant;
  return out;
}

inline double poly_lebesgue_constant(int d) { return poly_lebesgue(d).value; }

/// kappa_d = 1 - d/(2^d - 1) - 2^-d.
inline double kappa(int d) {
  if (d < 2) throw std::invalid_argument("kappa needs d >= 2");
  const double p = std::ldexp(1.0, d);
  return 1.0 - d / (p - 1.0) - 1.0 / p;
}

struct WorstCaseVector {
  std::vector<double> y;
  int d = 0;
};

inline void check_theorem1_params(int n, int d) {
  if (!(d + 1 >= 3)) throw std::invalid_argument("constraint d + 1 >= 3 violated (d=" + std::to_string(d) + ")");
  if (!(n > d + 1)) {
    throw std::invalid_argument("constraint n > d + 1 violated (n=" + std::to_string(n) +
                                ", d=" + std::to_string(d) + ")");
  }
}

/// y*_0 = y*_1 = (-1)^d, y*_j = (-1)^(d+j-1) for j >= 2.
inline WorstCaseVector worst_case_vector(int n, int d) {
  check_theorem1_params(n, d);
  WorstCaseVector v{std::vector<double>(static_cast<std::size_t>(n) + 1), d};
  const double s = (d % 2 == 0) ? 1.0 : -1.0;
  v.y[0] = s;
  v.y[1] = s;
  for (int j = 2; j <= n; ++j) v.y[static_cast<std::size_t>(j)] = ((d + j - 1) % 2 == 0) ? 1.0 : -1.0;
  return v;
}

struct Theorem1Report {
  int n = 0;
  int d = 0;
  double lhs = 0.0;  // |r~[y*](t*)|, a lower bound for Lambda~_{d,d,d}
  double rhs = 0.0;  // kappa_d * Lambda_d
  bool holds = false;
  double sampled_constant = 0.0;
  double kappa = 0.0;
  double poly_constant = 0.0;
  double t_star = 0.0;
};

/// Evaluates the extended interpolant (d = ntilde = dtilde) of y* at the
/// maximizer t* of the polynomial Lebesgue function in (x_0, x_1) on the unit
/// grid 0..n, and compares with kappa_d * Lambda_d.
inline Theorem1Report theorem1_check(int n, int d, int samples_per_interval = kDefaultLebesgueSamples) {
  check_theorem1_params(n, d);
  const auto setup = ExtendedSetup::make(0.0, static_cast<double>(n), ExtendedConfig::make(n, d, d, d));
  const auto poly = poly_lebesgue(d);
  const auto ystar = worst_case_vector(n, d);
  const auto ytilde = setup.extrapolate(ystar.y);

  Theorem1Report r;
  r.n = n;
  r.d = d;
  r.t_star = poly.t_star;
  r.kappa = kappa(d);
  r.poly_constant = poly.value;
  r.lhs = std::abs(setup(ytilde, poly.t_star));
  r.rhs = r.kappa * poly.value;
  r.holds = r.lhs >= r.rhs;

  const GuardedExtendedLebesgue lf(setup);
  const auto sampled = lebesgue_constant(lf, setup.gridx, samples_per_interval);
  // t* is one more sample point of the scan.
  r.sampled_constant = std::max(sampled.constant, lf(poly.t_star));
  return r;
}

struct SurfaceCell {
  int d = 0;
  int dtilde = 0;
  double log10_lambda = 0.0;
};

/// log10 of the sampled Lebesgue constant over d x dtilde with ntilde = dtilde.
inline std::vector<SurfaceCell> surface_sweep(int n, int d_lo, int d_hi, int dt_lo, int dt_hi,
                                              int samples_per_interval = kDefaultLebesgueSamples) {
  if (d_lo > d_hi || dt_lo > dt_hi) throw std::invalid_argument("empty sweep range");
  std::vector<SurfaceCell> out;
  for (int dt = dt_lo; dt <= dt_hi; ++dt) {
    for (int d = d_lo; d <= d_hi; ++d) {
      const auto setup = ExtendedSetup::make(-1.0, 1.0, ExtendedConfig::make(n, d, dt, dt));
      const auto r = lebesgue_constant(GuardedExtendedLebesgue(setup), setup.gridx, samples_per_interval);
      out.push_back({d, dt, std::log10(r.constant)});
    }
  }
  return out;
}

}  // namespace fhx
