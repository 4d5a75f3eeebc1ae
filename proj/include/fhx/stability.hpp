#pragma once

// Stability diagnostics: sign changes of the reduced coefficients (which
// certify that the extended interpolant is not backward stable), seeded noise,
// and forward-error experiments under configurable precision and rounding.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fhx/extended.hpp"
#include "fhx/fh.hpp"
#include "fhx/grid.hpp"
#include "fhx/lebesgue.hpp"
#include "fhx/mp.hpp"
#include "fhx/precision.hpp"
#include "fhx/test_functions.hpp"
#include "fhx/weights.hpp"

namespace fhx {

/// [lo, hi] with d_j(lo) and d_j(hi) of opposite signs (or a sample where d_j is exactly zero, lo == hi).
struct RootBracket {
  double lo = 0.0;
  double hi = 0.0;
  double value_lo = 0.0;
  double value_hi = 0.0;
};

inline constexpr int kDefaultRootSamples = 10000;
inline constexpr double kDefaultRootTolerance = 1e-13;

namespace detail {

template <class F>
RootBracket bisect(F& f, double lo, double hi, double vlo, double vhi, double tol) {
  while (hi - lo > tol) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    const double vm = f(mid);
    if (vm == 0.0) return {mid, mid, vm, vm};
    if (std::signbit(vm) == std::signbit(vlo)) {
      lo = mid;
      vlo = vm;
    } else {
      hi = mid;
      vhi = vm;
    }
  }
  return {lo, hi, vlo, vhi};
}

template <class F>
std::vector<RootBracket> sign_change_brackets(F& f, const EquispacedGrid& grid, int samples, double tol) {
  std::vector<RootBracket> out;
  for (int k = 0; k < grid.n(); ++k) {
    const double x0 = grid.node(k);
    const double len = grid.node(k + 1) - x0;
    double prev_t = 0.0;
    double prev_v = 0.0;
    bool have_prev = false;
    for (int m = 1; m < samples; ++m) {
      const double t = x0 + len * (static_cast<double>(m) / samples);
      const double v = f(t);
      if (!std::isfinite(v)) {
        have_prev = false;
        continue;
      }
      if (v == 0.0) {
        out.push_back({t, t, v, v});
        have_prev = false;
        continue;
      }
      if (have_prev && std::signbit(v) != std::signbit(prev_v)) {
        out.push_back(bisect(f, prev_t, t, prev_v, v, tol));
      }
      prev_t = t;
      prev_v = v;
      have_prev = true;
    }
  }
  return out;
}

inline void check_instability_args(int n, int j, int samples, double tol) {
  if (j < 0 || j > n) throw std::invalid_argument("coefficient index j must satisfy 0 <= j <= n");
  if (samples < 2) throw std::invalid_argument("need at least 2 samples per interval");
  if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
}

}  // namespace detail

/// Brackets every sign change of d_j(t) inside the open internodal intervals of [x_0, x_n].
inline std::vector<RootBracket> detect_backward_instability(const GeneralExtrapolationMap<double>& map,
                                                            const WeightVector<double>& w,
                                                            const ExtendedGrid& gridx, int j,
                                                            int samples_per_interval = kDefaultRootSamples,
                                                            double tol = kDefaultRootTolerance) {
  detail::check_instability_args(gridx.n(), j, samples_per_interval, tol);
  if (map.n() != gridx.n() || map.d() != gridx.d()) throw std::invalid_argument("general map: dimension mismatch");
  auto f = [&](double t) { return general_reduced_coeff<double>(map, w, gridx, j, t); };
  return detail::sign_change_brackets(f, gridx.base(), samples_per_interval, tol);
}

/// Same for the Taylor map of cfg.
inline std::vector<RootBracket> detect_backward_instability(const ExtendedConfig& cfg,
                                                            const ExtrapolationMap<double>& map,
                                                            const WeightVector<double>& w,
                                                            const ExtendedGrid& gridx, int j,
                                                            int samples_per_interval = kDefaultRootSamples,
                                                            double tol = kDefaultRootTolerance) {
  detail::check_reduced_dims(cfg, map, gridx);
  return detect_backward_instability(GeneralExtrapolationMap<double>::from_taylor(map, cfg.n), w, gridx, j,
                                     samples_per_interval, tol);
}

struct NoiseSpec {
  double amplitude = 0.0;
  std::uint64_t seed = 0;
};

/// eta_i uniform on [-amplitude, amplitude], from mt19937_64 with a fixed
/// 53-bit mapping so the sequence does not depend on the standard library.
inline std::vector<double> noise_vector(std::size_t size, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw std::invalid_argument("noise amplitude must be >= 0");
  std::mt19937_64 gen(seed);
  std::vector<double> eta(size);
  for (auto& e : eta) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
    e = amplitude * (2.0 * u - 1.0);
  }
  return eta;
}

/// y_i + eta_i; the additions round in the current context when Real is mp::Real.
template <class Real>
std::vector<Real> inject_noise(std::span<const Real> y, double amplitude, std::uint64_t seed) {
  const auto eta = noise_vector(y.size(), amplitude, seed);
  std::vector<Real> out(y.begin(), y.end());
  if (amplitude == 0.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] + Real(eta[i]);
  return out;
}

template <class Real>
std::vector<Real> inject_noise(const std::vector<Real>& y, double amplitude, std::uint64_t seed) {
  return inject_noise<Real>(std::span<const Real>(y), amplitude, seed);
}

/// A usual FH interpolant with parameter delta on n+1 nodes.
struct UsualScheme {
  int n = 0;
  int delta = 0;
};

using Scheme = std::variant<UsualScheme, ExtendedConfig>;

enum class ExtrapolationRoute { taylor, matrix };

inline std::string to_string(ExtrapolationRoute r) { return r == ExtrapolationRoute::taylor ? "taylor" : "matrix"; }

inline ExtrapolationRoute parse_route(const std::string& s) {
  if (s == "taylor") return ExtrapolationRoute::taylor;
  if (s == "matrix") return ExtrapolationRoute::matrix;
  throw std::invalid_argument("unknown extrapolation route '" + s + "'");
}

inline constexpr int kDefaultEvalPoints = 100000;

struct HarnessConfig {
  Scheme scheme = UsualScheme{};
  double a = -1.0;
  double b = 1.0;
  int eval_points = kDefaultEvalPoints;
  PrecisionPolicy ytilde_policy = PrecisionPolicy::working();
  PrecisionPolicy eval_policy = PrecisionPolicy::working();
  /// Precision of the samples f(x_i); defaults to eval_policy.
  std::optional<PrecisionPolicy> sample_policy;
  ExtrapolationRoute route = ExtrapolationRoute::taylor;
  std::optional<NoiseSpec> noise;
  int lebesgue_samples = kDefaultLebesgueSamples;
  /// When set, observes every arithmetic operation of the extrapolation step.
  mp::RoundingMonitor* ytilde_monitor = nullptr;
};

struct StabilityReport {
  double max_error = 0.0;
  double error_over_lebesgue = 0.0;
  double lebesgue_constant = 1.0;
  std::string scheme;  // "fh" or "extended"
  int n = 0;
  int delta = -1;
  int d = -1;
  int ntilde = -1;
  int dtilde = -1;
  std::string function;
  std::string ytilde_policy;
  std::string eval_policy;
  std::string sample_policy;
  std::string route;
  double noise_amplitude = 0.0;
  std::uint64_t seed = 0;
  int eval_points = 0;
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

inline int scheme_n(const Scheme& s) {
  return std::visit([](const auto& v) { return v.n; }, s);
}

// Samples f at the nodes in the precision of `p`, with optional noise.
template <class Real>
std::vector<Real> sample_nodes(const TestFunction& f, const EquispacedGrid& grid, const std::optional<NoiseSpec>& noise) {
  std::vector<Real> y;
  y.reserve(static_cast<std::size_t>(grid.n()) + 1);
  for (int i = 0; i <= grid.n(); ++i) {
    if constexpr (is_mp_v<Real>) {
      y.push_back(f(grid.node_as<mp::Real>(i)));
    } else {
      y.push_back(f(grid.node(i)));
    }
  }
  if (noise && noise->amplitude > 0.0) y = inject_noise(y, noise->amplitude, noise->seed);
  return y;
}

template <class YReal>
OffsetVector<mp::Real> extrapolate_mp(const EquispacedGrid& grid, const ExtendedConfig& cfg,
                                      const std::vector<YReal>& y, const HarnessConfig& hc) {
  const std::span<const YReal> ys(y);
  if (hc.route == ExtrapolationRoute::taylor) return extrapolate_taylor(grid, cfg, ys, hc.ytilde_policy);
  ExtrapolationMap<mp::Real> map;
  {
    mp::ScopedContext ctx(hc.ytilde_policy.context_for_index(0).bits, mp::Rounding::nearest);
    map = extrapolation_coeffs<mp::Real>(cfg.ntilde, cfg.dtilde, cfg.d);
  }
  return extrapolate_matrix(ys, map, hc.ytilde_policy);
}

template <class YReal>
OffsetVector<double> extrapolate_double(const EquispacedGrid& grid, const ExtendedConfig& cfg,
                                        const std::vector<YReal>& y, const HarnessConfig& hc) {
  std::vector<double> yd;
  yd.reserve(y.size());
  for (const auto& v : y) yd.push_back(numeric_cast<double>(v));
  if (hc.route == ExtrapolationRoute::taylor) return extrapolate_taylor<double, double>(grid, cfg, std::span<const double>(yd));
  return extrapolate_matrix<double, double>(std::span<const double>(yd), *taylor_map(cfg.ntilde, cfg.dtilde, cfg.d));
}

// Extended data in the evaluation precision (ERealOut), computed under the ytilde policy.
template <class EReal, class YReal>
OffsetVector<EReal> extended_data(const EquispacedGrid& grid, const ExtendedConfig& cfg, const std::vector<YReal>& y,
                                  const HarnessConfig& hc) {
  std::optional<mp::MonitorScope> scope;
  if (hc.ytilde_monitor != nullptr) scope.emplace(*hc.ytilde_monitor);
  if (hc.ytilde_policy.is_native_double() && !is_mp_v<YReal> && hc.ytilde_monitor == nullptr) {
    auto yt = extrapolate_double(grid, cfg, y, hc);
    scope.reset();
    if constexpr (is_mp_v<EReal>) {
      mp::ScopedContext ctx(hc.eval_policy.context());
      OffsetVector<EReal> out(yt.first_index(), yt.last_index(), EReal(0));
      for (int i = yt.first_index(); i <= yt.last_index(); ++i) out[i] = EReal(yt[i]);
      return out;
    } else {
      return yt;
    }
  }
  auto yt = extrapolate_mp(grid, cfg, y, hc);
  scope.reset();
  mp::ScopedContext ctx(hc.eval_policy.context());
  OffsetVector<EReal> out(yt.first_index(), yt.last_index(), EReal(0));
  for (int i = yt.first_index(); i <= yt.last_index(); ++i) out[i] = numeric_cast<EReal>(yt[i]);
  return out;
}

inline std::vector<double> eval_abscissae(double a, double b, int m) {
  std::vector<double> t(static_cast<std::size_t>(m));
  const double step = (b - a) / (m - 1);
  for (int k = 0; k < m; ++k) t[static_cast<std::size_t>(k)] = (k == m - 1) ? b : a + k * step;
  return t;
}

template <class EReal>
double max_abs_error(const TestFunction& f, std::span<const EReal> x, std::span<const EReal> w,
                     std::span<const EReal> y, const std::vector<double>& ts) {
  double worst = 0.0;
  for (double td : ts) {
    const EReal t(td);
    const EReal v = barycentric<EReal>(x, w, y, t);
    using std::abs;
    const double e = numeric_cast<double>(abs(v - f(t)));
    if (!(e <= worst)) worst = e;  // NaN propagates as the worst case
  }
  return worst;
}

template <class EReal, class YReal>
double run_eval(const TestFunction& f, const EquispacedGrid& grid, const HarnessConfig& hc, const std::vector<YReal>& y) {
  const auto ts = eval_abscissae(hc.a, hc.b, hc.eval_points);
  std::optional<mp::ScopedContext> ctx;
  if constexpr (is_mp_v<EReal>) ctx.emplace(hc.eval_policy.context());
  if (const auto* cfg = std::get_if<ExtendedConfig>(&hc.scheme)) {
    const auto yt = extended_data<EReal>(grid, *cfg, y, hc);
    const auto gridx = extend(grid, cfg->d);
    const auto x = gridx.nodes_as<EReal>();
    const auto w = extended_weights<EReal>(cfg->n, cfg->d);
    return max_abs_error<EReal>(f, x, w.values(), yt.values(), ts);
  }
  const auto& us = std::get<UsualScheme>(hc.scheme);
  std::vector<EReal> ye;
  ye.reserve(y.size());
  for (const auto& v : y) ye.push_back(numeric_cast<EReal>(v));
  std::vector<EReal> x;
  for (int i = 0; i <= grid.n(); ++i) x.push_back(grid.node_as<EReal>(i));
  const auto w = fh_weights<EReal>(us.n, us.delta);
  return max_abs_error<EReal>(f, x, w.values(), ye, ts);
}

template <class YReal>
double run_with_samples(const TestFunction& f, const EquispacedGrid& grid, const HarnessConfig& hc,
                        const std::vector<YReal>& y) {
  if (hc.eval_policy.is_native_double()) return run_eval<double>(f, grid, hc, y);
  return run_eval<mp::Real>(f, grid, hc, y);
}

}  // namespace detail

/// Samples f, optionally perturbs the samples, extrapolates under the ytilde
/// policy, rounds the extended data to the evaluation precision and reports the
/// maximum error over eval_points equispaced points of [a, b].
inline StabilityReport error_harness(const TestFunction& f, const HarnessConfig& hc) {
  if (hc.eval_points < 1000) throw std::invalid_argument("eval_points must be >= 1000");
  hc.ytilde_policy.validate();
  hc.eval_policy.validate();
  if (hc.noise && !(hc.noise->amplitude >= 0.0)) throw std::invalid_argument("noise amplitude must be >= 0");
  const PrecisionPolicy sp = hc.sample_policy.value_or(hc.eval_policy);
  sp.validate();

  StabilityReport r;
  const int n = detail::scheme_n(hc.scheme);
  const auto grid = make_equispaced(hc.a, hc.b, n);
  if (const auto* cfg = std::get_if<ExtendedConfig>(&hc.scheme)) {
    cfg->validate();
    r.scheme = "extended";
    r.d = cfg->d;
    r.ntilde = cfg->ntilde;
    r.dtilde = cfg->dtilde;
    r.lebesgue_constant = extended_lebesgue_report(hc.a, hc.b, *cfg, hc.lebesgue_samples).constant;
  } else {
    const auto& us = std::get<UsualScheme>(hc.scheme);
    const auto w = fh_weights<double>(us.n, us.delta);
    r.scheme = "fh";
    r.delta = us.delta;
    r.lebesgue_constant =
        lebesgue_constant([&](double t) { return fh_lebesgue_function<double>(grid, w, t); }, grid,
                          hc.lebesgue_samples)
            .constant;
  }

  if (sp.is_native_double()) {
    const auto y = detail::sample_nodes<double>(f, grid, hc.noise);
    r.max_error = detail::run_with_samples(f, grid, hc, y);
  } else {
    std::vector<mp::Real> y;
    {
      mp::ScopedContext ctx(sp.context());
      y = detail::sample_nodes<mp::Real>(f, grid, hc.noise);
    }
    r.max_error = detail::run_with_samples(f, grid, hc, y);
  }

  r.error_over_lebesgue = r.max_error / r.lebesgue_constant;
  r.n = n;
  r.function = f.name;
  r.ytilde_policy = hc.ytilde_policy.label;
  r.eval_policy = hc.eval_policy.label;
  r.sample_policy = sp.label;
  r.route = to_string(hc.route);
  r.noise_amplitude = hc.noise ? hc.noise->amplitude : 0.0;
  r.seed = hc.noise ? hc.noise->seed : 0;
  r.eval_points = hc.eval_points;
  r.a = hc.a;
  r.b = hc.b;
  return r;
}

struct DirectedRoundingReport {
  StabilityReport directed;  // Taylor route, up for even i and down for odd i
  StabilityReport nearest;   // Taylor route, round to nearest
  StabilityReport matrix;    // coefficients computed at high precision, rounded to double
  double monitor_max_relative_error = 0.0;
  std::size_t monitored_operations = 0;
  double unit_roundoff = 0.0;  // 2^-bits
};

/// Extended data computed in `bits` precision with alternating directed
/// rounding, compared with the nearest-rounding and matrix routes. Evaluation is
/// in working precision throughout.
inline DirectedRoundingReport directed_rounding_experiment(const TestFunction& f, const ExtendedConfig& cfg,
                                                           double a = -1.0, double b = 1.0,
                                                           int eval_points = kDefaultEvalPoints, int bits = 53) {
  cfg.validate();
  HarnessConfig hc;
  hc.scheme = cfg;
  hc.a = a;
  hc.b = b;
  hc.eval_points = eval_points;

  DirectedRoundingReport out;
  mp::RoundingMonitor monitor;
  {
    HarnessConfig directed = hc;
    directed.ytilde_policy = PrecisionPolicy::make(bits, RoundingPolicy::alternate_by_index);
    directed.ytilde_monitor = &monitor;
    out.directed = error_harness(f, directed);
  }
  {
    HarnessConfig nearest = hc;
    nearest.ytilde_policy = PrecisionPolicy::make(bits, RoundingPolicy::nearest);
    out.nearest = error_harness(f, nearest);
  }
  {
    HarnessConfig matrix = hc;
    matrix.route = ExtrapolationRoute::matrix;
    out.matrix = error_harness(f, matrix);
  }
  out.monitor_max_relative_error = monitor.max_relative_error();
  out.monitored_operations = monitor.operations();
  out.unit_roundoff = std::ldexp(1.0, -bits);
  return out;
}

}  // namespace fhx
