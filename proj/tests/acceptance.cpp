// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fhx.hpp"

using namespace fhx;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> body;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double rel_disagreement(double u, double v, double scale) { return std::abs(u - v) / std::max(std::abs(v), scale); }

double max_abs(const std::vector<double>& y) {
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  return m;
}

Outcome theorem1_sweep() {
  bool ok = true;
  std::ostringstream s;
  for (int d = 3; d <= 10; ++d) {
    const auto r = theorem1_check(2 * d + 4, d);
    const bool good = r.sampled_constant >= r.rhs && r.holds;
    ok = ok && good;
    s << " d=" << d << ":" << num(r.sampled_constant) << (good ? ">=" : "<") << num(r.rhs);
  }
  return {ok, s.str()};
}

Outcome constant_ratio() {
  const double big = extended_lebesgue_report(-1.0, 1.0, ExtendedConfig::make(50, 3, 11, 7)).constant;
  const double small = extended_lebesgue_report(-1.0, 1.0, ExtendedConfig::make(50, 7, 7, 7)).constant;
  const double ratio = big / small;
  return {ratio >= 9.0 && ratio <= 15.0,
          "Lambda~(50,3,11,7)=" + num(big) + " Lambda~(50,7,7,7)=" + num(small) + " ratio=" + num(ratio)};
}

Outcome log_bound_counterexample() {
  const auto r = extended_lebesgue_report(-1.0, 1.0, ExtendedConfig::make(100, 20, 20, 20));
  const double bound = 2.0 + std::log(140.0);
  return {r.constant > 10.0 * bound, "Lambda~=" + num(r.constant) + " vs 10*(2+ln 140)=" + num(10.0 * bound)};
}

Outcome instability_certificate() {
  const auto s = ExtendedSetup::make(-1.0, 1.0, ExtendedConfig::make(50, 3, 11, 7));
  const auto b = detect_backward_instability(s.cfg, *s.map, s.weights, s.gridx, 2);
  if (b.size() != 1) return {false, std::to_string(b.size()) + " brackets"};
  const bool inside = b[0].lo >= -0.918 && b[0].hi <= -0.914;
  const double width = b[0].hi - b[0].lo;
  char buf[128];
  std::snprintf(buf, sizeof buf, "[%.17g, %.17g] width=%.3g", b[0].lo, b[0].hi, width);
  return {inside && width <= 1e-13, buf};
}

Outcome oracle_equivalences() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> uy(-1.0, 1.0);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  auto random_y = [&](int n) {
    std::vector<double> y(static_cast<std::size_t>(n) + 1);
    for (auto& v : y) v = uy(gen);
    return y;
  };

  // (a) usual FH, barycentric vs blended, integer nodes 0..n
  double worst_a = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = uniform_int(1, 30);
    const int delta = uniform_int(0, n);
    const auto g = make_equispaced(0.0, static_cast<double>(n), n);
    const auto w = fh_weights<double>(n, delta);
    const auto y = random_y(n);
    const double t = std::uniform_real_distribution<double>(0.0, n)(gen);
    const double bary = fh_eval_barycentric<double>(g, w, y, t);
    const double blend = fh_eval_blended<double>(g, delta, y, t);
    worst_a = std::max(worst_a, rel_disagreement(blend, bary, max_abs(y)));
  }

  // (b) Taylor vs matrix extrapolation at 320 bits, ntilde = dtilde <= 8
  double worst_b = 0.0;
  {
    mp::ScopedContext ctx(320, mp::Rounding::nearest);
    const auto policy = PrecisionPolicy::make(320, RoundingPolicy::nearest);
    for (int k = 0; k < 100; ++k) {
      const int nt = uniform_int(0, 8);
      const int d = uniform_int(1, 8);
      const int n = uniform_int(nt + 1, 30);
      const auto cfg = ExtendedConfig::make(n, d, nt, nt);
      const auto g = make_equispaced(-1.0, 1.0, n);
      const auto y = random_y(n);
      const auto taylor = extrapolate_taylor(g, cfg, std::span<const double>(y), policy);
      const auto map = extrapolation_coeffs<mp::Real>(nt, nt, d);
      const auto matrix = extrapolate_matrix<mp::Real, double>(std::span<const double>(y), map);
      for (int i = -d; i <= n + d; ++i) {
        const mp::Real diff = abs(taylor[i] - matrix[i]);
        const mp::Real scale = std::max(abs(matrix[i]), mp::Real(max_abs(y)));
        worst_b = std::max(worst_b, static_cast<double>(diff / scale));
      }
    }
  }

  // (c) reduced vs barycentric extended, d and dtilde <= 8, ntilde free
  double worst_c = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int n = uniform_int(2, 30);
    const int nt = uniform_int(0, n - 1);
    const int dt = uniform_int(0, std::min(nt, 8));
    const int d = uniform_int(0, 8);
    const auto s = ExtendedSetup::make(-1.0, 1.0, ExtendedConfig::make(n, d, nt, dt));
    const auto y = random_y(n);
    const double t = uy(gen);
    const double bary = s(s.extrapolate(y), t);
    const auto c = reduced_coeffs(s.cfg, *s.map, s.weights, s.gridx, t);
    const double red = reduced_eval<double>(c, y, extended_denominator(s.gridx, s.weights, t));
    worst_c = std::max(worst_c, rel_disagreement(red, bary, max_abs(y)));
  }

  const bool a = worst_a <= 1e-10, b = worst_b <= 1e-20, c = worst_c <= 1e-10;
  return {a && b && c, "(a) " + num(worst_a) + (a ? " ok" : " FAIL") + "  (b) " + num(worst_b) + (b ? " ok" : " FAIL") +
                           "  (c) " + num(worst_c) + (c ? " ok" : " FAIL")};
}

Outcome polynomial_reproduction() {
  bool ok = true;
  double worst = 0.0;
  const int n = 40;
  for (auto [d, dt] : {std::pair{3, 3}, std::pair{7, 7}, std::pair{5, 3}}) {
    const auto s = ExtendedSetup::make(-1.0, 1.0, ExtendedConfig::make(n, d, dt, dt));
    for (int p = 0; p <= std::min(d, dt); ++p) {
      std::vector<double> y;
      for (int i = 0; i <= n; ++i) y.push_back(std::pow(s.gridx.node(i), p));
      const auto yt = s.extrapolate(y);
      double err = 0.0, fmax = 0.0;
      for (int k = 0; k < 1000; ++k) {
        const double t = -1.0 + 2.0 * k / 999.0;
        const double f = std::pow(t, p);
        err = std::max(err, std::abs(s(yt, t) - f));
        fmax = std::max(fmax, std::abs(f));
      }
      worst = std::max(worst, err / fmax);
      ok = ok && err <= 1e-10 * fmax;
    }
  }
  return {ok, "worst relative error " + num(worst)};
}

Outcome noise_amplification() {
  HarnessConfig hc;
  hc.scheme = ExtendedConfig::make(200, 40, 40, 40);
  hc.eval_points = kDefaultEvalPoints;
  const auto p = PrecisionPolicy::make(320, RoundingPolicy::nearest);
  hc.sample_policy = p;
  hc.ytilde_policy = p;
  hc.eval_policy = p;
  hc.noise = NoiseSpec{1e-10, 12345};
  const auto r = error_harness(sine_function(2), hc);
  return {r.max_error >= 1e-2 && r.max_error <= 1e2,
          "max_error=" + num(r.max_error) + " (noise 1e-10, 320 bits, " + std::to_string(hc.eval_points) + " points)"};
}

Outcome coefficient_growth() {
  mp::ScopedContext ctx(320, mp::Rounding::nearest);
  std::vector<double> lg;
  bool ok = true;
  std::ostringstream s;
  for (int d : {5, 10, 15, 20}) {
    const auto m = extrapolation_coeffs<mp::Real>(d, d, d);
    mp::Real ma(0), mb(0);
    for (const auto& v : m.a_entries()) ma = std::max(ma, abs(v));
    for (const auto& v : m.b_entries()) mb = std::max(mb, abs(v));
    const double rel = static_cast<double>(abs(ma - mb) / ma);
    ok = ok && rel <= 1e-10;
    lg.push_back(std::log10(static_cast<double>(ma)));
    s << " d=" << d << ":" << num(static_cast<double>(ma));
  }
  for (std::size_t k = 1; k < lg.size(); ++k) ok = ok && lg[k] - lg[k - 1] >= 1.0;
  return {ok, "max|a|" + s.str()};
}

Outcome brute_force_oracle() {
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    for (int d = 0; d <= 2; ++d) {
      for (int nt = 0; nt <= std::min(2, n - 1); ++nt) {
        const auto s = ExtendedSetup::make(-1.0, 1.0, ExtendedConfig::make(n, d, nt, nt));
        std::vector<OffsetVector<double>> ytildes;
        for (unsigned mask = 0; mask < (1u << (n + 1)); ++mask) {
          std::vector<double> y(static_cast<std::size_t>(n) + 1);
          for (int i = 0; i <= n; ++i) y[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1.0 : -1.0;
          ytildes.push_back(s.extrapolate(y));
        }
        for (int k = 0; k < 1000; ++k) {
          const double t = -1.0 + 2.0 * (k + 0.5) / 1000.0;
          if (detail::is_extended_node(s.gridx, t)) continue;
          double best = 0.0;
          for (const auto& yt : ytildes) best = std::max(best, std::abs(s(yt, t)));
          const double f = extended_lebesgue_function<double>(s.cfg, *s.map, s.weights, s.gridx, t);
          worst = std::max(worst, std::abs(best - f) / f);
        }
      }
    }
  }
  return {worst <= 1e-10, "worst relative gap " + num(worst)};
}

Outcome property_suite() {
  std::vector<std::string> failed;
  // weights: alternating signs and symmetry
  for (int n = 1; n <= 40; ++n) {
    for (int delta = 0; delta <= n; ++delta) {
      const auto w = fh_integer_weights(n, delta);
      for (int i = 0; i <= n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (std::abs(w[ui]) != std::abs(w[static_cast<std::size_t>(n - i)])) failed.push_back("symmetry");
        if (i < n && !((w[ui] > 0) != (w[ui + 1] > 0))) failed.push_back("alternation");
      }
    }
  }
  {
    mp::ScopedContext ctx(320, mp::Rounding::nearest);
    // a/b row sums
    double worst = 0.0;
    for (int nt = 0; nt <= 12; ++nt) {
      const auto m = extrapolation_coeffs<mp::Real>(nt, nt, std::max(nt, 1));
      for (int i = 1; i <= m.d(); ++i) {
        mp::Real sa(0), sb(0);
        for (int j = 0; j <= nt; ++j) sa += m.a(-i, j);
        for (int j = -nt; j <= 0; ++j) sb += m.b(i, j);
        worst = std::max({worst, static_cast<double>(abs(sa - mp::Real(1))), static_cast<double>(abs(sb - mp::Real(1)))});
      }
    }
    if (worst > 1e-40) failed.push_back("row sums of a/b (" + num(worst) + ")");
    // derivative matrices: zero row sums for k >= 1
    double dworst = 0.0;
    for (int n = 1; n <= 16; ++n) {
      for (int delta = 0; delta <= n; ++delta) {
        const auto e = normalized_derivative_matrices(fh_weights<mp::Real>(n, delta), 6);
        for (int k = 1; k <= 6; ++k) {
          for (int i = 0; i <= n; ++i) {
            mp::Real s(0), scale(0);
            for (int j = 0; j <= n; ++j) {
              s += e[static_cast<std::size_t>(k)](i, j);
              scale += abs(e[static_cast<std::size_t>(k)](i, j));
            }
            dworst = std::max(dworst, static_cast<double>(abs(s) / std::max(scale, mp::Real(1))));
          }
        }
      }
    }
    if (dworst > 1e-60) failed.push_back("derivative row sums (" + num(dworst) + ")");
  }
  // Lebesgue functions >= 1
  for (auto cfg : {ExtendedConfig::make(50, 3, 11, 7), ExtendedConfig::make(40, 8, 8, 8), ExtendedConfig::make(12, 2, 5, 1)}) {
    const auto s = ExtendedSetup::make(-1.0, 1.0, cfg);
    const GuardedExtendedLebesgue lf(s);
    const auto g = make_equispaced(-1.0, 1.0, cfg.n);
    const auto w = fh_weights<double>(cfg.n, std::min(cfg.n, 5));
    for (int k = 0; k <= 10000; ++k) {
      const double t = -1.0 + 2.0 * k / 10000.0;
      if (lf(t) < 1.0 - 1e-12 || fh_lebesgue_function<double>(g, w, t) < 1.0 - 1e-12) {
        failed.push_back("Lebesgue >= 1");
        break;
      }
    }
  }
  // FH bound
  int bound_fail = 0;
  for (int n = 1; n <= 200; ++n) {
    const auto g = make_equispaced(-1.0, 1.0, n);
    for (int delta = 1; delta <= std::min(10, n); ++delta) {
      const auto w = fh_weights<double>(n, delta);
      const auto r = lebesgue_constant([&](double t) { return fh_lebesgue_function<double>(g, w, t); }, g, 32);
      if (r.constant > std::ldexp(1.0, delta - 1) * (2.0 + std::log(n))) ++bound_fail;
    }
  }
  if (bound_fail > 0) failed.push_back("FH bound (" + std::to_string(bound_fail) + " cases)");
  // kappa
  if (std::abs(kappa(2) - 1.0 / 12.0) > 1e-15 || std::abs(kappa(4) - 161.0 / 240.0) > 1e-15) failed.push_back("kappa");

  std::sort(failed.begin(), failed.end());
  failed.erase(std::unique(failed.begin(), failed.end()), failed.end());
  std::string detail = "weights, a/b row sums, derivative row sums, Lebesgue >= 1, FH bound, kappa";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f + ";";
  }
  return {failed.empty(), detail};
}

Outcome working_precision_blowup() {
  HarnessConfig hc;
  hc.scheme = ExtendedConfig::make(200, 40, 40, 40);
  hc.eval_points = kDefaultEvalPoints;
  const auto r = error_harness(sine_function(2), hc);
  return {r.max_error >= 1e6, "max_error=" + num(r.max_error) + " (53-bit, sin2t)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "Theorem 1 sweep d=3..10, n=2d+4", 60, theorem1_sweep},
      {"AC2", "Lebesgue constant ratio in [9, 15]", 60, constant_ratio},
      {"AC3", "n=100, d=20 exceeds ten times the log bound", 120, log_bound_counterexample},
      {"AC4", "backward-instability bracket in [-0.918, -0.914]", 10, instability_certificate},
      {"AC5", "oracle equivalences", 60, oracle_equivalences},
      {"AC6", "polynomial reproduction", 30, polynomial_reproduction},
      {"AC7", "noise amplification at 320 bits", 600, noise_amplification},
      {"AC8", "coefficient blow-up", 60, coefficient_growth},
      {"AC9", "brute-force Lebesgue oracle", 60, brute_force_oracle},
      {"AC10", "property suite", 60, property_suite},
      {"S2", "working-precision error, n=200, d=40, sin2t", 600, working_precision_blowup},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%-4s %s  %s: %s [%.1f s%s]\n", c.id.c_str(), pass ? "PASS" : "FAIL", c.title.c_str(), o.detail.c_str(),
                secs, in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
