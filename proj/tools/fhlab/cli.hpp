#pragma once

// fhlab: command-line front end. Every command writes a single CSV or JSON
// document to --output (or stdout).

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhx.hpp"

namespace fhlab {

using nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  int n = 50;
  std::optional<int> d;
  std::optional<int> ntilde;
  std::optional<int> dtilde;
  int delta = 3;
  double a = -1.0;
  double b = 1.0;
  int precision_bits = 53;
  std::string rounding = "nearest";
  std::optional<int> eval_bits;
  std::optional<int> sample_bits;
  std::optional<int> points;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string function = "sin20t";
  std::string output;
  std::string format = "csv";
  int j = 0;
  std::optional<int> samples;
  double tol = fhx::kDefaultRootTolerance;
  std::string route = "taylor";
  std::string d_range;
  std::string dtilde_range;
};

/// Shortest decimal string that reads back to the same double.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline ordered_json jnum(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string csv() const {
    std::string s = join(header_);
    for (const auto& r : rows_) s += join(r);
    return s;
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) s += ',';
      s += v[i];
    }
    return s + '\n';
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Range {
  int lo = 0;
  int hi = 0;
  int step = 1;
};

/// "lo:hi" or "lo:hi:step", or a single integer.
inline Range parse_range(const std::string& s, const char* what) {
  Range r;
  std::vector<int> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw std::invalid_argument(std::string("bad ") + what + " '" + s + "' (expected lo:hi[:step])");
    }
    parts.push_back(v);
  }
  if (parts.empty() || parts.size() > 3) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + s + "' (expected lo:hi[:step])");
  }
  r.lo = parts[0];
  r.hi = parts.size() > 1 ? parts[1] : parts[0];
  r.step = parts.size() > 2 ? parts[2] : 1;
  if (r.step < 1 || r.hi < r.lo) throw std::invalid_argument(std::string("empty ") + what + " '" + s + "'");
  return r;
}

namespace detail {

inline bool extended_requested(const RunConfig& c) { return c.d.has_value(); }

inline fhx::ExtendedConfig extended_config(const RunConfig& c) {
  const int d = c.d.value();
  const int dt = c.dtilde.value_or(c.ntilde.value_or(d));
  const int nt = c.ntilde.value_or(dt);
  return fhx::ExtendedConfig::make(c.n, d, nt, dt);
}

inline void check_format(const RunConfig& c) {
  if (c.format != "csv" && c.format != "json") {
    throw std::invalid_argument("constraint format in {csv, json} violated (got '" + c.format + "')");
  }
}

inline ordered_json report_json(const fhx::StabilityReport& r) {
  ordered_json j;
  j["max_error"] = jnum(r.max_error);
  j["error_over_lebesgue"] = jnum(r.error_over_lebesgue);
  j["lebesgue_constant"] = jnum(r.lebesgue_constant);
  j["scheme"] = r.scheme;
  j["n"] = r.n;
  j["delta"] = r.delta;
  j["d"] = r.d;
  j["ntilde"] = r.ntilde;
  j["dtilde"] = r.dtilde;
  j["function"] = r.function;
  j["ytilde_policy"] = r.ytilde_policy;
  j["eval_policy"] = r.eval_policy;
  j["sample_policy"] = r.sample_policy;
  j["route"] = r.route;
  j["noise_amplitude"] = jnum(r.noise_amplitude);
  j["seed"] = r.seed;
  j["eval_points"] = r.eval_points;
  j["a"] = jnum(r.a);
  j["b"] = jnum(r.b);
  return j;
}

inline std::vector<std::string> report_header() {
  return {"scheme",        "n",           "delta",          "d",
          "ntilde",        "dtilde",      "function",       "ytilde_policy",
          "eval_policy",   "sample_policy", "route",        "noise_amplitude",
          "seed",          "eval_points", "a",              "b",
          "max_error",     "lebesgue_constant", "error_over_lebesgue"};
}

inline std::vector<std::string> report_row(const fhx::StabilityReport& r) {
  return {r.scheme,
          std::to_string(r.n),
          std::to_string(r.delta),
          std::to_string(r.d),
          std::to_string(r.ntilde),
          std::to_string(r.dtilde),
          r.function,
          r.ytilde_policy,
          r.eval_policy,
          r.sample_policy,
          r.route,
          fmt(r.noise_amplitude),
          std::to_string(r.seed),
          std::to_string(r.eval_points),
          fmt(r.a),
          fmt(r.b),
          fmt(r.max_error),
          fmt(r.lebesgue_constant),
          fmt(r.error_over_lebesgue)};
}

inline ordered_json lebesgue_report_json(const fhx::LebesgueReport& r) {
  ordered_json j;
  j["constant"] = jnum(r.constant);
  j["argmax_t"] = jnum(r.argmax_t);
  j["samples_per_interval"] = r.samples_per_interval;
  j["refinement_tolerance"] = jnum(r.refinement_tolerance);
  j["naive_bound_constant"] = r.naive_bound_constant ? jnum(*r.naive_bound_constant) : ordered_json(nullptr);
  j["log_bound"] = jnum(r.log_bound);
  return j;
}

inline fhx::PrecisionPolicy ytilde_policy(const RunConfig& c) {
  return fhx::PrecisionPolicy::make(c.precision_bits, fhx::parse_rounding_policy(c.rounding));
}

inline fhx::PrecisionPolicy eval_policy(const RunConfig& c) {
  return fhx::PrecisionPolicy::make(c.eval_bits.value_or(53), fhx::RoundingPolicy::nearest);
}

}  // namespace detail

inline std::string cmd_weights(const RunConfig& c) {
  fhx::WeightVector<double> w;
  ordered_json j;
  if (detail::extended_requested(c)) {
    w = fhx::extended_weights<double>(c.n, *c.d);
    j["family"] = "extended_fh";
    j["n"] = c.n;
    j["d"] = *c.d;
  } else {
    w = fhx::fh_weights<double>(c.n, c.delta);
    j["family"] = "fh";
    j["n"] = c.n;
    j["delta"] = c.delta;
  }
  if (c.format == "json") {
    j["first_index"] = w.first_index();
    j["values"] = std::vector<double>(w.values().begin(), w.values().end());
    return j.dump(2) + "\n";
  }
  std::vector<std::string> header, row;
  for (int i = w.first_index(); i <= w.last_index(); ++i) {
    header.push_back("w_" + std::to_string(i));
    row.push_back(fmt(w[i]));
  }
  Table t(header);
  t.add(row);
  return t.csv();
}

inline std::string cmd_eval(const RunConfig& c) {
  const auto f = fhx::parse_test_function(c.function);
  const int m = c.points.value_or(1001);
  if (m < 2) throw std::invalid_argument("constraint points >= 2 violated");
  const auto grid = fhx::make_equispaced(c.a, c.b, c.n);
  std::vector<double> y;
  for (int i = 0; i <= c.n; ++i) y.push_back(f(grid.node(i)));
  if (c.noise > 0.0) y = fhx::inject_noise(y, c.noise, c.seed);

  std::function<double(double)> interp;
  std::optional<fhx::ExtendedSetup> setup;
  fhx::OffsetVector<double> yt;
  fhx::WeightVector<double> w;
  if (detail::extended_requested(c)) {
    const auto cfg = detail::extended_config(c);
    setup = fhx::ExtendedSetup::make(c.a, c.b, cfg);
    const auto policy = detail::ytilde_policy(c);
    const auto route = fhx::parse_route(c.route);
    if (policy.is_native_double()) {
      yt = route == fhx::ExtrapolationRoute::taylor
               ? fhx::extrapolate_taylor<double, double>(grid, cfg, std::span<const double>(y))
               : setup->extrapolate(y);
    } else {
      fhx::OffsetVector<fhx::mp::Real> ymp;
      if (route == fhx::ExtrapolationRoute::taylor) {
        ymp = fhx::extrapolate_taylor(grid, cfg, std::span<const double>(y), policy);
      } else {
        fhx::ExtrapolationMap<fhx::mp::Real> map;
        {
          fhx::mp::ScopedContext ctx(policy.mantissa_bits, fhx::mp::Rounding::nearest);
          map = fhx::extrapolation_coeffs<fhx::mp::Real>(cfg.ntilde, cfg.dtilde, cfg.d);
        }
        ymp = fhx::extrapolate_matrix(std::span<const double>(y), map, policy);
      }
      yt = fhx::OffsetVector<double>(ymp.first_index(), ymp.last_index(), 0.0);
      for (int i = ymp.first_index(); i <= ymp.last_index(); ++i) yt[i] = fhx::mp::to_double(ymp[i]);
    }
    interp = [&](double t) { return (*setup)(yt, t); };
  } else {
    w = fhx::fh_weights<double>(c.n, c.delta);
    interp = [&](double t) { return fhx::fh_eval_barycentric<double>(grid, w, y, t); };
  }

  const auto ts = fhx::detail::eval_abscissae(c.a, c.b, m);
  Table t({"t", "value", "reference", "abs_error"});
  ordered_json rows = ordered_json::array();
  double worst = 0.0;
  for (double x : ts) {
    const double v = interp(x);
    const double r = f(x);
    const double e = std::abs(v - r);
    worst = std::max(worst, e);
    if (c.format == "json") {
      rows.push_back({{"t", jnum(x)}, {"value", jnum(v)}, {"reference", jnum(r)}, {"abs_error", jnum(e)}});
    } else {
      t.add({fmt(x), fmt(v), fmt(r), fmt(e)});
    }
  }
  if (c.format == "json") {
    ordered_json j;
    j["function"] = f.name;
    j["max_abs_error"] = jnum(worst);
    j["points"] = std::move(rows);
    return j.dump(2) + "\n";
  }
  return t.csv();
}

inline std::string cmd_lebesgue(const RunConfig& c) {
  const int m = c.points.value_or(2001);
  if (m < 2) throw std::invalid_argument("constraint points >= 2 violated");
  const int samples = c.samples.value_or(fhx::kDefaultLebesgueSamples);
  std::function<double(double)> lf;
  std::function<double(double)> nb;
  fhx::LebesgueReport report;
  std::optional<fhx::ExtendedSetup> setup;
  const auto grid = fhx::make_equispaced(c.a, c.b, c.n);
  fhx::WeightVector<double> w;
  if (detail::extended_requested(c)) {
    setup = fhx::ExtendedSetup::make(c.a, c.b, detail::extended_config(c));
    auto guarded = std::make_shared<const fhx::GuardedExtendedLebesgue>(*setup);
    lf = [guarded](double t) { return (*guarded)(t); };
    nb = [&](double t) { return fhx::naive_bound_function<double>(setup->weights, setup->gridx, t); };
    report = fhx::extended_lebesgue_report(*setup, samples);
  } else {
    w = fhx::fh_weights<double>(c.n, c.delta);
    lf = [&](double t) { return fhx::fh_lebesgue_function<double>(grid, w, t); };
    nb = lf;
    report = fhx::lebesgue_constant(lf, grid, samples);
    report.naive_bound_constant = report.constant;
  }
  const auto ts = fhx::detail::eval_abscissae(c.a, c.b, m);
  if (c.format == "json") {
    ordered_json j = detail::lebesgue_report_json(report);
    ordered_json rows = ordered_json::array();
    for (double x : ts) rows.push_back({{"t", jnum(x)}, {"lebesgue", jnum(lf(x))}, {"naive_bound", jnum(nb(x))}});
    j["samples"] = std::move(rows);
    return j.dump(2) + "\n";
  }
  Table t({"t", "lebesgue", "naive_bound"});
  for (double x : ts) t.add({fmt(x), fmt(lf(x)), fmt(nb(x))});
  return t.csv();
}

inline std::string cmd_theorem1(const RunConfig& c) {
  if (!c.d) throw std::invalid_argument("theorem1 needs --d");
  const auto r = fhx::theorem1_check(c.n, *c.d, c.samples.value_or(fhx::kDefaultLebesgueSamples));
  if (c.format == "json") {
    ordered_json j;
    j["n"] = r.n;
    j["d"] = r.d;
    j["lhs"] = jnum(r.lhs);
    j["rhs"] = jnum(r.rhs);
    j["holds"] = r.holds;
    j["sampled_constant"] = jnum(r.sampled_constant);
    j["kappa"] = jnum(r.kappa);
    j["poly_constant"] = jnum(r.poly_constant);
    j["t_star"] = jnum(r.t_star);
    return j.dump(2) + "\n";
  }
  Table t({"n", "d", "lhs", "rhs", "holds", "sampled_constant", "kappa", "poly_constant", "t_star"});
  t.add({std::to_string(r.n), std::to_string(r.d), fmt(r.lhs), fmt(r.rhs), r.holds ? "true" : "false",
         fmt(r.sampled_constant), fmt(r.kappa), fmt(r.poly_constant), fmt(r.t_star)});
  return t.csv();
}

inline std::string cmd_instability(const RunConfig& c) {
  if (!c.d) throw std::invalid_argument("instability needs --d");
  const auto setup = fhx::ExtendedSetup::make(c.a, c.b, detail::extended_config(c));
  const auto brackets = fhx::detect_backward_instability(setup.cfg, *setup.map, setup.weights, setup.gridx, c.j,
                                                         c.samples.value_or(fhx::kDefaultRootSamples), c.tol);
  if (c.format == "json") {
    ordered_json j;
    j["j"] = c.j;
    j["certified"] = !brackets.empty() && setup.cfg.d > 0;
    ordered_json arr = ordered_json::array();
    for (const auto& b : brackets) {
      arr.push_back({{"lo", jnum(b.lo)}, {"hi", jnum(b.hi)}, {"value_lo", jnum(b.value_lo)}, {"value_hi", jnum(b.value_hi)}});
    }
    j["brackets"] = std::move(arr);
    return j.dump(2) + "\n";
  }
  Table t({"j", "lo", "hi", "value_lo", "value_hi"});
  for (const auto& b : brackets) t.add({std::to_string(c.j), fmt(b.lo), fmt(b.hi), fmt(b.value_lo), fmt(b.value_hi)});
  return t.csv();
}

inline std::string cmd_experiment(const RunConfig& c) {
  const auto f = fhx::parse_test_function(c.function);
  std::vector<fhx::HarnessConfig> runs;
  fhx::HarnessConfig base;
  base.a = c.a;
  base.b = c.b;
  base.eval_points = c.points.value_or(fhx::kDefaultEvalPoints);
  base.ytilde_policy = detail::ytilde_policy(c);
  base.eval_policy = detail::eval_policy(c);
  if (c.sample_bits) base.sample_policy = fhx::PrecisionPolicy::make(*c.sample_bits, fhx::RoundingPolicy::nearest);
  base.route = fhx::parse_route(c.route);
  if (c.noise > 0.0) base.noise = fhx::NoiseSpec{c.noise, c.seed};
  if (c.samples) base.lebesgue_samples = *c.samples;

  if (!c.d_range.empty()) {
    // d = ntilde = dtilde over the range
    const auto r = parse_range(c.d_range, "d range");
    for (int d = r.lo; d <= r.hi; d += r.step) {
      auto h = base;
      h.scheme = fhx::ExtendedConfig::make(c.n, d, d, d);
      runs.push_back(h);
    }
  } else if (detail::extended_requested(c)) {
    base.scheme = detail::extended_config(c);
    runs.push_back(base);
  } else {
    fhx::fh_integer_weights(c.n, c.delta);  // validates delta
    base.scheme = fhx::UsualScheme{c.n, c.delta};
    runs.push_back(base);
  }

  std::vector<fhx::StabilityReport> reports;
  for (const auto& h : runs) reports.push_back(fhx::error_harness(f, h));
  if (c.format == "json") {
    if (reports.size() == 1) return detail::report_json(reports.front()).dump(2) + "\n";
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) arr.push_back(detail::report_json(r));
    return arr.dump(2) + "\n";
  }
  Table t(detail::report_header());
  for (const auto& r : reports) t.add(detail::report_row(r));
  return t.csv();
}

inline std::string cmd_surface(const RunConfig& c) {
  const auto dr = parse_range(c.d_range.empty() ? "3:20" : c.d_range, "d range");
  const auto tr = parse_range(c.dtilde_range.empty() ? "3:20" : c.dtilde_range, "dtilde range");
  const int samples = c.samples.value_or(64);
  std::vector<fhx::SurfaceCell> cells;
  for (int dt = tr.lo; dt <= tr.hi; dt += tr.step) {
    for (int d = dr.lo; d <= dr.hi; d += dr.step) {
      const auto one = fhx::surface_sweep(c.n, d, d, dt, dt, samples);
      cells.push_back(one.front());
    }
  }
  if (c.format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& s : cells) arr.push_back({{"d", s.d}, {"dtilde", s.dtilde}, {"log10_lambda", jnum(s.log10_lambda)}});
    ordered_json j;
    j["n"] = c.n;
    j["cells"] = std::move(arr);
    return j.dump(2) + "\n";
  }
  Table t({"d", "dtilde", "log10_lambda"});
  for (const auto& s : cells) t.add({std::to_string(s.d), std::to_string(s.dtilde), fmt(s.log10_lambda)});
  return t.csv();
}

inline std::string dispatch(const RunConfig& c) {
  detail::check_format(c);
  if (c.command == "weights") return cmd_weights(c);
  if (c.command == "eval") return cmd_eval(c);
  if (c.command == "lebesgue") return cmd_lebesgue(c);
  if (c.command == "theorem1") return cmd_theorem1(c);
  if (c.command == "instability") return cmd_instability(c);
  if (c.command == "experiment") return cmd_experiment(c);
  if (c.command == "surface") return cmd_surface(c);
  throw std::invalid_argument("unknown command '" + c.command + "'");
}

namespace detail {

inline void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--n", c.n, "index of the last node");
  sub->add_option("--a", c.a, "left endpoint");
  sub->add_option("--b", c.b, "right endpoint");
  sub->add_option("--output", c.output, "output file (default: stdout)");
  sub->add_option("--format", c.format, "csv or json");
}

inline void add_scheme(CLI::App* sub, RunConfig& c) {
  sub->add_option("--d", c.d, "extension width (selects the extended interpolant)");
  sub->add_option("--ntilde", c.ntilde, "nodes used for the boundary derivatives");
  sub->add_option("--dtilde", c.dtilde, "FH parameter of the boundary derivatives");
  sub->add_option("--delta", c.delta, "FH parameter of the usual interpolant");
}

}  // namespace detail

/// Parses argv, runs the command and writes its output. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Floater-Hormann interpolation and stability experiments", "fhlab"};
  app.require_subcommand(1);

  auto* weights = app.add_subcommand("weights", "barycentric weights");
  detail::add_common(weights, c);
  weights->add_option("--delta", c.delta, "FH parameter");
  weights->add_option("--d", c.d, "extended weights with this extension width");

  auto* eval = app.add_subcommand("eval", "evaluate an interpolant against its function");
  detail::add_common(eval, c);
  detail::add_scheme(eval, c);
  eval->add_option("--function", c.function, "sin2t, sin20t or poly:k");
  eval->add_option("--points", c.points, "number of equispaced evaluation points");
  eval->add_option("--precision-bits", c.precision_bits, "mantissa bits for the extrapolation step");
  eval->add_option("--rounding", c.rounding, "nearest, up, down or alternate");
  eval->add_option("--route", c.route, "taylor or matrix");
  eval->add_option("--noise", c.noise, "uniform noise amplitude added to the samples");
  eval->add_option("--seed", c.seed, "noise seed");

  auto* leb = app.add_subcommand("lebesgue", "Lebesgue function and naive bound");
  detail::add_common(leb, c);
  detail::add_scheme(leb, c);
  leb->add_option("--points", c.points, "number of equispaced sample points in the output");
  leb->add_option("--samples", c.samples, "scan samples per interval for the constant");

  auto* th = app.add_subcommand("theorem1", "worst-case lower bound for the extended Lebesgue constant");
  detail::add_common(th, c);
  th->add_option("--d", c.d, "d = ntilde = dtilde")->required();
  th->add_option("--samples", c.samples, "scan samples per interval");

  auto* inst = app.add_subcommand("instability", "sign changes of a reduced coefficient");
  detail::add_common(inst, c);
  detail::add_scheme(inst, c);
  inst->add_option("--j", c.j, "coefficient index");
  inst->add_option("--samples", c.samples, "scan samples per interval");
  inst->add_option("--tol", c.tol, "bisection width");

  auto* exp = app.add_subcommand("experiment", "forward-error experiment");
  detail::add_common(exp, c);
  detail::add_scheme(exp, c);
  exp->add_option("--function", c.function, "sin2t, sin20t or poly:k");
  exp->add_option("--points", c.points, "number of evaluation points (>= 1000)");
  exp->add_option("--precision-bits", c.precision_bits, "mantissa bits for the extrapolation step");
  exp->add_option("--rounding", c.rounding, "rounding of the extrapolation step");
  exp->add_option("--eval-bits", c.eval_bits, "mantissa bits for evaluation (default 53)");
  exp->add_option("--sample-bits", c.sample_bits, "mantissa bits for the samples (default: evaluation)");
  exp->add_option("--route", c.route, "taylor or matrix");
  exp->add_option("--noise", c.noise, "uniform noise amplitude added to the samples");
  exp->add_option("--seed", c.seed, "noise seed");
  exp->add_option("--samples", c.samples, "scan samples per interval for the Lebesgue constant");
  exp->add_option("--d-range", c.d_range, "sweep d = ntilde = dtilde over lo:hi[:step]");

  auto* surf = app.add_subcommand("surface", "log10 Lebesgue constant over d x dtilde (ntilde = dtilde)");
  detail::add_common(surf, c);
  surf->add_option("--d-range", c.d_range, "lo:hi[:step], default 3:20");
  surf->add_option("--dtilde-range", c.dtilde_range, "lo:hi[:step], default 3:20");
  surf->add_option("--samples", c.samples, "scan samples per interval (default 64)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();

  std::string text;
  try {
    text = dispatch(c);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (c.output.empty()) {
    out << text;
    return 0;
  }
  std::ofstream file(c.output, std::ios::binary);
  if (!file) {
    err << "error: cannot open '" << c.output << "' for writing\n";
    return 1;
  }
  file << text;
  if (!file) {
    err << "error: write to '" << c.output << "' failed\n";
    return 1;
  }
  return 0;
}

}  // namespace fhlab
