#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "fhx/mp.hpp"

namespace fhx {

/// A scalar function usable both in double and in mp::Real arithmetic.
struct TestFunction {
  std::string name;
  std::function<double(double)> eval;
  std::function<mp::Real(const mp::Real&)> eval_mp;

  double operator()(double t) const { return eval(t); }
  mp::Real operator()(const mp::Real& t) const { return eval_mp(t); }
};

namespace detail {

inline double int_power(double t, int k) {
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= t;
  return p;
}

inline mp::Real int_power(const mp::Real& t, int k) {
  mp::Real p(1);
  for (int i = 0; i < k; ++i) p *= t;
  return p;
}

}  // namespace detail

inline TestFunction sine_function(int freq) {
  return TestFunction{"sin" + std::to_string(freq) + "t", [freq](double t) { return std::sin(freq * t); },
                      [freq](const mp::Real& t) { return sin(mp::Real(freq) * t); }};
}

inline TestFunction monomial(int k) {
  if (k < 0) throw std::invalid_argument("monomial degree must be >= 0");
  return TestFunction{"poly:" + std::to_string(k), [k](double t) { return detail::int_power(t, k); },
                      [k](const mp::Real& t) { return detail::int_power(t, k); }};
}

/// Accepts "sin2t", "sin20t" and "poly:k".
inline TestFunction parse_test_function(const std::string& name) {
  if (name == "sin2t") return sine_function(2);
  if (name == "sin20t") return sine_function(20);
  if (name.rfind("poly:", 0) == 0) {
    const std::string digits = name.substr(5);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 3) {
      throw std::invalid_argument("bad polynomial degree in '" + name + "'");
    }
    return monomial(std::stoi(digits));
  }
  throw std::invalid_argument("unknown function '" + name + "' (expected sin2t, sin20t or poly:k)");
}

}  // namespace fhx
