#pragma once

// Configurable-precision binary floating point on top of MPFR.
//
// Every arithmetic result is rounded to the precision and rounding mode of the
// calling thread's current Context. Contexts nest through ScopedContext, so a
// computation can switch rounding direction per value (for instance, upward
// for even indices and downward for odd ones) without touching the FPU.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

namespace fhx::mp {

enum class Rounding { nearest, up, down };

struct Context {
  long bits = 320;
  Rounding rounding = Rounding::nearest;
};

class RoundingMonitor;

namespace detail {

inline thread_local Context current_context{};
inline thread_local RoundingMonitor* active_monitor = nullptr;

inline mpfr_rnd_t to_mpfr(Rounding r) {
  switch (r) {
    case Rounding::up:
      return MPFR_RNDU;
    case Rounding::down:
      return MPFR_RNDD;
    case Rounding::nearest:
      break;
  }
  return MPFR_RNDN;
}

inline mpfr_prec_t checked_prec(long bits) {
  if (bits < MPFR_PREC_MIN || bits > 1L << 20) {
    throw std::invalid_argument("mantissa bits out of range: " + std::to_string(bits));
  }
  return static_cast<mpfr_prec_t>(bits);
}

}  // namespace detail

inline const Context& current_context() { return detail::current_context; }

/// Installs a context for the lifetime of the object and restores the previous one.
class ScopedContext {
 public:
  explicit ScopedContext(Context ctx) : saved_(detail::current_context) {
    detail::checked_prec(ctx.bits);
    detail::current_context = ctx;
  }
  ScopedContext(long bits, Rounding rounding) : ScopedContext(Context{bits, rounding}) {}
  ~ScopedContext() { detail::current_context = saved_; }
  ScopedContext(const ScopedContext&) = delete;
  ScopedContext& operator=(const ScopedContext&) = delete;

 private:
  Context saved_;
};

enum class Op { add, sub, mul, div };

class Real;

namespace detail {
inline void observe(Op op, const Real& x, const Real& y, const Real& result);
}

class Real {
 public:
  Real() {
    mpfr_init2(v_, detail::checked_prec(current_context().bits));
    mpfr_set_zero(v_, 1);
  }

  Real(double x) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, detail::checked_prec(current_context().bits));
    mpfr_set_d(v_, x, rnd());
  }

  template <std::signed_integral I>
  Real(I x) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, detail::checked_prec(current_context().bits));
    mpfr_set_sj(v_, static_cast<intmax_t>(x), rnd());
  }

  template <std::unsigned_integral I>
  Real(I x) {  // NOLINT(google-explicit-constructor)
    mpfr_init2(v_, detail::checked_prec(current_context().bits));
    mpfr_set_uj(v_, static_cast<uintmax_t>(x), rnd());
  }

  /// Parses a decimal string at the current precision.
  static Real from_string(const std::string& s) {
    Real r;
    if (mpfr_set_str(r.v_, s.c_str(), 10, rnd()) != 0) {
      throw std::invalid_argument("not a number: " + s);
    }
    return r;
  }

  /// Copy of x rounded to the current context.
  static Real rounded(const Real& x) {
    Real r;
    mpfr_set(r.v_, x.v_, rnd());
    return r;
  }

  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }

  Real(Real&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }

  Real& operator=(const Real& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }

  Real& operator=(Real&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }

  ~Real() { mpfr_clear(v_); }

  long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }

  explicit operator double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  friend Real operator+(const Real& x, const Real& y) { return binary(Op::add, x, y); }
  friend Real operator-(const Real& x, const Real& y) { return binary(Op::sub, x, y); }
  friend Real operator*(const Real& x, const Real& y) { return binary(Op::mul, x, y); }
  friend Real operator/(const Real& x, const Real& y) { return binary(Op::div, x, y); }

  friend Real operator-(const Real& x) {
    Real r(x);
    mpfr_neg(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  Real& operator+=(const Real& y) { return *this = *this + y; }
  Real& operator-=(const Real& y) { return *this = *this - y; }
  Real& operator*=(const Real& y) { return *this = *this * y; }
  Real& operator/=(const Real& y) { return *this = *this / y; }

  friend bool operator==(const Real& x, const Real& y) { return mpfr_equal_p(x.v_, y.v_) != 0; }
  friend bool operator!=(const Real& x, const Real& y) { return !(x == y); }
  friend bool operator<(const Real& x, const Real& y) { return mpfr_less_p(x.v_, y.v_) != 0; }
  friend bool operator<=(const Real& x, const Real& y) { return mpfr_lessequal_p(x.v_, y.v_) != 0; }
  friend bool operator>(const Real& x, const Real& y) { return mpfr_greater_p(x.v_, y.v_) != 0; }
  friend bool operator>=(const Real& x, const Real& y) {
    return mpfr_greaterequal_p(x.v_, y.v_) != 0;
  }

  friend Real abs(const Real& x) {
    Real r(x);
    mpfr_abs(r.v_, r.v_, MPFR_RNDN);
    return r;
  }
  friend Real fabs(const Real& x) { return abs(x); }

  friend Real sin(const Real& x) { return unary(x, &mpfr_sin); }
  friend Real cos(const Real& x) { return unary(x, &mpfr_cos); }
  friend Real exp(const Real& x) { return unary(x, &mpfr_exp); }
  friend Real log(const Real& x) { return unary(x, &mpfr_log); }
  friend Real sqrt(const Real& x) { return unary(x, &mpfr_sqrt); }

  friend bool isfinite(const Real& x) { return mpfr_number_p(x.v_) != 0; }
  friend bool isnan(const Real& x) { return mpfr_nan_p(x.v_) != 0; }
  friend bool signbit(const Real& x) { return mpfr_signbit(x.v_) != 0; }
  friend int sign(const Real& x) { return mpfr_sgn(x.v_); }

  /// Decimal representation with the given number of significant digits.
  friend std::string to_string(const Real& x, int digits = 30) {
    char* raw = nullptr;
    const std::string fmt = "%." + std::to_string(digits) + "Rg";
    if (mpfr_asprintf(&raw, fmt.c_str(), x.v_) < 0) {
      throw std::runtime_error("mpfr_asprintf failed");
    }
    std::string out(raw);
    mpfr_free_str(raw);
    return out;
  }

 private:
  struct Uninit {};
  Real(Uninit, mpfr_prec_t prec) { mpfr_init2(v_, prec); }

  static mpfr_rnd_t rnd() { return detail::to_mpfr(current_context().rounding); }

  static Real binary(Op op, const Real& x, const Real& y) {
    Real r(Uninit{}, detail::checked_prec(current_context().bits));
    const mpfr_rnd_t mode = rnd();
    switch (op) {
      case Op::add:
        mpfr_add(r.v_, x.v_, y.v_, mode);
        break;
      case Op::sub:
        mpfr_sub(r.v_, x.v_, y.v_, mode);
        break;
      case Op::mul:
        mpfr_mul(r.v_, x.v_, y.v_, mode);
        break;
      case Op::div:
        mpfr_div(r.v_, x.v_, y.v_, mode);
        break;
    }
    if (detail::active_monitor != nullptr) detail::observe(op, x, y, r);
    return r;
  }

  static Real unary(const Real& x, int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)) {
    Real r(Uninit{}, detail::checked_prec(current_context().bits));
    fn(r.v_, x.v_, rnd());
    return r;
  }

  mpfr_t v_;
};

inline double to_double(const Real& x) { return static_cast<double>(x); }
inline double to_double(double x) { return x; }

/// Tracks the largest relative error |fl(x op y) - (x op y)| / |x op y| over the
/// operations performed while it is installed with MonitorScope.
class RoundingMonitor {
 public:
  void observe(Op op, const Real& x, const Real& y, const Real& result) {
    if (!isfinite(result)) return;
    const mpfr_prec_t ref_prec =
        4 * std::max({mpfr_get_prec(x.get()), mpfr_get_prec(y.get()), mpfr_get_prec(result.get())}) +
        64;
    mpfr_t exact, diff;
    mpfr_init2(exact, ref_prec);
    mpfr_init2(diff, ref_prec);
    switch (op) {
      case Op::add:
        mpfr_add(exact, x.get(), y.get(), MPFR_RNDN);
        break;
      case Op::sub:
        mpfr_sub(exact, x.get(), y.get(), MPFR_RNDN);
        break;
      case Op::mul:
        mpfr_mul(exact, x.get(), y.get(), MPFR_RNDN);
        break;
      case Op::div:
        mpfr_div(exact, x.get(), y.get(), MPFR_RNDN);
        break;
    }
    ++count_;
    if (!mpfr_zero_p(exact)) {
      mpfr_sub(diff, result.get(), exact, MPFR_RNDN);
      mpfr_div(diff, diff, exact, MPFR_RNDN);
      mpfr_abs(diff, diff, MPFR_RNDN);
      max_ = std::max(max_, mpfr_get_d(diff, MPFR_RNDU));
    }
    mpfr_clear(exact);
    mpfr_clear(diff);
  }

  double max_relative_error() const { return max_; }
  std::size_t operations() const { return count_; }
  void reset() {
    max_ = 0.0;
    count_ = 0;
  }

 private:
  double max_ = 0.0;
  std::size_t count_ = 0;
};

/// Installs a monitor on the calling thread for the lifetime of the scope.
class MonitorScope {
 public:
  explicit MonitorScope(RoundingMonitor& monitor) : saved_(detail::active_monitor) {
    detail::active_monitor = &monitor;
  }
  ~MonitorScope() { detail::active_monitor = saved_; }
  MonitorScope(const MonitorScope&) = delete;
  MonitorScope& operator=(const MonitorScope&) = delete;

 private:
  RoundingMonitor* saved_;
};

namespace detail {
inline void observe(Op op, const Real& x, const Real& y, const Real& result) {
  RoundingMonitor* m = active_monitor;
  active_monitor = nullptr;  // the reference computation is not itself monitored
  m->observe(op, x, y, result);
  active_monitor = m;
}
}  // namespace detail

/// Runs ops with a fresh monitor installed and returns the largest relative error seen.
template <class Fn>
double monitor_rounding(Fn&& ops) {
  RoundingMonitor monitor;
  {
    MonitorScope scope(monitor);
    std::forward<Fn>(ops)();
  }
  return monitor.max_relative_error();
}

}  // namespace fhx::mp

namespace fhx {

template <class T>
inline constexpr bool is_mp_v = std::is_same_v<std::remove_cvref_t<T>, mp::Real>;

/// Converts between double and mp::Real; conversions into mp::Real round to the current context.
template <class To, class From>
To numeric_cast(const From& x) {
  if constexpr (std::is_same_v<To, double>) {
    return static_cast<double>(x);
  } else if constexpr (is_mp_v<To> && is_mp_v<From>) {
    return mp::Real::rounded(x);
  } else {
    return To(x);
  }
}

}  // namespace fhx
