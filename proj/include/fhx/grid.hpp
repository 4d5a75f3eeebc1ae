#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fhx/mp.hpp"

namespace fhx {

/// Nodes x_i = a + i*h, 0 <= i <= n, with h = (b - a)/n.
class EquispacedGrid {
 public:
  EquispacedGrid(double a, double b, int n) : a_(a), b_(b), n_(n) {
    if (n < 1) throw std::invalid_argument("grid needs n >= 1 (got " + std::to_string(n) + ")");
    if (!(b > a)) throw std::invalid_argument("grid needs b > a");
    h_ = (b - a) / n;
  }

  double a() const { return a_; }
  double b() const { return b_; }
  int n() const { return n_; }
  double h() const { return h_; }

  double node(int i) const { return a_ + i * h_; }

  /// Spacing evaluated in Real: (b - a)/n rounded once in the current context.
  template <class Real>
  Real spacing_as() const {
    return (Real(b_) - Real(a_)) / Real(n_);
  }

  /// Node a + i*h evaluated in Real; identical to node(i) for Real = double.
  template <class Real>
  Real node_as(int i) const {
    return Real(a_) + Real(i) * spacing_as<Real>();
  }

  std::vector<double> nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n_) + 1);
    for (int i = 0; i <= n_; ++i) x[static_cast<std::size_t>(i)] = node(i);
    return x;
  }

 private:
  double a_;
  double b_;
  int n_;
  double h_;
};

/// The grid continued by d equispaced nodes on each side: x~_i = x_0 + i*h for -d <= i <= n+d.
class ExtendedGrid {
 public:
  ExtendedGrid(EquispacedGrid base, int d) : base_(base), d_(d) {
    if (d < 0) throw std::invalid_argument("extension width d must be >= 0");
  }

  const EquispacedGrid& base() const { return base_; }
  int d() const { return d_; }
  int n() const { return base_.n(); }
  double h() const { return base_.h(); }
  int first_index() const { return -d_; }
  int last_index() const { return base_.n() + d_; }
  std::size_t size() const { return static_cast<std::size_t>(base_.n() + 2 * d_ + 1); }

  // Same expression as EquispacedGrid::node so the shared nodes agree bit for bit.
  double node(int i) const { return base_.node(i); }

  template <class Real>
  Real node_as(int i) const {
    return base_.node_as<Real>(i);
  }

  template <class Real = double>
  std::vector<Real> nodes_as() const {
    std::vector<Real> x;
    x.reserve(size());
    const Real h = base_.spacing_as<Real>();
    const Real a(base_.a());
    for (int i = first_index(); i <= last_index(); ++i) x.push_back(a + Real(i) * h);
    return x;
  }

 private:
  EquispacedGrid base_;
  int d_;
};

inline EquispacedGrid make_equispaced(double a, double b, int n) { return EquispacedGrid(a, b, n); }

inline ExtendedGrid extend(const EquispacedGrid& grid, int d) { return ExtendedGrid(grid, d); }

}  // namespace fhx
