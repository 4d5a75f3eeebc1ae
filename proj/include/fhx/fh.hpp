#pragma once

// Usual Floater-Hormann interpolants on equispaced nodes: barycentric and
// blended evaluation, and the derivative-matrix recurrences at the nodes.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhx/grid.hpp"
#include "fhx/mp.hpp"
#include "fhx/weights.hpp"

namespace fhx {

/// Thrown when an evaluation produces a non-finite value away from the nodes.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// sum w_i y_i/(t - x_i) / sum w_i/(t - x_i); exact node hits return the node value.
template <class Real>
Real barycentric(std::span<const Real> x, std::span<const Real> w, std::span<const Real> y,
                 const Real& t) {
  Real num(0);
  Real den(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (t == x[i]) return y[i];
    const Real c = w[i] / (t - x[i]);
    num += c * y[i];
    den += c;
  }
  using std::isfinite;
  const Real r = num / den;
  if (!isfinite(r)) throw numeric_error("barycentric quotient is not finite");
  return r;
}

template <class Real>
void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) +
                                " values, got " + std::to_string(got));
  }
}

}  // namespace detail

template <class Real>
Real fh_eval_barycentric(const EquispacedGrid& grid, const WeightVector<Real>& weights,
                         std::span<const Real> y, const Real& t) {
  const auto n1 = static_cast<std::size_t>(grid.n()) + 1;
  detail::require_size<Real>(weights.size(), n1, "weights");
  detail::require_size<Real>(y.size(), n1, "data");
  std::vector<Real> x;
  x.reserve(n1);
  const Real h = grid.spacing_as<Real>();
  const Real a(grid.a());
  for (int i = 0; i <= grid.n(); ++i) x.push_back(a + Real(i) * h);
  return detail::barycentric<Real>(x, weights.values(), y, t);
}

/// Original blended form sum lambda_i p_i / sum lambda_i. Each local
/// interpolant p_i is evaluated in Lagrange form l(t) sum_k v_k y_k/(t - x_k),
/// with v_k from the node differences; Newton divided differences lose about
/// 2^delta ulps here.
template <class Real>
Real fh_eval_blended(const EquispacedGrid& grid, int delta, std::span<const Real> y, const Real& t) {
  const int n = grid.n();
  if (delta < 0 || delta > n) throw std::invalid_argument("blended form needs 0 <= delta <= n");
  detail::require_size<Real>(y.size(), static_cast<std::size_t>(n) + 1, "data");
  std::vector<Real> x;
  for (int i = 0; i <= n; ++i) x.push_back(grid.node_as<Real>(i));
  for (int i = 0; i <= n; ++i) {
    if (t == x[static_cast<std::size_t>(i)]) return y[static_cast<std::size_t>(i)];
  }

  Real num(0);
  Real den(0);
  for (int i = 0; i <= n - delta; ++i) {
    Real prod(1);
    Real s(0);
    for (int k = i; k <= i + delta; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      prod *= (t - x[uk]);
      Real v(1);
      for (int m = i; m <= i + delta; ++m) {
        if (m != k) v *= (x[uk] - x[static_cast<std::size_t>(m)]);
      }
      s += y[uk] / (v * (t - x[uk]));
    }
    const Real p = prod * s;
    const Real lambda = (i % 2 == 0 ? Real(1) : Real(-1)) / prod;
    num += lambda * p;
    den += lambda;
  }
  using std::isfinite;
  const Real r = num / den;
  if (!isfinite(r)) throw numeric_error("blended quotient is not finite");
  return r;
}

/// Square matrix of the k-th derivative of the Lagrange fundamental rational functions at the nodes.
template <class Real>
struct DerivativeMatrix {
  int order = 0;
  int size = 0;  // number of nodes, n_local + 1
  bool normalized = false;
  std::vector<Real> entries;

  const Real& operator()(int i, int j) const {
    return entries[static_cast<std::size_t>(i * size + j)];
  }
  Real& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * size + j)]; }
};

inline constexpr int kMaxDerivativeOrder = 60;

namespace detail {

template <class Real>
void check_derivative_inputs(const WeightVector<Real>& w, int k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  if (k_max > kMaxDerivativeOrder) {
    throw std::invalid_argument("k_max must be <= " + std::to_string(kMaxDerivativeOrder));
  }
  for (const auto& v : w.values()) {
    if (v == Real(0)) throw std::invalid_argument("derivative recurrences need nonzero weights");
  }
}

// One step of the recurrence for a single row. With normalized=true the factor
// k/(x_i - x_j) becomes 1/(i - j) and h drops out.
template <class Real>
void derivative_row_step(std::span<const Real> w, int row, int k, const Real& h, bool normalized,
                         std::span<const Real> prev, std::span<Real> next) {
  const int m = static_cast<int>(w.size());
  const auto ur = static_cast<std::size_t>(row);
  Real diag(0);
  for (int j = 0; j < m; ++j) {
    if (j == row) continue;
    const auto uj = static_cast<std::size_t>(j);
    const Real inner = w[uj] / w[ur] * prev[ur] - prev[uj];
    Real v = normalized ? inner / Real(row - j) : Real(k) * inner / (Real(row - j) * h);
    diag -= v;
    next[uj] = std::move(v);
  }
  next[ur] = diag;
}

}  // namespace detail

/// Rows E^(k)_{row, .} for k = 0..k_max on equispaced local nodes with spacing h.
template <class Real>
std::vector<std::vector<Real>> derivative_row(const WeightVector<Real>& weights, const Real& h,
                                              int k_max, int row, bool normalized = false) {
  detail::check_derivative_inputs(weights, k_max);
  const auto m = weights.size();
  if (row < 0 || static_cast<std::size_t>(row) >= m) throw std::out_of_range("row outside nodes");
  std::vector<std::vector<Real>> rows;
  rows.reserve(static_cast<std::size_t>(k_max) + 1);
  std::vector<Real> e0(m, Real(0));
  e0[static_cast<std::size_t>(row)] = Real(1);
  rows.push_back(std::move(e0));
  for (int k = 1; k <= k_max; ++k) {
    std::vector<Real> next(m, Real(0));
    detail::derivative_row_step<Real>(weights.values(), row, k, h, normalized, rows.back(), next);
    rows.push_back(std::move(next));
  }
  return rows;
}

namespace detail {

template <class Real>
std::vector<DerivativeMatrix<Real>> derivative_matrices_impl(const WeightVector<Real>& weights,
                                                             const Real& h, int k_max,
                                                             bool normalized) {
  detail::check_derivative_inputs(weights, k_max);
  const int m = static_cast<int>(weights.size());
  std::vector<DerivativeMatrix<Real>> out;
  out.reserve(static_cast<std::size_t>(k_max) + 1);
  DerivativeMatrix<Real> e0{0, m, normalized,
                            std::vector<Real>(static_cast<std::size_t>(m * m), Real(0))};
  for (int i = 0; i < m; ++i) e0(i, i) = Real(1);
  out.push_back(std::move(e0));
  for (int k = 1; k <= k_max; ++k) {
    DerivativeMatrix<Real> next{k, m, normalized,
                                std::vector<Real>(static_cast<std::size_t>(m * m), Real(0))};
    const auto& prev = out.back();
    for (int i = 0; i < m; ++i) {
      std::span<const Real> prev_row(prev.entries.data() + i * m, static_cast<std::size_t>(m));
      std::span<Real> next_row(next.entries.data() + i * m, static_cast<std::size_t>(m));
      derivative_row_step<Real>(weights.values(), i, k, h, normalized, prev_row, next_row);
    }
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace detail

/// E^(0..k_max) for local nodes x_i = x_0 + i*h carrying the given weights.
template <class Real>
std::vector<DerivativeMatrix<Real>> derivative_matrices(const WeightVector<Real>& weights,
                                                        const Real& h, int k_max) {
  return detail::derivative_matrices_impl(weights, h, k_max, false);
}

/// h-free normalized matrices computed directly by the scaled recurrence.
template <class Real>
std::vector<DerivativeMatrix<Real>> normalized_derivative_matrices(const WeightVector<Real>& weights,
                                                                   int k_max) {
  return detail::derivative_matrices_impl(weights, Real(1), k_max, true);
}

/// Ebar^(k) = h^k E^(k) / k!.
template <class Real>
std::vector<DerivativeMatrix<Real>> normalize_derivative_matrices(
    const std::vector<DerivativeMatrix<Real>>& e, const Real& h) {
  std::vector<DerivativeMatrix<Real>> out;
  out.reserve(e.size());
  Real scale(1);  // h^k / k!
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (k > 0) scale = scale * h / Real(static_cast<int>(k));
    DerivativeMatrix<Real> m = e[k];
    m.normalized = true;
    for (auto& v : m.entries) v = v * scale;
    out.push_back(std::move(m));
  }
  return out;
}

/// sum_j E(row, j) y_j.
template <class Real>
Real fh_derivative_at_boundary(std::span<const Real> y, const DerivativeMatrix<Real>& e, int row) {
  detail::require_size<Real>(y.size(), static_cast<std::size_t>(e.size), "data");
  if (row < 0 || row >= e.size) throw std::out_of_range("row outside derivative matrix");
  Real s(0);
  for (int j = 0; j < e.size; ++j) s += e(row, j) * y[static_cast<std::size_t>(j)];
  return s;
}

}  // namespace fhx
