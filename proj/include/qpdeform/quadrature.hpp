#pragma once

// Composite Gauss-Legendre quadrature with panel doubling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "qpdeform/errors.hpp"

namespace qpdeform {

/// Nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

/// P_n(x) and P_n'(x) by the three-term recurrence.
inline void legendre_with_derivative(std::size_t n, double x, double& p,
                                     double& dp) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace detail

/// Newton iteration on P_n started from the usual cosine guess.
inline GaussRule gauss_legendre(std::size_t order) {
  if (order < 2) throw InvalidParameter("quadrature order must be >= 2");
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (n + 0.5));
    double p = 0.0;
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      detail::legendre_with_derivative(order, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    detail::legendre_with_derivative(order, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

/// The 64-point rule used for every panel unless told otherwise.
inline const GaussRule& gauss_legendre_64() {
  static const GaussRule rule = gauss_legendre(64);
  return rule;
}

/// Calls visit(x, w) for every node of `panels` equal panels on [a, b].
template <class Visit>
void for_each_node(double a, double b, std::size_t panels,
                   const GaussRule& rule, Visit&& visit) {
  if (panels == 0) throw InvalidParameter("panel count must be positive");
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double lo = a + h * static_cast<double>(k);
    const double mid = lo + 0.5 * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      visit(mid + 0.5 * h * rule.nodes[i], 0.5 * h * rule.weights[i]);
    }
  }
}

template <class F>
double integrate_composite(F&& f, double a, double b, std::size_t panels,
                           const GaussRule& rule = gauss_legendre_64()) {
  double sum = 0.0;
  for_each_node(a, b, panels, rule,
                [&](double x, double w) { sum += w * f(x); });
  return sum;
}

struct QuadratureSpec {
  std::size_t nodes_per_panel = 64;
  std::size_t initial_panels = 1;
  std::size_t max_panels = 1 << 12;
  /// Successive doublings must agree to this (relative, floored at 1).
  double rel_tol = 1e-8;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  bool converged = false;
};

/// Doubles the panel count until two successive estimates agree.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b,
                                    const QuadratureSpec& spec = {}) {
  const GaussRule rule = spec.nodes_per_panel == 64
                             ? gauss_legendre_64()
                             : gauss_legendre(spec.nodes_per_panel);
  std::size_t panels = spec.initial_panels;
  double prev = integrate_composite(f, a, b, panels, rule);
  while (panels < spec.max_panels) {
    panels *= 2;
    const double cur = integrate_composite(f, a, b, panels, rule);
    const double diff = std::abs(cur - prev);
    if (diff <= spec.rel_tol * std::max(std::abs(cur), 1.0))
      return {cur, diff, panels, true};
    prev = cur;
  }
  return {prev, std::numeric_limits<double>::infinity(), panels, false};
}

}  // namespace qpdeform
