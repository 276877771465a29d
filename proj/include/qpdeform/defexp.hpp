#pragma once

// The two deformed exponentials
//   exp1(x) = sum x^n / [n]!      exp2(x) = sum x^n / |[n]|!
// with a certified-by-construction truncation rule, and the radius
// R_{q,p} = 1 / |q - p^-1| of their convergence disk.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <deque>
#include <limits>
#include <string_view>

#include "qpdeform/detail/double_double.hpp"
#include "qpdeform/errors.hpp"
#include "qpdeform/qnumbers.hpp"

namespace qpdeform {

struct SeriesControl {
  std::size_t n_max = 500;
  double tol = 1e-15;
  std::size_t min_terms = 10;

  void validate() const {
    if (n_max == 0) throw InvalidParameter("n_max must be positive");
    if (min_terms == 0) throw InvalidParameter("min_terms must be positive");
    if (min_terms > n_max) throw InvalidParameter("min_terms exceeds n_max");
    if (!(tol > 0.0)) throw InvalidParameter("tol must be positive");
  }
};

enum class Verdict { Converged, Truncated, DivergentInput };

inline std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Truncated: return "Truncated";
    case Verdict::DivergentInput: return "DivergentInput";
  }
  return "?";
}

struct SeriesEvaluation {
  complex value;
  std::size_t terms_used = 0;
  /// Estimated absolute truncation error.
  double tail_bound = 0.0;
  Verdict verdict = Verdict::Truncated;
  /// Estimated absolute rounding error, 2 eps sum (n+1)|t_n|: term n carries n
  /// rounded double factors. Large when the partial sums cancel.
  double rounding_bound = 0.0;
};

/// 1/|q - p^-1|, or +infinity on the degenerate branch.
inline double convergence_radius(const DeformationParams& params) {
  if (params.is_degenerate()) return std::numeric_limits<double>::infinity();
  return 1.0 / std::abs(params.denom());
}

namespace detail {

/// Sums 1 + sum_{n>=1} t_n with t_n = t_{n-1} * factor(n), accumulating in
/// double-double. `factor(n)` returns the ratio t_n / t_{n-1}.
///
/// Stopping: first n >= min_terms with |t_n| <= tol*max(|S|,1),
/// |t_n| <= |t_{n-1}| and geometric tail |t_n| r/(1-r) <= tol*max(|S|,1).
/// `ratio_bound` is the asymptotic ratio r when known (finite radius); when it
/// is negative the largest recent local ratio stands in for it.
template <class Factor>
SeriesEvaluation sum_ratio_series(Factor&& factor, double ratio_bound,
                                  const SeriesControl& ctrl,
                                  bool* growing_at_cap = nullptr) {
  ctrl.validate();
  cdd partial{dd(1.0), dd(0.0)};
  cdd term = partial;
  double prev_abs = 1.0;
  std::deque<double> recent;
  double weighted_abs = 1.0;
  const double eps = std::numeric_limits<double>::epsilon();
  SeriesEvaluation out{};
  out.tail_bound = std::numeric_limits<double>::infinity();
  out.verdict = Verdict::Truncated;
  const double inf = std::numeric_limits<double>::infinity();

  for (std::size_t n = 1; n <= ctrl.n_max; ++n) {
    term = term * factor(n);
    partial = partial + term;
    const double t_abs = abs(term);
    const double s_abs = abs(partial);
    weighted_abs += static_cast<double>(n + 1) * t_abs;
    out.rounding_bound = 2.0 * eps * weighted_abs;
    if (!std::isfinite(t_abs) || !std::isfinite(s_abs)) {
      out.value = partial.to_complex();
      out.terms_used = n + 1;
      out.tail_bound = inf;
      if (growing_at_cap) *growing_at_cap = true;
      return out;
    }
    const double local = prev_abs > 0.0 ? t_abs / prev_abs : 0.0;
    recent.push_back(local);
    if (recent.size() > ctrl.min_terms) recent.pop_front();

    double r = ratio_bound;
    if (r < 0.0) r = *std::max_element(recent.begin(), recent.end());
    const double tail = t_abs == 0.0 ? 0.0
                        : r < 1.0    ? t_abs * r / (1.0 - r)
                                     : inf;
    const double scale = ctrl.tol * std::max(s_abs, 1.0);
    out.value = partial.to_complex();
    out.terms_used = n + 1;
    out.tail_bound = tail;
    if (n >= ctrl.min_terms && t_abs <= scale && t_abs <= prev_abs &&
        tail <= scale) {
      out.verdict = Verdict::Converged;
      return out;
    }
    if (n == ctrl.n_max && growing_at_cap) *growing_at_cap = t_abs > prev_abs;
    prev_abs = t_abs;
  }
  return out;
}

inline cdd to_cdd(complex z) { return {dd(z.real()), dd(z.imag())}; }

inline SeriesEvaluation divergent_input() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  return {complex{nan, nan}, 0, inf, Verdict::DivergentInput, inf};
}

/// Evaluates sum w^n / d_n! where d_n = basket(n) for the given sequence.
template <class Divisor>
SeriesEvaluation deformed_exp(complex w, const DeformationParams& params,
                              const SeriesControl& ctrl, Divisor&& divisor,
                              const char* name) {
  ctrl.validate();
  const double radius = convergence_radius(params);
  const double aw = std::abs(w);
  if (std::isfinite(radius) && aw >= radius) return divergent_input();

  const QNumberSequence seq = qp_sequence(ctrl.n_max, params);
  const cdd wd = to_cdd(w);
  auto factor = [&](std::size_t n) {
    if (seq.numbers[n] == complex{0.0, 0.0})
      throw RootOfUnityDegeneracy(n, name);
    return divide(wd, divisor(seq.numbers[n]));
  };
  const double r = std::isfinite(radius) ? aw / radius : -1.0;
  return sum_ratio_series(factor, r, ctrl);
}

}  // namespace detail

/// exp1_{q,p}(x) = sum_n x^n / [n]_{q,p}!.
inline SeriesEvaluation exp1(complex x, const DeformationParams& params,
                             const SeriesControl& ctrl = {}) {
  return detail::deformed_exp(
      x, params, ctrl, [](complex b) { return b; }, "exp1");
}

/// exp2_{q,p}(w) = sum_n w^n / |[n]_{q,p}|! for complex w (used by overlaps).
inline SeriesEvaluation exp2_complex(complex w, const DeformationParams& params,
                                     const SeriesControl& ctrl = {}) {
  return detail::deformed_exp(
      w, params, ctrl, [](complex b) { return complex{std::abs(b), 0.0}; },
      "exp2");
}

/// exp2_{q,p}(x) for real x >= 0; partial sums are monotone.
inline SeriesEvaluation exp2(double x, const DeformationParams& params,
                             const SeriesControl& ctrl = {}) {
  if (!(x >= 0.0)) throw InvalidParameter("exp2 requires x >= 0");
  SeriesEvaluation e = exp2_complex(complex{x, 0.0}, params, ctrl);
  e.value = complex{e.value.real(), 0.0};
  return e;
}

}  // namespace qpdeform
