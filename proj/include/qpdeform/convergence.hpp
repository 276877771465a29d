#pragma once

// Parameter-regime classification and ratio-test corroboration of which of
// the series exp1, exp2 and Wbar converge.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qpdeform/defexp.hpp"
#include "qpdeform/errors.hpp"
#include "qpdeform/qnumbers.hpp"

namespace qpdeform {

enum class Regime { RegimeI, RegimeII, Degenerate, Outside };
enum class SeriesVerdict { Convergent, Divergent, Inconclusive };

inline std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::RegimeI: return "RegimeI";
    case Regime::RegimeII: return "RegimeII";
    case Regime::Degenerate: return "Degenerate";
    case Regime::Outside: return "Outside";
  }
  return "?";
}

inline std::string_view to_string(SeriesVerdict v) noexcept {
  switch (v) {
    case SeriesVerdict::Convergent: return "Convergent";
    case SeriesVerdict::Divergent: return "Divergent";
    case SeriesVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Band on the modulus conditions |q| <= 1, |p| = 1, ...
inline constexpr double kRegimeTolerance = 1e-9;

/// Regime I: |q| <= 1 and |p| = 1. Regime II: |q| = 1 and |p| >= 1. Points
/// with |q| = |p| = 1 belong to both and are reported as Regime I.
inline Regime classify_regime(const DeformationParams& params) {
  if (params.is_degenerate()) return Regime::Degenerate;
  const double aq = std::abs(params.q());
  const double ap = std::abs(params.p());
  const double tol = kRegimeTolerance;
  if (aq <= 1.0 + tol && std::abs(ap - 1.0) <= tol) return Regime::RegimeI;
  if (std::abs(aq - 1.0) <= tol && ap >= 1.0 - tol) return Regime::RegimeII;
  return Regime::Outside;
}

/// Distance in (|q|, |p|) to where the predicted behaviour changes: for valid
/// points the corner |q| = |p| = 1 or the degenerate set q = p^-1, for
/// Outside points the valid set itself.
inline double boundary_distance(const DeformationParams& params) {
  const double a = std::abs(params.q());
  const double b = std::abs(params.p());
  const Regime r = classify_regime(params);
  if (r == Regime::Degenerate) return 0.0;
  if (r != Regime::Outside)
    return std::min(std::abs(a - 1.0) + std::abs(b - 1.0),
                    std::abs(params.denom()));
  const double to_one = std::abs(b - 1.0) + std::max(a - 1.0, 0.0);
  const double to_two = std::abs(a - 1.0) + std::max(1.0 - b, 0.0);
  return std::min(to_one, to_two);
}

/// log|[n]_{q,p}| in log-polar form, valid far beyond where q^n overflows.
/// Returns -inf for vanishing basket numbers.
inline double log_abs_basket(std::size_t n, const DeformationParams& params) {
  const double ninf = -std::numeric_limits<double>::infinity();
  if (n == 0) return ninf;
  const double nn = static_cast<double>(n);
  if (params.is_degenerate())
    return std::log(nn) + (nn - 1.0) * std::log(std::abs(params.q()));
  const complex q = params.q();
  const complex s = params.p_inv();
  if (q == complex{0.0, 0.0})
    return nn * std::log(std::abs(s)) - std::log(std::abs(params.denom()));
  // |q^n - s^n| = |q|^n |1 - (s/q)^n|
  const double lq = std::log(std::abs(q));
  const double ls = std::log(std::abs(s));
  double lead = lq;
  double rel_log = nn * (ls - lq);
  double rel_arg = nn * (std::arg(s) - std::arg(q));
  if (rel_log > 0.0) {
    lead = ls;
    rel_log = -rel_log;
    rel_arg = -rel_arg;
  }
  rel_arg = std::remainder(rel_arg, 2.0 * std::numbers::pi);
  double log_diff;
  if (rel_log < -40.0) {
    log_diff = 0.0;
  } else {
    const complex w = std::exp(complex{rel_log, rel_arg});
    const double m = std::abs(1.0 - w);
    const double eps = std::numeric_limits<double>::epsilon();
    if (m <= 4.0 * nn * eps * 2.0) return ninf;
    log_diff = std::log(m);
  }
  return nn * lead + log_diff - std::log(std::abs(params.denom()));
}

/// log|x^n / [n]!| for n = 0..count-1 (identical for exp1 and exp2).
inline std::vector<double> log_terms_exp(double x_abs,
                                         const DeformationParams& params,
                                         std::size_t count) {
  std::vector<double> out(count);
  double acc = 0.0;
  const double lx = std::log(x_abs);
  for (std::size_t n = 0; n < count; ++n) {
    if (n > 0) acc += lx - log_abs_basket(n, params);
    out[n] = acc;
  }
  return out;
}

/// log| |[n]|! (iy)^n / (pi n!) | for n = 0..count-1.
inline std::vector<double> log_terms_wbar(double y,
                                          const DeformationParams& params,
                                          std::size_t count) {
  std::vector<double> out(count);
  double acc = -std::log(std::numbers::pi);
  const double ly = std::log(std::abs(y));
  for (std::size_t n = 0; n < count; ++n) {
    if (n > 0)
      acc += log_abs_basket(n, params) + ly - std::log(static_cast<double>(n));
    out[n] = acc;
  }
  return out;
}

struct RatioTestResult {
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
  /// exp(mean log ratio) over the window; 0 for terminating series.
  double limit_estimate = 0.0;
  double log_sigma = 0.0;
  bool terminated = false;
};

/// Windowed ratio test on log|t_n|. The estimate is the geometric mean of the
/// last `window` ratios |t_{n+1}/t_n| (a windowed root test); sigma is the
/// standard error of the mean log ratio. Convergent if
/// log(estimate) + 3 sigma < 0, Divergent if log(estimate) - 3 sigma > 0.
/// A sequence that becomes exactly zero terminates and is Convergent.
inline RatioTestResult ratio_test_log(std::span<const double> log_terms,
                                      std::size_t window) {
  if (window < 2) throw InvalidParameter("ratio window must be >= 2");
  const double ninf = -std::numeric_limits<double>::infinity();
  std::size_t nonzero = 0;
  std::optional<std::size_t> first_zero;
  for (std::size_t i = 0; i < log_terms.size(); ++i) {
    if (log_terms[i] == ninf) {
      if (!first_zero) first_zero = i;
    } else if (!first_zero) {
      ++nonzero;
    }
  }
  if (nonzero == 0) throw InvalidParameter("degenerate generator: all terms zero");
  if (first_zero) {
    RatioTestResult r;
    r.verdict = SeriesVerdict::Convergent;
    r.terminated = true;
    return r;
  }
  if (nonzero < 2 * window)
    throw InvalidParameter("ratio test needs at least 2*window nonzero terms");

  const std::size_t n = log_terms.size();
  std::vector<double> lr(window);
  for (std::size_t i = 0; i < window; ++i)
    lr[i] = log_terms[n - window + i] - log_terms[n - window + i - 1];
  double mean = 0.0;
  for (double v : lr) mean += v;
  mean /= static_cast<double>(window);
  double var = 0.0;
  for (double v : lr) var += (v - mean) * (v - mean);
  var /= static_cast<double>(window - 1);
  RatioTestResult r;
  r.log_sigma = std::sqrt(var / static_cast<double>(window));
  r.limit_estimate = std::exp(mean);
  if (mean + 3.0 * r.log_sigma < 0.0)
    r.verdict = SeriesVerdict::Convergent;
  else if (mean - 3.0 * r.log_sigma > 0.0)
    r.verdict = SeriesVerdict::Divergent;
  return r;
}

/// Same test on the terms themselves.
inline RatioTestResult ratio_test(std::span<const complex> terms,
                                  std::size_t window) {
  std::vector<double> logs(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) logs[i] = std::log(std::abs(terms[i]));
  return ratio_test_log(logs, window);
}

struct RatioTestOptions {
  std::size_t window = 50;
  std::size_t warmup = 100;
  /// Horizons double from warmup + window up to this many terms; the verdict
  /// is the one at the longest horizon.
  std::size_t max_terms = 1 << 14;
};

struct HorizonVerdict {
  RatioTestResult final;
  /// Limit estimate at each horizon.
  std::vector<double> estimates;
  /// Verdict unchanged between the two longest horizons.
  bool stable = true;
};

inline HorizonVerdict escalating_ratio_test(std::span<const double> log_terms,
                                            const RatioTestOptions& opt) {
  std::size_t horizon = opt.warmup + opt.window;
  if (log_terms.size() < horizon)
    throw InvalidParameter("not enough terms for the first horizon");
  HorizonVerdict hv;
  std::optional<SeriesVerdict> previous;
  while (true) {
    const std::size_t h = std::min(horizon, log_terms.size());
    const RatioTestResult r = ratio_test_log(log_terms.first(h), opt.window);
    hv.estimates.push_back(r.limit_estimate);
    if (previous) hv.stable = *previous == r.verdict;
    previous = r.verdict;
    hv.final = r;
    if (r.terminated || h == log_terms.size()) break;
    horizon *= 2;
  }
  return hv;
}

struct RegimeVerdict {
  DeformationParams params;
  Regime regime = Regime::Outside;
  /// exp1, exp2, Wbar
  std::array<SeriesVerdict, 3> per_series{SeriesVerdict::Inconclusive,
                                          SeriesVerdict::Inconclusive,
                                          SeriesVerdict::Inconclusive};
  /// Final ratio estimates: exp1/exp2 per x sample, then Wbar per y sample.
  std::vector<double> evidence;
};

struct Proposition1Row {
  complex Q;
  double y = 0.0;
  SeriesVerdict verdict = SeriesVerdict::Inconclusive;
  double limit_estimate = 0.0;
  bool stable = true;
  /// First n with [n]_Q = 0; the series then terminates.
  std::optional<std::size_t> root_of_unity_index;
};

/// Ratio tests on Wbar(y) with the symmetric basket [n]_Q.
inline std::vector<Proposition1Row> proposition1_check(
    complex Q, std::span<const double> y_samples,
    const RatioTestOptions& opt = {}) {
  if (Q == complex{0.0, 0.0} || Q == complex{1.0, 0.0} ||
      Q == complex{-1.0, 0.0})
    throw InvalidParameter("Q must differ from 0 and +-1");
  const DeformationParams params(Q, Q);
  std::vector<Proposition1Row> rows;
  for (double y : y_samples) {
    if (y == 0.0) throw InvalidParameter("y samples must be nonzero");
    const std::vector<double> logs = log_terms_wbar(y, params, opt.max_terms);
    const HorizonVerdict hv = escalating_ratio_test(logs, opt);
    Proposition1Row row;
    row.Q = Q;
    row.y = y;
    row.verdict = hv.final.verdict;
    row.limit_estimate = hv.final.limit_estimate;
    row.stable = hv.stable;
    for (std::size_t n = 1; n < logs.size(); ++n) {
      if (log_abs_basket(n, params) == -std::numeric_limits<double>::infinity()) {
        row.root_of_unity_index = n;
        break;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

struct Proposition2Row {
  RegimeVerdict verdict;
  double boundary_distance = 0.0;
  bool inconclusive_allowed = false;
  bool contradiction = false;
  /// Root-of-unity points are skipped: [n]! vanishes and exp1/exp2 are
  /// undefined past that index.
  std::optional<std::size_t> root_of_unity_index;
};

/// Combines per-sample verdicts: any Divergent wins, then any Inconclusive.
inline SeriesVerdict combine(std::span<const SeriesVerdict> vs) {
  bool inconclusive = false;
  for (SeriesVerdict v : vs) {
    if (v == SeriesVerdict::Divergent) return SeriesVerdict::Divergent;
    if (v == SeriesVerdict::Inconclusive) inconclusive = true;
  }
  return inconclusive ? SeriesVerdict::Inconclusive : SeriesVerdict::Convergent;
}

/// Points within this distance of a regime boundary may report Inconclusive.
inline constexpr double kBoundaryBand = 1e-2;

/// For each parameter point: regime plus ratio-test verdicts for exp1 and exp2
/// at x = f R for each fraction f (x = f when R is infinite) and for Wbar at
/// each y. A row contradicts the classification when a Regime I/II point has a
/// divergent series, an Outside point has none, or Inconclusive appears away
/// from every boundary. Degenerate points carry no prediction.
inline std::vector<Proposition2Row> proposition2_check(
    std::span<const DeformationParams> grid, std::span<const double> y_samples,
    std::span<const double> x_fractions, const RatioTestOptions& opt = {}) {
  if (grid.empty()) throw InvalidParameter("parameter grid is empty");
  std::vector<Proposition2Row> rows;
  rows.reserve(grid.size());
  for (const DeformationParams& params : grid) {
    Proposition2Row row{RegimeVerdict{params, classify_regime(params), {}, {}},
                        boundary_distance(params), false, false, std::nullopt};
    row.inconclusive_allowed = row.boundary_distance < kBoundaryBand;
    for (std::size_t n = 1; n < opt.max_terms; ++n) {
      if (log_abs_basket(n, params) == -std::numeric_limits<double>::infinity()) {
        row.root_of_unity_index = n;
        break;
      }
    }
    if (row.root_of_unity_index) {
      rows.push_back(std::move(row));
      continue;
    }
    const double R = convergence_radius(params);

    std::vector<SeriesVerdict> exp_v;
    for (double f : x_fractions) {
      const double x = std::isfinite(R) ? f * R : f;
      const auto logs = log_terms_exp(x, params, opt.max_terms);
      const HorizonVerdict hv = escalating_ratio_test(logs, opt);
      exp_v.push_back(hv.final.verdict);
      row.verdict.evidence.push_back(hv.final.limit_estimate);
    }
    std::vector<SeriesVerdict> wbar_v;
    for (double y : y_samples) {
      const auto logs = log_terms_wbar(y, params, opt.max_terms);
      const HorizonVerdict hv = escalating_ratio_test(logs, opt);
      wbar_v.push_back(hv.final.verdict);
      row.verdict.evidence.push_back(hv.final.limit_estimate);
    }
    const SeriesVerdict ve = combine(exp_v);
    row.verdict.per_series = {ve, ve, combine(wbar_v)};

    const auto& ps = row.verdict.per_series;
    const bool any_div = std::count(ps.begin(), ps.end(), SeriesVerdict::Divergent) > 0;
    const bool any_inc = std::count(ps.begin(), ps.end(), SeriesVerdict::Inconclusive) > 0;
    switch (row.verdict.regime) {
      case Regime::RegimeI:
      case Regime::RegimeII:
        row.contradiction = any_div || (any_inc && !row.inconclusive_allowed);
        break;
      case Regime::Outside:
        row.contradiction = !any_div && (!any_inc || !row.inconclusive_allowed);
        break;
      case Regime::Degenerate:
        row.contradiction = false;
        break;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Deterministic 100-point parameter sweep: 30 points of Regime I, 30 of
/// Regime II, 10 on |q| = |p| = 1 and 30 outside both regimes. Angles follow
/// a golden-ratio sequence so the grid is identical on every platform.
inline std::vector<DeformationParams> standard_sweep() {
  const double golden = 0.6180339887498949;
  auto angle = [golden](int k) {
    double f = golden * static_cast<double>(k);
    f -= std::floor(f);
    return std::numbers::pi * (2.0 * f - 1.0);
  };
  std::vector<DeformationParams> grid;
  int k = 1;
  auto push = [&](double aq, double ap) {
    for (;;) {
      const DeformationParams params(std::polar(aq, angle(k)), std::polar(ap, angle(k + 7)));
      k += 2;
      // keep clear of q = 1/p, where the radius blows up
      if (std::abs(params.denom()) >= 0.05) {
        grid.push_back(params);
        return;
      }
    }
  };
  for (int i = 0; i < 30; ++i) push(0.05 + 0.9 * (i + 0.5) / 30.0, 1.0);
  for (int i = 0; i < 30; ++i) push(1.0, 1.05 + 1.95 * (i + 0.5) / 30.0);
  for (int i = 0; i < 10; ++i) push(1.0, 1.0);
  const double outside[][2] = {{1.3, 1.0}, {2.0, 1.0},  {1.1, 1.0}, {0.5, 0.7},
                               {0.8, 0.5}, {0.5, 1.5},  {0.3, 2.5}, {1.5, 1.5},
                               {1.2, 2.0}, {2.5, 0.8},  {0.9, 1.3}, {1.05, 1.0},
                               {1.0, 0.9}, {1.0, 0.5},  {1.4, 0.6}};
  for (int rep = 0; rep < 2; ++rep)
    for (const auto& m : outside) push(m[0], m[1]);
  return grid;
}

/// Q values for the symmetric-basket test: 10 angles at each modulus in
/// {0.5, 0.9, 1.1, 2}.
inline std::vector<complex> standard_prop1_off_circle() {
  std::vector<complex> qs;
  for (double m : {0.5, 0.9, 1.1, 2.0})
    for (int j = 0; j < 10; ++j) qs.push_back(std::polar(m, 0.3 + 0.61 * j));
  return qs;
}

/// 10 unit-circle Q = e^{i theta} with theta / pi irrational-looking (far
/// from small-denominator rationals).
inline std::vector<complex> standard_prop1_on_circle() {
  std::vector<complex> qs;
  for (int j = 0; j < 10; ++j) qs.push_back(std::polar(1.0, 0.5 + 0.2718281828 * j));
  return qs;
}

}  // namespace qpdeform
