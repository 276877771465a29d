#pragma once

// Resolution of unity: target moments |[n]|!/pi, the characteristic series
// Wbar(y), weight recovery by polynomial moment reconstruction and by
// regularized inverse Fourier transform, and quadrature audits of
//   pi * int_0^R x^n Wtilde(x) dx / |[n]|! = 1.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qpdeform/defexp.hpp"
#include "qpdeform/errors.hpp"
#include "qpdeform/fock.hpp"
#include "qpdeform/qnumbers.hpp"
#include "qpdeform/quadrature.hpp"

namespace qpdeform {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool finite() const noexcept { return std::isfinite(hi); }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct MomentSet {
  DeformationParams params;
  std::size_t n_max = 0;
  /// mu_n = |[n]|! / pi
  std::vector<double> moments;
  Interval support;
};

inline MomentSet target_moments(const DeformationParams& params,
                                std::size_t n_max) {
  const QNumberSequence seq = qp_sequence(n_max, params);
  if (seq.first_zero)
    throw RootOfUnityDegeneracy(*seq.first_zero, "target_moments");
  MomentSet m{params, n_max, {}, {0.0, convergence_radius(params)}};
  m.moments.reserve(n_max + 1);
  for (double f : seq.abs_factorials) m.moments.push_back(f / std::numbers::pi);
  return m;
}

/// Wbar(y) = sum_n |[n]|! (iy)^n / (pi n!). Entire in y whenever |[n]| stays
/// bounded; terms still growing at the cap give DivergentInput.
inline SeriesEvaluation wbar_series(double y, const DeformationParams& params,
                                    const SeriesControl& ctrl = {}) {
  const QNumberSequence seq = qp_sequence(ctrl.n_max, params);
  const detail::cdd iy{detail::dd(0.0), detail::dd(y)};
  auto factor = [&](std::size_t n) {
    const double mag = std::abs(seq.numbers[n]);
    const detail::cdd num = iy * detail::cdd{detail::dd(mag), detail::dd(0.0)};
    return detail::divide(num, complex{static_cast<double>(n), 0.0});
  };
  bool growing = false;
  SeriesEvaluation e = detail::sum_ratio_series(factor, -1.0, ctrl, &growing);
  e.value /= std::numbers::pi;
  e.tail_bound /= std::numbers::pi;
  e.rounding_bound /= std::numbers::pi;
  if (e.verdict != Verdict::Converged && growing)
    e.verdict = Verdict::DivergentInput;
  return e;
}

enum class Basis { ShiftedLegendre, GeneralizedLaguerre };
enum class WeightMethod { MomentReconstruction, FourierInversion };
/// Auxiliary is Wtilde = N^2 W; Physical is W itself.
enum class WeightKind { Auxiliary, Physical };

inline std::string_view to_string(Basis b) noexcept {
  return b == Basis::ShiftedLegendre ? "ShiftedLegendre" : "GeneralizedLaguerre";
}
inline std::string_view to_string(WeightMethod m) noexcept {
  return m == WeightMethod::MomentReconstruction ? "MomentReconstruction"
                                                 : "FourierInversion";
}
inline std::string_view to_string(WeightKind k) noexcept {
  return k == WeightKind::Auxiliary ? "Auxiliary" : "Physical";
}

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 201;

  std::vector<double> points() const {
    if (count < 2) throw InvalidParameter("grid needs at least two points");
    std::vector<double> xs(count);
    const double h = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i)
      xs[i] = lo + h * static_cast<double>(i);
    xs.back() = hi;
    return xs;
  }
};

struct WeightFunction {
  Interval support;
  WeightMethod method = WeightMethod::MomentReconstruction;
  WeightKind kind = WeightKind::Auxiliary;
  std::optional<Basis> basis;
  double laguerre_alpha = 0.0;
  std::vector<double> coeffs;
  std::vector<double> grid_x;
  std::vector<double> grid_values;
  double min_value = 0.0;

  // moment reconstruction diagnostics
  std::vector<double> moment_residuals;
  double condition_estimate = 0.0;
  // Fourier inversion diagnostics
  std::vector<double> imag_part;
  double y_cut = 0.0;
  double damping = 0.0;
  std::size_t y_panels = 0;
  std::vector<std::string> warnings;

  /// Pointwise evaluation; empty for grid-only weights.
  std::function<double(double)> evaluator;

  double operator()(double x) const {
    if (evaluator) return evaluator(x);
    return interpolate(x);
  }

  double interpolate(double x) const {
    if (grid_x.empty()) throw InvalidParameter("weight has no grid");
    if (x < grid_x.front() || x > grid_x.back()) return 0.0;
    auto it = std::upper_bound(grid_x.begin(), grid_x.end(), x);
    if (it == grid_x.end()) return grid_values.back();
    const auto i = static_cast<std::size_t>(it - grid_x.begin());
    const double t = (x - grid_x[i - 1]) / (grid_x[i] - grid_x[i - 1]);
    return (1.0 - t) * grid_values[i - 1] + t * grid_values[i];
  }
};

namespace detail {

/// Generalized binomial C(a, m) for real a and integer m >= 0.
inline double binom(double a, std::size_t m) {
  double r = 1.0;
  for (std::size_t j = 1; j <= m; ++j)
    r *= (a - static_cast<double>(m) + static_cast<double>(j)) /
         static_cast<double>(j);
  return r;
}

inline double factorial(std::size_t n) {
  double r = 1.0;
  for (std::size_t k = 2; k <= n; ++k) r *= static_cast<double>(k);
  return r;
}

/// sum_k c_k P_k(t) by the three-term recurrence.
inline double legendre_series(std::span<const double> c, double t) {
  double p0 = 1.0;
  double p1 = t;
  double s = c[0];
  if (c.size() > 1) s += c[1] * t;
  for (std::size_t k = 1; k + 1 < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk + 1.0) * t * p1 - kk * p0) / (kk + 1.0);
    s += c[k + 1] * p2;
    p0 = p1;
    p1 = p2;
  }
  return s;
}

/// sum_k c_k L_k^alpha(x).
inline double laguerre_series(std::span<const double> c, double alpha,
                              double x) {
  double l0 = 1.0;
  double l1 = 1.0 + alpha - x;
  double s = c[0];
  if (c.size() > 1) s += c[1] * l1;
  for (std::size_t k = 1; k + 1 < c.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double l2 =
        ((2.0 * kk + 1.0 + alpha - x) * l1 - (kk + alpha) * l0) / (kk + 1.0);
    s += c[k + 1] * l2;
    l0 = l1;
    l1 = l2;
  }
  return s;
}

inline void fill_grid(WeightFunction& w, const std::vector<double>& xs) {
  w.grid_x = xs;
  w.grid_values.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) w.grid_values[i] = w(xs[i]);
  w.min_value = *std::min_element(w.grid_values.begin(), w.grid_values.end());
}

inline GridSpec default_grid(const Interval& support) {
  if (support.finite()) return {support.lo, support.hi, 201};
  return {0.0, 20.0, 201};
}

}  // namespace detail

/// Limit on the row-equilibrated 2-norm condition number of the basis-moment
/// matrix.
inline constexpr double kMaxMomentCondition = 1e12;

/// Degree-d expansion matching mu_0..mu_d: shifted Legendre on a finite
/// support [0, R], x^alpha e^-x times generalized Laguerre on [0, inf).
///
/// Coefficients come from projecting the moments onto the orthogonal basis.
/// The stored residuals re-derive each moment from the basis-moment matrix
/// M_jk = int x^j phi_k, which is also what the condition estimate measures.
inline WeightFunction weight_from_moments(
    const MomentSet& moments, std::size_t degree,
    std::optional<GridSpec> grid = std::nullopt, double laguerre_alpha = 0.0) {
  if (degree > moments.n_max || degree >= moments.moments.size())
    throw InvalidParameter("degree exceeds the available moments");
  if (moments.support.lo != 0.0)
    throw InvalidParameter("moment support must start at 0");
  if (!(laguerre_alpha > -1.0))
    throw InvalidParameter("Laguerre alpha must exceed -1");
  const std::size_t d = degree;
  const std::vector<double>& mu = moments.moments;
  const bool finite = moments.support.finite();
  const double R = moments.support.hi;

  WeightFunction w;
  w.support = moments.support;
  w.method = WeightMethod::MomentReconstruction;
  w.kind = WeightKind::Auxiliary;
  w.basis = finite ? Basis::ShiftedLegendre : Basis::GeneralizedLaguerre;
  w.laguerre_alpha = finite ? 0.0 : laguerre_alpha;
  w.coeffs.assign(d + 1, 0.0);

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d + 1),
                                            static_cast<Eigen::Index>(d + 1));
  if (finite) {
    // P_k(2x/R - 1) = sum_i (-1)^(k+i) C(k,i) C(k+i,i) (x/R)^i, norm R/(2k+1)
    for (std::size_t k = 0; k <= d; ++k) {
      double s = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i <= k; ++i) {
        const double a = ((k + i) % 2 ? -1.0 : 1.0) *
                         detail::binom(static_cast<double>(k), i) *
                         detail::binom(static_cast<double>(k + i), i);
        s += a * mu[i] / scale;
        scale *= R;
      }
      w.coeffs[k] = (2.0 * static_cast<double>(k) + 1.0) / R * s;
    }
    // int_0^R x^j P_k(2x/R-1) dx = R^(j+1) (j!)^2 / ((j-k)! (j+k+1)!)
    for (std::size_t j = 0; j <= d; ++j) {
      const double rj = std::pow(R, static_cast<double>(j + 1));
      for (std::size_t k = 0; k <= j; ++k) {
        const double lg = 2.0 * std::lgamma(static_cast<double>(j) + 1.0) -
                          std::lgamma(static_cast<double>(j - k) + 1.0) -
                          std::lgamma(static_cast<double>(j + k) + 2.0);
        M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            rj * std::exp(lg);
      }
    }
  } else {
    const double alpha = laguerre_alpha;
    // L_k^a(x) = sum_i (-1)^i C(k+a, k-i) x^i / i!, norm Gamma(k+a+1)/k!
    for (std::size_t k = 0; k <= d; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i <= k; ++i) {
        const double a = (i % 2 ? -1.0 : 1.0) *
                         detail::binom(static_cast<double>(k) + alpha, k - i) /
                         detail::factorial(i);
        s += a * mu[i];
      }
      const double norm =
          std::exp(std::lgamma(static_cast<double>(k) + alpha + 1.0) -
                   std::lgamma(static_cast<double>(k) + 1.0));
      w.coeffs[k] = s / norm;
    }
    // int x^j x^a e^-x L_k^a dx = (-1)^k C(j,k) Gamma(j+a+1)
    for (std::size_t j = 0; j <= d; ++j) {
      const double g = std::tgamma(static_cast<double>(j) + alpha + 1.0);
      for (std::size_t k = 0; k <= j; ++k)
        M(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            (k % 2 ? -1.0 : 1.0) * detail::binom(static_cast<double>(j), k) * g;
    }
  }

  Eigen::MatrixXd scaled = M;
  for (Eigen::Index j = 0; j < scaled.rows(); ++j) {
    const double rmax = scaled.row(j).cwiseAbs().maxCoeff();
    if (rmax > 0.0) scaled.row(j) /= rmax;
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& sv = svd.singularValues();
  w.condition_estimate = sv(sv.size() - 1) > 0.0
                             ? sv(0) / sv(sv.size() - 1)
                             : std::numeric_limits<double>::infinity();
  if (w.condition_estimate > kMaxMomentCondition)
    throw IllConditioned(w.condition_estimate, kMaxMomentCondition);

  const Eigen::Map<const Eigen::VectorXd> c(w.coeffs.data(),
                                            static_cast<Eigen::Index>(d + 1));
  const Eigen::VectorXd reproduced = M * c;
  w.moment_residuals.resize(d + 1);
  for (std::size_t j = 0; j <= d; ++j)
    w.moment_residuals[j] =
        (reproduced(static_cast<Eigen::Index>(j)) - mu[j]) / mu[j];

  if (finite) {
    w.evaluator = [coeffs = w.coeffs, R](double x) {
      if (x < 0.0 || x > R) return 0.0;
      return detail::legendre_series(coeffs, 2.0 * x / R - 1.0);
    };
  } else {
    w.evaluator = [coeffs = w.coeffs, alpha = w.laguerre_alpha](double x) {
      if (x < 0.0) return 0.0;
      const double env = std::exp(-x) * (alpha == 0.0 ? 1.0 : std::pow(x, alpha));
      return env * detail::laguerre_series(coeffs, alpha, x);
    };
  }
  detail::fill_grid(w, grid.value_or(detail::default_grid(w.support)).points());
  return w;
}

/// Characteristic series as a function of y; used to plug in closed forms.
using CharacteristicFn = std::function<complex(double)>;

/// Above this |Wbar(y_cut)| e^(-damping y_cut^2) the window truncation is
/// flagged in `warnings`.
inline constexpr double kFourierWindowTolerance = 1e-8;

/// Wtilde(x) ~ (1/2pi) int_{-Y}^{Y} e^(-iyx) e^(-damping y^2) Wbar(y) dy by
/// composite Gauss-Legendre with panel doubling; the imaginary part of the
/// integral is kept as a diagnostic.
inline WeightFunction weight_from_fourier(const CharacteristicFn& wbar,
                                          Interval support, double y_cut,
                                          double damping, const GridSpec& grid,
                                          double rel_tol = 1e-10) {
  if (!(y_cut > 0.0)) throw InvalidParameter("y_cut must be positive");
  if (!(damping >= 0.0)) throw InvalidParameter("damping must be nonnegative");
  const std::vector<double> xs = grid.points();
  double xmax = 0.0;
  for (double x : xs) xmax = std::max(xmax, std::abs(x));
  const double span = support.finite() ? support.hi : xmax;
  // Panels sized so each holds a bounded number of oscillations.
  const double freq = xmax + span + 1.0;
  std::size_t panels = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::ceil(2.0 * y_cut * freq / 40.0)));

  struct Nodes {
    std::vector<double> y;
    std::vector<complex> weighted;  // w_i e^(-damping y^2) Wbar(y_i) / 2pi
  };
  auto sample = [&](std::size_t np) {
    auto nodes = std::make_shared<Nodes>();
    for_each_node(-y_cut, y_cut, np, gauss_legendre_64(),
                  [&](double y, double wt) {
                    nodes->y.push_back(y);
                    nodes->weighted.push_back(wt * std::exp(-damping * y * y) *
                                              wbar(y) /
                                              (2.0 * std::numbers::pi));
                  });
    return nodes;
  };
  auto transform = [](const Nodes& nodes, double x) {
    complex s{0.0, 0.0};
    for (std::size_t i = 0; i < nodes.y.size(); ++i)
      s += std::polar(1.0, -nodes.y[i] * x) * nodes.weighted[i];
    return s;
  };

  std::shared_ptr<Nodes> nodes = sample(panels);
  std::vector<complex> prev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) prev[i] = transform(*nodes, xs[i]);
  bool converged = false;
  for (int round = 0; round < 6; ++round) {
    auto finer = sample(2 * panels);
    double diff = 0.0;
    double mag = 0.0;
    std::vector<complex> cur(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      cur[i] = transform(*finer, xs[i]);
      diff = std::max(diff, std::abs(cur[i] - prev[i]));
      mag = std::max(mag, std::abs(cur[i]));
    }
    panels *= 2;
    nodes = finer;
    prev = std::move(cur);
    if (diff <= rel_tol * std::max(mag, 1.0)) {
      converged = true;
      break;
    }
  }

  WeightFunction w;
  w.support = support;
  w.method = WeightMethod::FourierInversion;
  w.kind = WeightKind::Auxiliary;
  w.y_cut = y_cut;
  w.damping = damping;
  w.y_panels = panels;
  if (!converged)
    w.warnings.push_back("y-quadrature did not settle under panel doubling");
  const double edge = std::max(std::abs(wbar(y_cut)), std::abs(wbar(-y_cut))) *
                      std::exp(-damping * y_cut * y_cut);
  if (edge > kFourierWindowTolerance)
    w.warnings.push_back("non-decaying integrand: |Wbar(+-y_cut)| e^(-damping "
                         "y_cut^2) = " + std::to_string(edge));
  w.evaluator = [nodes, transform](double x) {
    return transform(*nodes, x).real();
  };
  w.grid_x = xs;
  w.grid_values.resize(xs.size());
  w.imag_part.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    w.grid_values[i] = prev[i].real();
    w.imag_part[i] = prev[i].imag();
  }
  w.min_value = *std::min_element(w.grid_values.begin(), w.grid_values.end());
  return w;
}

/// The same inversion with Wbar summed from its series for `params`. The
/// series cancels heavily at large |y|; if its rounding error on the window
/// exceeds kFourierWindowTolerance that is flagged in `warnings`.
inline WeightFunction weight_from_fourier(const DeformationParams& params,
                                          double y_cut, double damping,
                                          const GridSpec& grid,
                                          const SeriesControl& ctrl = {}) {
  if (params.q() == complex{1.0, 0.0} && params.p() == complex{1.0, 0.0}) {
    // the series is geometric here and only converges for |y| < 1; use its
    // continuation 1 / (pi (1 - iy))
    auto classical = [](double y) {
      return 1.0 / (std::numbers::pi * complex{1.0, -y});
    };
    return weight_from_fourier(classical, {0.0, convergence_radius(params)},
                               y_cut, damping, grid);
  }
  auto worst = std::make_shared<double>(0.0);
  auto wbar = [params, ctrl, worst, damping](double y) {
    const SeriesEvaluation e = wbar_series(y, params, ctrl);
    if (e.verdict != Verdict::Converged)
      throw Divergence("Wbar(" + std::to_string(y) + ") series verdict " +
                       std::string(to_string(e.verdict)));
    *worst = std::max(*worst, e.rounding_bound * std::exp(-damping * y * y));
    return e.value;
  };
  WeightFunction w = weight_from_fourier(
      wbar, {0.0, convergence_radius(params)}, y_cut, damping, grid);
  if (*worst > kFourierWindowTolerance)
    w.warnings.push_back("Wbar series loses significance on the window: "
                         "rounding bound " + std::to_string(*worst));
  return w;
}

/// W(x) = exp2(x) Wtilde(x) sampled on the auxiliary weight's grid.
inline WeightFunction physical_weight(const WeightFunction& wtilde,
                                      const DeformationParams& params) {
  if (wtilde.kind != WeightKind::Auxiliary)
    throw InvalidParameter("physical_weight expects an auxiliary weight");
  const double R = convergence_radius(params);
  WeightFunction w;
  w.support = wtilde.support;
  w.method = wtilde.method;
  w.kind = WeightKind::Physical;
  w.grid_x = wtilde.grid_x;
  w.grid_values.resize(w.grid_x.size());
  w.warnings = wtilde.warnings;
  SeriesControl ctrl;
  ctrl.n_max = 4000;
  for (std::size_t i = 0; i < w.grid_x.size(); ++i) {
    const double x = w.grid_x[i];
    if (x < 0.0 || !(x < R))
      throw InvalidParameter("grid point " + std::to_string(x) +
                             " outside [0, R) of exp2");
    const SeriesEvaluation e = exp2(x, params, ctrl);
    w.grid_values[i] = e.value.real() * wtilde.grid_values[i];
  }
  w.min_value = *std::min_element(w.grid_values.begin(), w.grid_values.end());
  return w;
}

struct ResolutionReport {
  /// max_n |M_n - 1|
  double residual = 0.0;
  /// M_n = pi int x^n Wtilde dx / |[n]|!
  std::vector<double> normalized_moments;
  std::size_t panels = 0;
  double upper_limit = 0.0;
};

namespace detail {

/// Wtilde regardless of how the weight is stored.
inline std::function<double(double)> auxiliary_view(
    const WeightFunction& w, const DeformationParams& params) {
  if (w.kind == WeightKind::Auxiliary) return [&w](double x) { return w(x); };
  return [&w, params](double x) {
    SeriesControl ctrl;
    ctrl.n_max = 4000;
    return w(x) / exp2(x, params, ctrl).value.real();
  };
}

inline double integration_limit(const WeightFunction& w, std::size_t dim) {
  if (w.support.finite()) {
    if (!w.evaluator && !w.grid_x.empty())
      return std::min(w.support.hi, w.grid_x.back());
    return w.support.hi;
  }
  if (!w.evaluator && !w.grid_x.empty()) return w.grid_x.back();
  return 8.0 * (static_cast<double>(dim) + w.laguerre_alpha) + 80.0;
}

}  // namespace detail

/// Reduced radial form of the resolution of unity, after the exact angular
/// integration: M_n for n = 0..dim-1 by composite Gauss-Legendre (64 nodes per
/// panel) with panel doubling until all M_n settle to `quad.rel_tol`.
inline ResolutionReport resolution_residual(const WeightFunction& weight,
                                            const DeformationParams& params,
                                            std::size_t dim,
                                            const QuadratureSpec& quad = {}) {
  if (dim == 0) throw InvalidParameter("dim must be positive");
  const QNumberSequence seq = qp_sequence(dim, params);
  if (seq.has_zero_below(dim))
    throw RootOfUnityDegeneracy(*seq.first_zero, "resolution_residual");
  const auto wt = detail::auxiliary_view(weight, params);
  const double upper = detail::integration_limit(weight, dim);
  const GaussRule rule = quad.nodes_per_panel == 64
                             ? gauss_legendre_64()
                             : gauss_legendre(quad.nodes_per_panel);

  auto moments_at = [&](std::size_t panels) {
    std::vector<double> m(dim, 0.0);
    for_each_node(0.0, upper, panels, rule, [&](double x, double w) {
      const double f = w * wt(x);
      double xn = 1.0;
      for (std::size_t n = 0; n < dim; ++n) {
        m[n] += f * xn;
        xn *= x;
      }
    });
    for (std::size_t n = 0; n < dim; ++n)
      m[n] *= std::numbers::pi / seq.abs_factorials[n];
    return m;
  };

  std::size_t panels = quad.initial_panels;
  std::vector<double> prev = moments_at(panels);
  while (panels < quad.max_panels) {
    panels *= 2;
    std::vector<double> cur = moments_at(panels);
    double change = 0.0;
    for (std::size_t n = 0; n < dim; ++n)
      change = std::max(change, std::abs(cur[n] - prev[n]) /
                                    std::max(std::abs(cur[n]), 1.0));
    prev = std::move(cur);
    if (change <= quad.rel_tol) {
      ResolutionReport r;
      r.normalized_moments = prev;
      r.panels = panels;
      r.upper_limit = upper;
      for (double m : prev) r.residual = std::max(r.residual, std::abs(m - 1.0));
      return r;
    }
  }
  throw QuadratureFailure(
      "resolution quadrature did not settle; weight representation too coarse "
      "for the requested dimension");
}

struct PolarReport {
  /// sum_{n,m} [int d^2z W |z><z|]_{nm} on the truncated basis.
  Matrix identity;
  /// max |I - 1|
  double deviation = 0.0;
  double max_offdiag = 0.0;
  double max_imag_diag = 0.0;
  /// |I(panels) - I(2 panels)| max-norm.
  double error_estimate = 0.0;
};

/// Full two-dimensional polar quadrature of int d^2z W(|z|^2) |z><z| without
/// using the angular orthogonality: radial composite Gauss-Legendre in
/// r in [0, sqrt(R)] and an equispaced theta rule with `n_theta` points.
inline PolarReport resolution_polar(const WeightFunction& weight,
                                    const DeformationParams& params,
                                    std::size_t dim, std::size_t radial_panels,
                                    std::size_t n_theta) {
  if (dim == 0 || radial_panels == 0 || n_theta == 0)
    throw InvalidParameter("polar quadrature sizes must be positive");
  const QNumberSequence seq = qp_sequence(dim, params);
  if (seq.has_zero_below(dim))
    throw RootOfUnityDegeneracy(*seq.first_zero, "resolution_polar");
  const auto wt = detail::auxiliary_view(weight, params);
  const double rmax = std::sqrt(detail::integration_limit(weight, dim));
  const auto d = static_cast<Eigen::Index>(dim);

  auto integrate = [&](std::size_t panels) {
    Matrix I = Matrix::Zero(d, d);
    Vector v(d);
    const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n_theta);
    for_each_node(0.0, rmax, panels, gauss_legendre_64(),
                  [&](double r, double wr) {
                    const double radial = wr * r * wt(r * r) * dtheta;
                    if (radial == 0.0) return;
                    for (std::size_t t = 0; t < n_theta; ++t) {
                      const complex z =
                          std::polar(r, dtheta * static_cast<double>(t));
                      complex zn{1.0, 0.0};
                      for (Eigen::Index n = 0; n < d; ++n) {
                        v(n) = zn / seq.sqrt_factorials[static_cast<std::size_t>(n)];
                        zn *= z;
                      }
                      I.noalias() += radial * (v * v.adjoint());
                    }
                  });
    return I;
  };

  PolarReport rep;
  const Matrix coarse = integrate(radial_panels);
  rep.identity = integrate(2 * radial_panels);
  rep.error_estimate = (rep.identity - coarse).cwiseAbs().maxCoeff();
  const Matrix dev = rep.identity - Matrix::Identity(d, d);
  rep.deviation = dev.cwiseAbs().maxCoeff();
  for (Eigen::Index n = 0; n < d; ++n) {
    rep.max_imag_diag = std::max(rep.max_imag_diag, std::abs(rep.identity(n, n).imag()));
    for (Eigen::Index m = 0; m < d; ++m)
      if (m != n)
        rep.max_offdiag = std::max(rep.max_offdiag, std::abs(rep.identity(n, m)));
  }
  return rep;
}

}  // namespace qpdeform
