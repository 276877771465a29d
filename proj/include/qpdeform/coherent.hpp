#pragma once

// Candidate coherent states ||z> = sum z^n / sqrt([n]!) |n>, their normalized
// versions |z> = exp2(|z|^2)^(-1/2) ||z>, overlaps and label distances.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "qpdeform/defexp.hpp"
#include "qpdeform/errors.hpp"
#include "qpdeform/fock.hpp"
#include "qpdeform/qnumbers.hpp"

namespace qpdeform {

struct CoherentState {
  complex z;
  DeformationParams params;
  std::vector<complex> coeffs;
  bool normalized = false;
  /// exp2(|z|^2)^(-1/2); 1 for unnormalized states.
  double norm_const = 1.0;
  /// Bound on 1 - sum |c_n|^2 / <z|z>_exact: series truncation at dim plus the
  /// exp2 tail and accumulated rounding.
  double tail_bound = 0.0;

  std::size_t dim() const noexcept { return coeffs.size(); }

  double norm_sq() const {
    double s = 0.0;
    for (const complex& c : coeffs) s += std::norm(c);
    return s;
  }
};

namespace detail {

inline SeriesControl normalization_control() {
  SeriesControl ctrl;
  ctrl.n_max = 4000;
  ctrl.tol = 1e-17;
  return ctrl;
}

inline void require_in_disk(complex z, const DeformationParams& params) {
  const double r = convergence_radius(params);
  if (!(std::norm(z) < r))
    throw LabelOutOfDisk("|z|^2 = " + std::to_string(std::norm(z)) +
                         " is not inside the convergence disk R = " +
                         std::to_string(r));
}

}  // namespace detail

/// Fock truncation whose dropped exp2(|z|^2) tail is below machine precision
/// relative to the sum.
inline std::size_t auto_dim(complex z, const DeformationParams& params) {
  detail::require_in_disk(z, params);
  const SeriesEvaluation e =
      exp2(std::norm(z), params, detail::normalization_control());
  if (e.verdict != Verdict::Converged)
    throw Divergence("exp2(|z|^2) did not converge; cannot size the state");
  return std::max<std::size_t>(e.terms_used, 2);
}

/// Coefficients c_n = z^n / sqrt([n]!) on |0..dim-1>, scaled by
/// exp2(|z|^2)^(-1/2) when `normalize`. dim = 0 picks auto_dim.
inline CoherentState make_state(complex z, const DeformationParams& params,
                                std::size_t dim = 0, bool normalize = true) {
  detail::require_in_disk(z, params);
  if (dim == 0) dim = auto_dim(z, params);
  const QNumberSequence seq = qp_sequence(dim, params);
  if (seq.has_zero_below(dim))
    throw RootOfUnityDegeneracy(*seq.first_zero, "make_state");

  CoherentState s{z, params, {}, normalize, 1.0, 0.0};
  s.coeffs.resize(dim);
  s.coeffs[0] = 1.0;
  for (std::size_t n = 1; n < dim; ++n)
    s.coeffs[n] = s.coeffs[n - 1] * z / std::sqrt(seq.numbers[n]);

  const SeriesEvaluation e =
      exp2(std::norm(z), params, detail::normalization_control());
  if (e.verdict == Verdict::DivergentInput)
    throw LabelOutOfDisk("exp2(|z|^2) diverges for this label");
  const double total = e.value.real();
  const double partial = s.norm_sq();
  const double eps = std::numeric_limits<double>::epsilon();
  s.tail_bound = std::max(0.0, 1.0 - partial / total) + e.tail_bound / total +
                 4.0 * static_cast<double>(dim) * eps;
  if (normalize) {
    s.norm_const = 1.0 / std::sqrt(total);
    for (complex& c : s.coeffs) c *= s.norm_const;
  }
  return s;
}

struct OverlapResult {
  /// sum conj(c_n) c'_n
  complex value;
  /// N(|z|^2) N(|z'|^2) exp2(conj(z) z')
  complex closed_form;
  /// Agreement the two are expected to reach.
  double tolerance = 0.0;

  bool consistent() const noexcept {
    return std::abs(value - closed_form) <= tolerance;
  }
};

namespace detail {

inline void require_compatible(const CoherentState& s1,
                               const CoherentState& s2) {
  if (!(s1.params == s2.params))
    throw InvalidParameter("states built from different parameters");
}

}  // namespace detail

inline OverlapResult overlap(const CoherentState& s1, const CoherentState& s2) {
  detail::require_compatible(s1, s2);
  if (!s1.normalized || !s2.normalized)
    throw InvalidParameter("overlap requires normalized states");
  const std::size_t d = std::min(s1.dim(), s2.dim());
  complex sum{0.0, 0.0};
  for (std::size_t n = 0; n < d; ++n) sum += std::conj(s1.coeffs[n]) * s2.coeffs[n];

  const SeriesEvaluation e = exp2_complex(std::conj(s1.z) * s2.z, s1.params,
                                          detail::normalization_control());
  OverlapResult r;
  r.value = sum;
  r.closed_form = s1.norm_const * s2.norm_const * e.value;
  const double tails = s1.tail_bound + s2.tail_bound;
  r.tolerance = 10.0 * tails + s1.norm_const * s2.norm_const * e.tail_bound;
  // a shorter companion state truncates the sum further
  if (s1.dim() != s2.dim()) {
    const auto& longer = s1.dim() > s2.dim() ? s1 : s2;
    double rest = 0.0;
    for (std::size_t n = d; n < longer.dim(); ++n) rest += std::norm(longer.coeffs[n]);
    r.tolerance += std::sqrt(rest);
  }
  return r;
}

struct DistanceResult {
  /// 2 (1 - Re <z|z'>)
  double value = 0.0;
  /// sum |c_n - c'_n|^2
  double direct = 0.0;
};

inline DistanceResult label_distance_sq(const CoherentState& s1,
                                        const CoherentState& s2) {
  const OverlapResult ov = overlap(s1, s2);
  DistanceResult r;
  r.value = 2.0 * (1.0 - ov.value.real());
  const std::size_t d = std::max(s1.dim(), s2.dim());
  for (std::size_t n = 0; n < d; ++n) {
    const complex c1 = n < s1.dim() ? s1.coeffs[n] : complex{};
    const complex c2 = n < s2.dim() ? s2.coeffs[n] : complex{};
    r.direct += std::norm(c1 - c2);
  }
  return r;
}

struct AnnihilatorResidual {
  /// ||(a c - z c)_{0..dim-2}||_2
  double interior = 0.0;
  /// |(a c - z c)_{dim-1}| = |z c_{dim-1}|, pure truncation.
  double last_component = 0.0;
};

inline AnnihilatorResidual annihilator_residual(const CoherentState& state,
                                                const FockOperators& ops) {
  if (ops.dim != state.dim())
    throw DimensionMismatch("Fock dimension differs from the state dimension");
  if (ops.Q != state.params.q() || !ops.p_pow_neg_N ||
      (ops.dim > 1 && (*ops.p_pow_neg_N)(1, 1) != state.params.p_inv()))
    throw InvalidParameter("operators and state use different parameters");
  Vector c(static_cast<Eigen::Index>(state.dim()));
  for (std::size_t n = 0; n < state.dim(); ++n)
    c(static_cast<Eigen::Index>(n)) = state.coeffs[n];
  const Vector diff = ops.a * c - state.z * c;
  const Eigen::Index last = diff.size() - 1;
  return {diff.head(last).norm(), std::abs(diff(last))};
}

}  // namespace qpdeform
