#pragma once

// Basket numbers [n]_{q,p} = (q^n - p^-n) / (q - p^-1), their factorials and
// modulus-factorials.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "qpdeform/errors.hpp"

namespace qpdeform {

using complex = std::complex<double>;

/// |q - p^-1| below this routes [n] through the analytic limit n q^(n-1).
inline constexpr double kDegeneracyThreshold = 1e-12;

/// The deformation pair (q, p) with the derived quantities every other module
/// needs. Construction validates p != 0, so a live object is always usable.
class DeformationParams {
 public:
  DeformationParams(complex q, complex p,
                    double degeneracy_threshold = kDegeneracyThreshold)
      : q_(q), p_(p), threshold_(degeneracy_threshold) {
    if (p == complex{0.0, 0.0}) throw InvalidParameter("p must be nonzero");
    if (!std::isfinite(q.real()) || !std::isfinite(q.imag()) ||
        !std::isfinite(p.real()) || !std::isfinite(p.imag()))
      throw InvalidParameter("q and p must be finite");
    if (!(degeneracy_threshold >= 0.0))
      throw InvalidParameter("degeneracy threshold must be nonnegative");
    p_inv_ = 1.0 / p_;
    denom_ = q_ - p_inv_;
  }

  complex q() const noexcept { return q_; }
  complex p() const noexcept { return p_; }
  complex p_inv() const noexcept { return p_inv_; }
  /// q - p^-1
  complex denom() const noexcept { return denom_; }
  double degeneracy_threshold() const noexcept { return threshold_; }
  bool is_degenerate() const noexcept { return std::abs(denom_) < threshold_; }

  DeformationParams conj() const {
    return DeformationParams(std::conj(q_), std::conj(p_), threshold_);
  }

  friend bool operator==(const DeformationParams& a,
                         const DeformationParams& b) noexcept {
    return a.q_ == b.q_ && a.p_ == b.p_ && a.threshold_ == b.threshold_;
  }

 private:
  complex q_;
  complex p_;
  double threshold_;
  complex p_inv_;
  complex denom_;
};

namespace detail {

/// Running-product power; exact for exactly representable products.
inline complex ipow(complex base, std::size_t n) {
  complex r{1.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) r *= base;
  return r;
}

/// [n] from the already formed powers q^n and p^-n. A numerator that is zero
/// to within the rounding of the running products is snapped to exactly 0 so
/// that roots of unity give genuinely vanishing basket numbers.
inline complex basket_from_powers(std::size_t n, complex q_n, complex pinv_n,
                                  const DeformationParams& params) {
  if (n == 0) return {0.0, 0.0};
  if (n == 1) return {1.0, 0.0};
  const complex num = q_n - pinv_n;
  const double scale = std::abs(q_n) + std::abs(pinv_n);
  const double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(num) <= 4.0 * static_cast<double>(n) * eps * scale)
    return {0.0, 0.0};
  return num / params.denom();
}

}  // namespace detail

/// [n]_{q,p}. Exact 0 for n = 0 and exact 1 for n = 1.
inline complex qp_number(std::size_t n, const DeformationParams& params) {
  if (n == 0) return {0.0, 0.0};
  if (params.is_degenerate()) {
    return static_cast<double>(n) * detail::ipow(params.q(), n - 1);
  }
  return detail::basket_from_powers(n, detail::ipow(params.q(), n),
                                    detail::ipow(params.p_inv(), n), params);
}

/// Symmetric basket [n]_Q = (Q^n - Q^-n) / (Q - Q^-1); Q = +-1 goes through the
/// analytic limit n Q^(n-1).
inline complex qp_number_special(std::size_t n, complex Q) {
  if (Q == complex{0.0, 0.0}) throw InvalidParameter("Q must be nonzero");
  return qp_number(n, DeformationParams(Q, Q));
}

/// Basket numbers and factorials for n = 0..n_max.
///
/// `sqrt_factorials[n]` is the product of principal square roots of [1]..[n].
/// That branch of sqrt([n]!) is the one the ladder operators reproduce, since
/// a^+ is built from principal roots of the individual [n].
struct QNumberSequence {
  DeformationParams params;
  std::size_t n_max = 0;
  std::vector<complex> numbers;
  std::vector<complex> factorials;
  std::vector<double> abs_factorials;
  std::vector<complex> sqrt_factorials;
  /// Sum of log|[k]|, k = 1..n; -inf once a basket number vanishes.
  std::vector<double> log_abs_factorials;
  /// First n >= 1 with [n] = 0, if any.
  std::optional<std::size_t> first_zero;
  /// First index where a factorial entry overflowed or underflowed.
  std::optional<std::size_t> first_nonfinite;

  bool has_zero_below(std::size_t n) const noexcept {
    return first_zero && *first_zero < n;
  }
};

inline QNumberSequence qp_sequence(std::size_t n_max,
                                   const DeformationParams& params) {
  QNumberSequence seq{params, n_max, {}, {}, {}, {}, {}, std::nullopt,
                      std::nullopt};
  seq.numbers.reserve(n_max + 1);
  seq.factorials.reserve(n_max + 1);
  seq.abs_factorials.reserve(n_max + 1);
  seq.sqrt_factorials.reserve(n_max + 1);
  seq.log_abs_factorials.reserve(n_max + 1);

  seq.numbers.push_back({0.0, 0.0});
  seq.factorials.push_back({1.0, 0.0});
  seq.abs_factorials.push_back(1.0);
  seq.sqrt_factorials.push_back({1.0, 0.0});
  seq.log_abs_factorials.push_back(0.0);

  complex q_n{1.0, 0.0};
  complex pinv_n{1.0, 0.0};
  for (std::size_t n = 1; n <= n_max; ++n) {
    complex b;
    if (params.is_degenerate()) {
      b = static_cast<double>(n) * q_n;  // q_n holds q^(n-1) here
      q_n *= params.q();
    } else {
      q_n *= params.q();
      pinv_n *= params.p_inv();
      b = detail::basket_from_powers(n, q_n, pinv_n, params);
    }
    if (b == complex{0.0, 0.0} && !seq.first_zero) seq.first_zero = n;
    seq.numbers.push_back(b);
    seq.factorials.push_back(seq.factorials.back() * b);
    seq.abs_factorials.push_back(seq.abs_factorials.back() * std::abs(b));
    seq.sqrt_factorials.push_back(seq.sqrt_factorials.back() * std::sqrt(b));
    seq.log_abs_factorials.push_back(seq.log_abs_factorials.back() +
                                     std::log(std::abs(b)));
    const complex f = seq.factorials.back();
    const double af = seq.abs_factorials.back();
    const bool finite = std::isfinite(f.real()) && std::isfinite(f.imag()) &&
                        std::isfinite(af);
    const bool underflow = !seq.first_zero && af == 0.0;
    if ((!finite || underflow) && !seq.first_nonfinite)
      seq.first_nonfinite = n;
  }
  return seq;
}

}  // namespace qpdeform
