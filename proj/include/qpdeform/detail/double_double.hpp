#pragma once

// Minimal double-double arithmetic (error-free transformations) used to
// accumulate power series whose partial sums cancel heavily.

#include <cmath>
#include <complex>

namespace qpdeform::detail {

struct dd {
  double hi = 0.0;
  double lo = 0.0;

  constexpr dd() = default;
  constexpr dd(double h) : hi(h), lo(0.0) {}  // NOLINT implicit by intent
  constexpr dd(double h, double l) : hi(h), lo(l) {}

  double to_double() const noexcept { return hi + lo; }
};

inline dd two_sum(double a, double b) noexcept {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd quick_two_sum(double a, double b) noexcept {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) noexcept {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd operator+(dd a, dd b) noexcept {
  dd s = two_sum(a.hi, b.hi);
  dd t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(dd a) noexcept { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) noexcept { return a + (-b); }

inline dd operator*(dd a, dd b) noexcept {
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline dd operator/(dd a, dd b) noexcept {
  const double q1 = a.hi / b.hi;
  dd r = a - b * dd(q1);
  const double q2 = r.hi / b.hi;
  r = r - b * dd(q2);
  const double q3 = r.hi / b.hi;
  return dd(q1) + dd(q2) + dd(q3);
}

struct cdd {
  dd re;
  dd im;

  std::complex<double> to_complex() const noexcept {
    return {re.to_double(), im.to_double()};
  }
};

inline cdd operator+(const cdd& a, const cdd& b) noexcept {
  return {a.re + b.re, a.im + b.im};
}

inline cdd operator*(const cdd& a, const cdd& b) noexcept {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

/// a / b with b held in double precision.
inline cdd divide(const cdd& a, std::complex<double> b) noexcept {
  const dd br(b.real());
  const dd bi(b.imag());
  const dd norm = br * br + bi * bi;
  const dd re = a.re * br + a.im * bi;
  const dd im = a.im * br - a.re * bi;
  return {re / norm, im / norm};
}

inline double abs(const cdd& a) noexcept {
  return std::hypot(a.re.to_double(), a.im.to_double());
}

}  // namespace qpdeform::detail
