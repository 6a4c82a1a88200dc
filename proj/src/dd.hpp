#pragma once

#include <cmath>

#include "rotation.hpp"

namespace corechase {

// Double-double value: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
// giving roughly 106 significand bits.  Round-tripping a double through dd
// is exact.  Only the operations the coefficient reconstruction needs.
struct dd {
  double hi = 0.0, lo = 0.0;

  dd() = default;
  dd(double h) : hi(h) {}
  dd(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi + lo; }
};

namespace dd_detail {

inline dd quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline dd operator+(const dd& a, const dd& b) {
  using namespace dd_detail;
  dd s = two_sum(a.hi, b.hi);
  const dd t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd operator-(const dd& a) { return {-a.hi, -a.lo}; }
inline dd operator-(const dd& a, const dd& b) { return a + (-b); }

inline dd operator*(const dd& a, const dd& b) {
  using namespace dd_detail;
  dd p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

// Complex value in double-double components.
struct ddcplx {
  dd re, im;

  ddcplx() = default;
  ddcplx(const dd& r, const dd& i) : re(r), im(i) {}
  ddcplx(const cplx& z) : re(z.real()), im(z.imag()) {}

  cplx to_cplx() const { return {re.to_double(), im.to_double()}; }
};

inline ddcplx operator+(const ddcplx& a, const ddcplx& b) { return {a.re + b.re, a.im + b.im}; }
inline ddcplx operator-(const ddcplx& a, const ddcplx& b) { return {a.re - b.re, a.im - b.im}; }
inline ddcplx operator*(const ddcplx& a, const ddcplx& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

}  // namespace corechase
