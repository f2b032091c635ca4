#pragma once

#include <compare>
#include <ostream>
#include <string>

#include "paradox/rational.hpp"

namespace paradox {

/// Gaussian rational: complex number with exact rational real and imaginary
/// parts. Enough field structure for amplitudes and overlaps; no division.
struct ComplexRational {
  Rational re;
  Rational im;

  ComplexRational() = default;
  ComplexRational(Rational r) : re(std::move(r)) {}  // NOLINT(runtime/explicit)
  ComplexRational(long long r) : re(r) {}            // NOLINT(runtime/explicit)
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  ComplexRational conj() const { return {re, -im}; }

  /// |z|^2 as an exact rational.
  Rational norm2() const { return re * re + im * im; }

  friend ComplexRational operator+(const ComplexRational& a, const ComplexRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexRational operator-(const ComplexRational& a, const ComplexRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ComplexRational operator*(const ComplexRational& a, const ComplexRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexRational operator*(const Rational& s, const ComplexRational& z) {
    return {s * z.re, s * z.im};
  }
  ComplexRational& operator+=(const ComplexRational& o) { return *this = *this + o; }

  friend bool operator==(const ComplexRational&, const ComplexRational&) = default;
  friend std::strong_ordering operator<=>(const ComplexRational& a, const ComplexRational& b) {
    if (auto c = a.re <=> b.re; c != 0) return c;
    return a.im <=> b.im;
  }

  std::string str() const {
    if (im.is_zero()) return re.str();
    return re.str() + (im.is_negative() ? "" : "+") + im.str() + "i";
  }

  friend std::ostream& operator<<(std::ostream& os, const ComplexRational& z) {
    return os << z.str();
  }
};

}  // namespace paradox
