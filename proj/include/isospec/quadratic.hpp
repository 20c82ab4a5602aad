#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "isospec/rational.hpp"

namespace isospec {

/// Exact element a + b*sqrt(disc) of the quadratic field Q(sqrt(disc)).
/// Arithmetic between numbers with different discriminants is rejected.
class QuadraticNumber {
 public:
  QuadraticNumber() = default;
  QuadraticNumber(Rational a, Rational b, std::int64_t disc) : a_(a), b_(b), disc_(disc) {
    if (disc < 0) throw std::domain_error("negative discriminant");
  }

  /// (p + q*sqrt(disc)) / 2, the form eigenvalues of integer 2x2 matrices take.
  static QuadraticNumber half_form(std::int64_t p, std::int64_t q, std::int64_t disc) {
    return {Rational(p, 2), Rational(q, 2), disc};
  }

  const Rational& rational_part() const { return a_; }
  const Rational& surd_part() const { return b_; }
  std::int64_t disc() const { return disc_; }

  /// Numerators of the (p + q*sqrt(disc))/2 form; throws if the value is not
  /// representable with denominator 2.
  std::int64_t half_p() const { return as_half(a_); }
  std::int64_t half_q() const { return as_half(b_); }

  bool is_rational() const { return b_.num() == 0; }

  long double to_long_double() const {
    return static_cast<long double>(a_.num()) / a_.den() +
           static_cast<long double>(b_.num()) / b_.den() * std::sqrt(static_cast<long double>(disc_));
  }
  double to_double() const { return static_cast<double>(to_long_double()); }

  friend QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y) {
    return {x.a_ + y.a_, x.b_ + y.b_, common_disc(x, y)};
  }
  friend QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y) {
    return {x.a_ - y.a_, x.b_ - y.b_, common_disc(x, y)};
  }
  friend QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y) {
    const std::int64_t disc = common_disc(x, y);
    return {x.a_ * y.a_ + x.b_ * y.b_ * Rational(disc), x.a_ * y.b_ + x.b_ * y.a_, disc};
  }
  QuadraticNumber conjugate() const { return {a_, -b_, disc_}; }

  friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
    if (x.a_ != y.a_ || x.b_ != y.b_) return false;
    return x.is_rational() || x.disc_ == y.disc_;
  }

  std::string str() const {
    return "(" + a_.str() + ") + (" + b_.str() + ")*sqrt(" + std::to_string(disc_) + ")";
  }

 private:
  static std::int64_t common_disc(const QuadraticNumber& x, const QuadraticNumber& y) {
    if (x.is_rational()) return y.disc_;
    if (y.is_rational() || x.disc_ == y.disc_) return x.disc_;
    throw std::domain_error("quadratic numbers from different fields");
  }
  static std::int64_t as_half(const Rational& r) {
    const Rational twice = r * Rational(2);
    if (twice.den() != 1) throw std::domain_error("value not of the form p/2");
    return twice.num();
  }

  Rational a_;
  Rational b_;
  std::int64_t disc_ = 0;
};

}  // namespace isospec
