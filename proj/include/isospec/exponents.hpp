#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isospec/quadratic.hpp"
#include "isospec/rational.hpp"

namespace isospec::exponents {

/// Integer monodromy matrix [[a11, a12], [a21, a22]].
struct IntMatrix2 {
  std::int64_t a11 = 0;
  std::int64_t a12 = 0;
  std::int64_t a21 = 0;
  std::int64_t a22 = 0;

  std::int64_t trace() const { return a11 + a22; }
  std::int64_t det() const { return a11 * a22 - a12 * a21; }

  friend bool operator==(const IntMatrix2&, const IntMatrix2&) = default;
};

IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y);

/// Square integer matrix of arbitrary size, row-major. Used for suspensions.
struct IntMatrix {
  std::size_t size = 0;
  std::vector<std::int64_t> entries;

  std::int64_t at(std::size_t r, std::size_t c) const { return entries[r * size + c]; }
  std::int64_t& at(std::size_t r, std::size_t c) { return entries[r * size + c]; }

  static IntMatrix from(const IntMatrix2& m);
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

/// Exact spectrum of an admissible matrix. lambda > 1 > mu > 0, lambda*mu = det.
struct EigenPair {
  std::int64_t trace = 0;
  std::int64_t det = 0;
  std::int64_t discriminant = 0;
  QuadraticNumber lambda;
  QuadraticNumber mu;
  double lambda_value = 0.0;
  double mu_value = 0.0;
  /// 2 + log_lambda(mu) == 1 + log_lambda(det).
  double alpha = 0.0;
};

/// Validates admissibility and computes the spectrum.
/// Throws Error{NonHyperbolic} if t^2 <= 4d, Error{BadSpectrum} if d < 2 or d > t - 2.
EigenPair eigen_data(const IntMatrix2& a);

/// Exponent 1 + ln(d)/ln(lambda(t, d)) in double precision, no validation.
double exponent_of(std::int64_t t, std::int64_t d);

/// [[t, -d], [1, 0]]: trace t, determinant d.
IntMatrix2 companion_matrix(std::int64_t t, std::int64_t d);

struct EigenBounds {
  double lower = 0.0;   // t - 4
  double lambda = 0.0;  // leading eigenvalue
  double upper = 0.0;   // t
};

/// t - 4 <= lambda <= t for t >= 4 and t >= d >= 0. Throws PreconditionViolated.
EigenBounds eigen_bounds(std::int64_t t, std::int64_t d);

struct ChainLink {
  std::string relation;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;

  friend bool operator==(const ChainLink&, const ChainLink&) = default;
};

struct SynthesisCertificate {
  std::int64_t t = 0;
  std::int64_t d = 0;
  double alpha_target = 0.0;
  double epsilon = 0.0;
  double alpha_achieved = 0.0;
  /// Whether d was restricted to [2, t - 4].
  bool guarded = true;
  /// 2 <= d, d <= t - 4, t - 4 <= lambda, lambda <= t.
  std::vector<ChainLink> chain;

  double error() const;
  bool chain_holds() const;
  friend bool operator==(const SynthesisCertificate&, const SynthesisCertificate&) = default;
};

struct SynthesisResult {
  IntMatrix2 matrix;
  SynthesisCertificate certificate;
};

/// Range of determinants tried at each trace.
enum class DeterminantRange {
  Guarded,     // 2 <= d <= t - 4, where t - 4 <= lambda <= t holds
  Admissible,  // 2 <= d <= t - 2, every hyperbolic companion matrix
};

/// Scans t = 5, 6, ... for the first t admitting a companion matrix whose
/// true exponent is within epsilon of alpha.
/// Ties within one t: smallest |error|, then smallest d.
/// Throws BadTarget for alpha outside (1, 2), epsilon <= 0, or when t would
/// pass max_t.
SynthesisResult synthesize_matrix(double alpha, double epsilon,
                                  DeterminantRange range = DeterminantRange::Guarded,
                                  std::int64_t max_t = std::int64_t{1} << 40);

/// ((i + 1) alpha - i) / (i alpha - (i - 1)). Throws BadTarget unless
/// alpha in (1, 2] and i >= 0 (alpha == 1 is accepted as the fixed point).
double suspension_exponent(double alpha, int i);

/// Same closed form evaluated exactly.
Rational suspension_exponent(const Rational& alpha, int i);

/// s(0) = alpha, s(i) = 2 - 1/s(i - 1).
double suspension_recurrence(double alpha, int i);

/// diag(A, I_i).
IntMatrix suspend_matrix(const IntMatrix& a, int i);
IntMatrix suspend_matrix(const IntMatrix2& a, int i);

/// Parses "a,b;c,d".
std::optional<IntMatrix2> parse_matrix(const std::string& text);
std::string format_matrix(const IntMatrix2& m);

}  // namespace isospec::exponents
