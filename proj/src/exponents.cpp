#include "isospec/exponents.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "isospec/error.hpp"

namespace isospec::exponents {

namespace {

constexpr std::int64_t kEntryLimit = std::int64_t{1} << 30;

double leading_eigenvalue(std::int64_t t, std::int64_t d) {
  const long double disc = static_cast<long double>(t) * t - 4.0L * d;
  return static_cast<double>((t + std::sqrt(disc)) / 2.0L);
}

}  // namespace

IntMatrix2 operator*(const IntMatrix2& x, const IntMatrix2& y) {
  return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
          x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
}

IntMatrix IntMatrix::from(const IntMatrix2& m) {
  return {2, {m.a11, m.a12, m.a21, m.a22}};
}

EigenPair eigen_data(const IntMatrix2& a) {
  for (std::int64_t e : {a.a11, a.a12, a.a21, a.a22}) {
    if (e > kEntryLimit || e < -kEntryLimit)
      throw Error(ErrorCode::PreconditionViolated, "matrix entry exceeds 2^30");
  }
  const std::int64_t t = a.trace();
  const std::int64_t d = a.det();
  const std::int64_t disc = t * t - 4 * d;
  if (disc <= 0) {
    throw Error(ErrorCode::NonHyperbolic,
                "t^2 - 4d = " + std::to_string(disc) + " <= 0 for " + format_matrix(a));
  }
  if (d < 2 || d > t - 2) {
    throw Error(ErrorCode::BadSpectrum, "need 2 <= d <= t - 2, got t = " + std::to_string(t) +
                                            ", d = " + std::to_string(d));
  }

  EigenPair e;
  e.trace = t;
  e.det = d;
  e.discriminant = disc;
  e.lambda = QuadraticNumber::half_form(t, 1, disc);
  e.mu = QuadraticNumber::half_form(t, -1, disc);
  e.lambda_value = leading_eigenvalue(t, d);
  // mu = d / lambda avoids cancellation in (t - sqrt(disc)) / 2.
  e.mu_value = static_cast<double>(static_cast<long double>(d) / e.lambda_value);
  e.alpha = exponent_of(t, d);
  return e;
}

double exponent_of(std::int64_t t, std::int64_t d) {
  const long double disc = static_cast<long double>(t) * t - 4.0L * d;
  const long double lambda = (t + std::sqrt(disc)) / 2.0L;
  return static_cast<double>(1.0L + std::log(static_cast<long double>(d)) / std::log(lambda));
}

IntMatrix2 companion_matrix(std::int64_t t, std::int64_t d) { return {t, -d, 1, 0}; }

EigenBounds eigen_bounds(std::int64_t t, std::int64_t d) {
  if (t < 4 || d < 0 || d > t) {
    throw Error(ErrorCode::PreconditionViolated,
                "eigen_bounds needs t >= 4 and t >= d >= 0 (t = " + std::to_string(t) +
                    ", d = " + std::to_string(d) + ")");
  }
  EigenBounds b;
  b.lower = static_cast<double>(t - 4);
  b.lambda = leading_eigenvalue(t, d);
  b.upper = static_cast<double>(t);
  if (!(b.lower <= b.lambda && b.lambda <= b.upper)) {
    throw Error(ErrorCode::PreconditionViolated, "eigenvalue bound chain violated");
  }
  return b;
}

double SynthesisCertificate::error() const { return std::abs(alpha_achieved - alpha_target); }

bool SynthesisCertificate::chain_holds() const {
  if (chain.size() != 4) return false;
  for (const auto& link : chain) {
    if (!link.holds) return false;
  }
  return true;
}

SynthesisResult synthesize_matrix(double alpha, double epsilon, DeterminantRange range,
                                  std::int64_t max_t) {
  if (!(alpha > 1.0 && alpha < 2.0) || !(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::BadTarget, "need 1 < alpha < 2 and epsilon > 0");
  }

  for (std::int64_t t = 5; t <= max_t; ++t) {
    const std::int64_t d_max = range == DeterminantRange::Guarded ? t - 4 : t - 2;
    if (d_max < 2) continue;
    // d -> exponent_of(t, d) is strictly increasing: ln d grows while
    // ln lambda(t, d) shrinks and stays positive.
    if (exponent_of(t, 2) >= alpha + epsilon) continue;
    if (exponent_of(t, d_max) <= alpha - epsilon) continue;

    std::int64_t lo = 2;
    std::int64_t hi = d_max;
    // Smallest d with exponent >= alpha, or d_max if none.
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (exponent_of(t, mid) >= alpha) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }

    std::optional<std::int64_t> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::int64_t d : {lo - 1, lo}) {
      if (d < 2 || d > d_max) continue;
      const double err = std::abs(exponent_of(t, d) - alpha);
      if (err < epsilon && err < best_err) {
        best = d;
        best_err = err;
      }
    }
    if (!best) continue;

    const std::int64_t d = *best;
    SynthesisResult result;
    result.matrix = companion_matrix(t, d);
    const EigenPair eig = eigen_data(result.matrix);
    auto& cert = result.certificate;
    cert.t = t;
    cert.d = d;
    cert.alpha_target = alpha;
    cert.epsilon = epsilon;
    cert.guarded = range == DeterminantRange::Guarded;
    cert.alpha_achieved = eig.alpha;
    const double td = static_cast<double>(t);
    const double dd = static_cast<double>(d);
    cert.chain = {
        {"2 <= d", 2.0, dd, 2.0 <= dd},
        {"d <= t - 4", dd, td - 4.0, dd <= td - 4.0},
        {"t - 4 <= lambda", td - 4.0, eig.lambda_value, td - 4.0 <= eig.lambda_value},
        {"lambda <= t", eig.lambda_value, td, eig.lambda_value <= td},
    };
    return result;
  }
  throw Error(ErrorCode::BadTarget, "no matrix found with trace <= " + std::to_string(max_t));
}

double suspension_exponent(double alpha, int i) {
  if (!(alpha >= 1.0 && alpha <= 2.0) || i < 0) {
    throw Error(ErrorCode::BadTarget, "suspension_exponent needs alpha in (1, 2] and i >= 0");
  }
  return ((i + 1) * alpha - i) / (i * alpha - (i - 1));
}

Rational suspension_exponent(const Rational& alpha, int i) {
  if (alpha < Rational(1) || alpha > Rational(2) || i < 0) {
    throw Error(ErrorCode::BadTarget, "suspension_exponent needs alpha in (1, 2] and i >= 0");
  }
  const Rational ri(i);
  return (Rational(i + 1) * alpha - ri) / (ri * alpha - Rational(i - 1));
}

double suspension_recurrence(double alpha, int i) {
  double s = alpha;
  for (int k = 0; k < i; ++k) s = 2.0 - 1.0 / s;
  return s;
}

IntMatrix suspend_matrix(const IntMatrix& a, int i) {
  if (i < 0) throw Error(ErrorCode::PreconditionViolated, "suspension level must be >= 0");
  const std::size_t n = a.size + static_cast<std::size_t>(i);
  IntMatrix out{n, std::vector<std::int64_t>(n * n, 0)};
  for (std::size_t r = 0; r < a.size; ++r) {
    for (std::size_t c = 0; c < a.size; ++c) out.at(r, c) = a.at(r, c);
  }
  for (std::size_t k = a.size; k < n; ++k) out.at(k, k) = 1;
  return out;
}

IntMatrix suspend_matrix(const IntMatrix2& a, int i) { return suspend_matrix(IntMatrix::from(a), i); }

std::optional<IntMatrix2> parse_matrix(const std::string& text) {
  std::int64_t v[4];
  std::size_t pos = 0;
  for (int k = 0; k < 4; ++k) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t used = 0;
    try {
      v[k] = std::stoll(text.substr(pos), &used);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    pos += used;
    while (pos < text.size() && text[pos] == ' ') ++pos;
    const char want = (k == 1) ? ';' : ',';
    if (k == 3) break;
    if (pos >= text.size() || text[pos] != want) return std::nullopt;
    ++pos;
  }
  if (pos != text.size()) return std::nullopt;
  return IntMatrix2{v[0], v[1], v[2], v[3]};
}

std::string format_matrix(const IntMatrix2& m) {
  std::ostringstream os;
  os << m.a11 << "," << m.a12 << ";" << m.a21 << "," << m.a22;
  return os.str();
}

}  // namespace isospec::exponents
