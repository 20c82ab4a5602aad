#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "isospec/error.hpp"
#include "isospec/exponents.hpp"

using namespace isospec;
using namespace isospec::exponents;

namespace {

// Frozen from a 30-digit evaluation of the quadratic formula.
constexpr double kLambda42 = 4.56155281280883027491;
constexpr double kMu42 = 0.43844718719116972509;
constexpr double kAlpha42 = 1.45672006059038949223;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an isospec::Error");
  return ErrorCode::Usage;
}

// Independent oracle: bisection on the characteristic polynomial.
double lambda_by_bisection(std::int64_t t, std::int64_t d) {
  auto p = [&](long double x) { return x * x - t * x + d; };
  long double lo = t / 2.0L;
  long double hi = t;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (p(mid) > 0 ? hi : lo) = mid;
  }
  return static_cast<double>(lo);
}

// Exhaustive oracle for synthesis: every (t, d) pair up to t_max, no monotonicity assumed.
std::optional<std::pair<std::int64_t, std::int64_t>> grid_oracle(double alpha, double eps,
                                                                 std::int64_t d_slack, std::int64_t t_max) {
  for (std::int64_t t = 5; t <= t_max; ++t) {
    std::optional<std::int64_t> best;
    double best_err = eps;
    for (std::int64_t d = 2; d <= t - d_slack; ++d) {
      const double lam = lambda_by_bisection(t, d);
      const double err = std::abs(1.0 + std::log(double(d)) / std::log(lam) - alpha);
      if (err < best_err) {
        best_err = err;
        best = d;
      }
    }
    if (best) return std::pair{t, *best};
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("eigen data of the 4,2;1,1 example") {
  const EigenPair e = eigen_data({4, 2, 1, 1});
  CHECK(e.trace == 5);
  CHECK(e.det == 2);
  CHECK(e.discriminant == 17);
  CHECK(e.lambda_value == doctest::Approx(kLambda42).epsilon(1e-15));
  CHECK(e.mu_value == doctest::Approx(kMu42).epsilon(1e-15));
  CHECK(e.alpha == doctest::Approx(kAlpha42).epsilon(1e-12));
  // 2 + log_lambda(mu) and 1 + log_lambda(d) agree.
  CHECK(std::abs((2.0 + std::log(e.mu_value) / std::log(e.lambda_value)) - e.alpha) < 1e-12);
  CHECK(e.lambda + e.mu == QuadraticNumber(Rational(5), Rational(0), 17));
  CHECK(e.lambda * e.mu == QuadraticNumber(Rational(2), Rational(0), 17));
  CHECK(e.lambda.half_p() == 5);
  CHECK(e.lambda.half_q() == 1);
}

TEST_CASE("companion matrix shares the spectrum") {
  CHECK(companion_matrix(5, 2) == IntMatrix2{5, -2, 1, 0});
  CHECK(companion_matrix(0, 0) == IntMatrix2{0, 0, 1, 0});
  CHECK(companion_matrix(6, 2) == IntMatrix2{6, -2, 1, 0});
  const EigenPair a = eigen_data({4, 2, 1, 1});
  const EigenPair b = eigen_data(companion_matrix(5, 2));
  CHECK(a.alpha == b.alpha);
  CHECK(a.lambda == b.lambda);
  const EigenPair c = eigen_data(companion_matrix(6, 2));
  // (6 + sqrt 28) / 2 = 3 + sqrt 7.
  CHECK(c.lambda == QuadraticNumber::half_form(6, 1, 28));
  CHECK(c.lambda_value == doctest::Approx(3.0 + std::sqrt(7.0)).epsilon(1e-15));
}

TEST_CASE("inadmissible matrices are rejected") {
  CHECK(code_of([] { eigen_data({2, 1, 1, 1}); }) == ErrorCode::BadSpectrum);
  CHECK(code_of([] { eigen_data({1, 1, -1, 1}); }) == ErrorCode::NonHyperbolic);
  CHECK(code_of([] { eigen_data(companion_matrix(0, 0)); }) == ErrorCode::NonHyperbolic);
  // d = t - 1 puts an eigenvalue at 1.
  CHECK(code_of([] { eigen_data(companion_matrix(6, 5)); }) == ErrorCode::BadSpectrum);
  CHECK_NOTHROW(eigen_data(companion_matrix(6, 4)));
}

TEST_CASE("eigen bounds") {
  const EigenBounds zero = eigen_bounds(4, 0);
  CHECK(zero.lower == 0.0);
  CHECK(zero.lambda == 4.0);
  CHECK(zero.upper == 4.0);
  const EigenBounds b = eigen_bounds(6, 2);
  CHECK(b.lambda == doctest::Approx(5.6457513110645906).epsilon(1e-14));
  CHECK(code_of([] { eigen_bounds(3, 2); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([] { eigen_bounds(6, 7); }) == ErrorCode::PreconditionViolated);

  for (std::int64_t t = 4; t <= 400; ++t) {
    for (std::int64_t d = 0; d <= t; ++d) {
      const EigenBounds e = eigen_bounds(t, d);
      REQUIRE(e.lower <= e.lambda);
      REQUIRE(e.lambda <= e.upper);
    }
  }
}

TEST_CASE("exact identities over a large range") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> trace(5, 1'000'000);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::int64_t t = trace(rng);
    const std::int64_t d = std::uniform_int_distribution<std::int64_t>(2, t - 2)(rng);
    const EigenPair e = eigen_data(companion_matrix(t, d));
    REQUIRE(e.lambda + e.mu == QuadraticNumber(Rational(t), Rational(0), e.discriminant));
    REQUIRE(e.lambda * e.mu == QuadraticNumber(Rational(d), Rational(0), e.discriminant));
    REQUIRE(e.alpha > 1.0);
    REQUIRE(e.alpha < 2.0);
    REQUIRE(e.lambda_value == doctest::Approx(lambda_by_bisection(t, d)).epsilon(1e-13));
  }
}

TEST_CASE("conjugation by unimodular matrices preserves the exponent") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> small(-3, 3);
  const IntMatrix2 a{4, 2, 1, 1};
  const double alpha = eigen_data(a).alpha;
  int tested = 0;
  while (tested < 200) {
    const IntMatrix2 p{small(rng), small(rng), small(rng), small(rng)};
    const std::int64_t det = p.det();
    if (det != 1 && det != -1) continue;
    const IntMatrix2 p_inv{det * p.a22, -det * p.a12, -det * p.a21, det * p.a11};
    REQUIRE(p * p_inv == IntMatrix2{1, 0, 0, 1});
    CHECK(eigen_data(p * a * p_inv).alpha == alpha);
    ++tested;
  }
}

TEST_CASE("synthesis examples") {
  const SynthesisResult loose = synthesize_matrix(1.5, 0.05, DeterminantRange::Admissible);
  CHECK(loose.matrix == companion_matrix(5, 2));
  CHECK(loose.certificate.alpha_achieved == doctest::Approx(kAlpha42).epsilon(1e-12));
  CHECK(loose.certificate.error() == doctest::Approx(0.0432799394).epsilon(1e-8));
  CHECK_FALSE(loose.certificate.guarded);
  // (5, 2) sits outside the guarded range d <= t - 4.
  CHECK_FALSE(loose.certificate.chain_holds());

  CHECK(synthesize_matrix(1.5, 1.0, DeterminantRange::Admissible).matrix == companion_matrix(5, 2));

  const SynthesisResult guarded = synthesize_matrix(1.5, 0.05);
  CHECK(guarded.matrix == companion_matrix(8, 3));
  CHECK(guarded.certificate.guarded);
  CHECK(guarded.certificate.chain_holds());
  CHECK(guarded.certificate.chain.size() == 4);

  CHECK(code_of([] { synthesize_matrix(2.5, 0.1); }) == ErrorCode::BadTarget);
  CHECK(code_of([] { synthesize_matrix(1.0, 0.1); }) == ErrorCode::BadTarget);
  CHECK(code_of([] { synthesize_matrix(1.5, 0.0); }) == ErrorCode::BadTarget);
  CHECK(code_of([] { synthesize_matrix(1.5, 1e-9, DeterminantRange::Guarded, 20); }) ==
        ErrorCode::BadTarget);
}

TEST_CASE("synthesis agrees with an exhaustive grid search") {
  std::mt19937_64 rng(3);
  // Targets near 1 need traces far beyond the oracle's reach.
  std::uniform_real_distribution<double> target(1.2, 1.95);
  for (int trial = 0; trial < 60; ++trial) {
    const double alpha = target(rng);
    const double eps = 0.03;
    for (auto [range, slack] : {std::pair{DeterminantRange::Guarded, 4}, std::pair{DeterminantRange::Admissible, 2}}) {
      const auto oracle = grid_oracle(alpha, eps, slack, 400);
      REQUIRE(oracle.has_value());
      const SynthesisResult r = synthesize_matrix(alpha, eps, range);
      CHECK(r.certificate.t == oracle->first);
      CHECK(r.certificate.d == oracle->second);
      CHECK(r.certificate.error() < eps);
    }
  }
}

TEST_CASE("synthesis is deterministic") {
  const SynthesisResult a = synthesize_matrix(1.3, 0.001);
  const SynthesisResult b = synthesize_matrix(1.3, 0.001);
  CHECK(a.matrix == b.matrix);
  CHECK(a.certificate == b.certificate);
}

TEST_CASE("exponent is increasing in the determinant at fixed trace") {
  for (std::int64_t t = 5; t <= 2000; t += 7) {
    double prev = 1.0;
    for (std::int64_t d = 2; d <= t - 2; ++d) {
      const double a = exponent_of(t, d);
      REQUIRE(a > prev);
      prev = a;
    }
  }
}

TEST_CASE("suspension exponents") {
  CHECK(suspension_exponent(1.0, 0) == 1.0);
  for (int i = 0; i <= 12; ++i) CHECK(suspension_exponent(1.0, i) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(suspension_exponent(1.45672, 1) == doctest::Approx(1.31352627821407).epsilon(1e-12));
  CHECK(suspension_exponent(2.0, 1) == 1.5);
  CHECK(code_of([] { suspension_exponent(2.5, 1); }) == ErrorCode::BadTarget);
  CHECK(code_of([] { suspension_exponent(1.5, -1); }) == ErrorCode::BadTarget);

  CHECK(suspension_exponent(Rational(2), 1) == Rational(3, 2));
  CHECK(suspension_exponent(Rational(2), 2) == Rational(4, 3));
  CHECK(suspension_exponent(Rational(2), 3) == Rational(5, 4));
  CHECK(suspension_exponent(Rational(2), 4) == Rational(6, 5));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> alpha(1.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = std::nextafter(alpha(rng), 2.0);
    const int i = static_cast<int>(rng() % 11);
    const double s = suspension_exponent(a, i);
    REQUIRE(std::abs(s - suspension_recurrence(a, i)) < 1e-12);
    REQUIRE(s > 1.0);
    REQUIRE(s < (i + 2.0) / (i + 1.0));
  }
  for (int i = 0; i <= 10; ++i) {
    double prev = 1.0;
    for (int j = 1; j < 1000; ++j) {
      const double s = suspension_exponent(1.0 + j / 1000.0, i);
      REQUIRE(s > prev);
      prev = s;
    }
  }
}

TEST_CASE("suspended matrices are block diagonal") {
  const IntMatrix base = IntMatrix::from({4, 2, 1, 1});
  CHECK(suspend_matrix(IntMatrix2{4, 2, 1, 1}, 0) == base);
  const IntMatrix s1 = suspend_matrix(IntMatrix2{4, 2, 1, 1}, 1);
  CHECK(s1.size == 3);
  CHECK(s1.entries == std::vector<std::int64_t>{4, 2, 0, 1, 1, 0, 0, 0, 1});
  const IntMatrix s2 = suspend_matrix(companion_matrix(5, 2), 2);
  CHECK(s2.size == 4);
  CHECK(s2.entries == std::vector<std::int64_t>{5, -2, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
  CHECK(suspend_matrix(s1, 1) == suspend_matrix(IntMatrix2{4, 2, 1, 1}, 2));
}

TEST_CASE("matrix literals") {
  CHECK(parse_matrix("4,2;1,1") == IntMatrix2{4, 2, 1, 1});
  CHECK(parse_matrix(" 5, -2 ; 1, 0 ") == IntMatrix2{5, -2, 1, 0});
  CHECK_FALSE(parse_matrix("4,2,1,1").has_value());
  CHECK_FALSE(parse_matrix("4,2;1").has_value());
  CHECK_FALSE(parse_matrix("a,b;c,d").has_value());
  CHECK(parse_matrix(format_matrix({7, -3, 2, 9})) == IntMatrix2{7, -3, 2, 9});
}
