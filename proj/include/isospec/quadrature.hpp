#pragma once

#include <cmath>
#include <cstddef>

#include "isospec/error.hpp"

namespace isospec {

struct QuadratureResult {
  double value = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

template <class F>
struct SimpsonState {
  F& f;
  std::size_t evaluations;
  std::size_t budget;
};

template <class F>
double simpson_step(SimpsonState<F>& st, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  st.evaluations += 2;
  if (st.evaluations > st.budget) {
    throw Error(ErrorCode::QuadratureNonConvergent, "adaptive Simpson exceeded evaluation budget");
  }
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    throw Error(ErrorCode::QuadratureNonConvergent, "adaptive Simpson hit recursion limit");
  }
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(st, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(st, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol,
/// with Richardson correction on accepted panels.
template <class F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double tol,
                                  std::size_t budget = 1'000'000, int max_depth = 50) {
  if (a == b) return {0.0, 0};
  detail::SimpsonState<F> st{f, 3, budget};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = detail::simpson_step(st, a, fa, m, fm, b, fb, whole, tol, max_depth);
  return {v, st.evaluations};
}

}  // namespace isospec
