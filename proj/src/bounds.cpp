#include "isospec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isospec/error.hpp"
#include "isospec/lattice.hpp"

namespace isospec::bounds {

namespace {

void prefixed(std::vector<Verdict>& out, const std::string& prefix, std::vector<Verdict> more) {
  for (Verdict& v : more) {
    v.name = prefix + v.name;
    out.push_back(std::move(v));
  }
}

Verdict positive(std::string name, double value) { return {std::move(name), 0.0, value, 0.0, value > 0.0}; }

void require_window(int n_min, int n_max) {
  if (n_min < 1) throw Error(ErrorCode::PreconditionViolated, "heights start at 1");
  if (n_max - n_min + 1 < 3) {
    throw Error(ErrorCode::RegressionIllConditioned, "need at least three heights to fit a slope");
  }
}

}  // namespace

Verdict make_verdict(std::string name, double lhs, double rhs, double tolerance) {
  const bool pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs + tolerance * std::abs(rhs);
  return {std::move(name), lhs, rhs, tolerance, pass};
}

void enforce(const std::vector<Verdict>& verdicts) {
  for (const Verdict& v : verdicts) {
    if (!v.pass) throw VerdictFailure(v.name, v.lhs, v.rhs);
  }
}

BoundConstants geometric_constants(const ModelGeometry& geom) {
  const double lam = geom.lambda();
  const double mu = geom.mu();
  const double w = geom.w;
  const double ln_d = std::log(geom.d());
  BoundConstants c;
  c.kappa = regions::kappa(geom);
  c.C_lemma = std::max(std::pow(geom.d(), c.kappa), lattice::backtracking_constant(geom) / geom.cells.jacobian);
  c.D_lemma = 2.0 * w * (1.0 / lam + lam / (mu * (lam - 1.0))) + 4.0 * w * w / std::log(lam);
  c.upper_coeff_embedded = (2.0 * lam * (mu + 1.0) + 1.0) / ln_d;
  c.upper_coeff_general = (1.0 + lam * (mu + 1.0)) / ln_d;
  c.delta2_coeff = c.upper_coeff_general / geom.cell_volume * std::pow(geom.cells.c_cell, geom.eigen.alpha);
  const double face_coeff = 1.0 + 2.0 / std::log(lam) - 2.0 / std::log(mu);
  c.ratio_numerator = (2.0 / geom.cells.a) * (c.C_lemma * std::pow(lam, c.kappa) * face_coeff + c.D_lemma);
  return c;
}

std::vector<Verdict> evaluate_slab_lemmas(const ModelGeometry& geom, const regions::Stack& stack,
                                          const Tolerances& tol) {
  const BoundConstants c = geometric_constants(geom);
  const regions::BoundaryMeasurement& m = stack.boundary;
  const regions::RegionRn r_prime = regions::measure_Rn_real(geom, stack.n + c.kappa);
  double annulus = 0.0;
  double paper_annulus = 0.0;
  for (const regions::HorizontalLevel& lv : m.levels) {
    annulus += lv.annulus_bound;
    paper_annulus += lv.paper_annulus;
  }
  return {
      make_verdict("top_vertical", m.top + m.vertical, c.C_lemma * r_prime.upper_faces(), tol.pipeline),
      make_verdict("horizontal", m.horizontal, c.D_lemma * std::pow(geom.lambda(), stack.n), tol.pipeline),
      make_verdict("horizontal_annulus", m.horizontal, annulus, tol.pipeline),
      make_verdict("horizontal_annulus_closed_form", m.horizontal, paper_annulus, tol.pipeline),
  };
}

void check_slab_lemmas(const ModelGeometry& geom, const regions::Stack& stack, const Tolerances& tol) {
  enforce(evaluate_slab_lemmas(geom, stack, tol));
}

std::vector<Verdict> evaluate_foldbound(const ModelGeometry& geom, const regions::Ball& ball, const Tolerances& tol) {
  const double rhs = (ball.boundary_area + 2.0 * ball.fold_area) / std::log(geom.d());
  return {make_verdict("foldbound", ball.y_n, rhs, tol.pipeline)};
}

void check_foldbound(const ModelGeometry& geom, const regions::Ball& ball, const Tolerances& tol) {
  enforce(evaluate_foldbound(geom, ball, tol));
}

std::vector<Verdict> evaluate_foldbound(const ModelGeometry& geom, const regions::Stack& stack,
                                        const Tolerances& tol) {
  // The whole boundary: the upper part plus the base rectangle it excludes.
  const double area = stack.boundary.total_upper + stack.boundary.bottom;
  return {make_verdict("foldbound_stack", stack.rvol, area / std::log(geom.d()), tol.pipeline)};
}

void check_foldbound(const ModelGeometry& geom, const regions::Stack& stack, const Tolerances& tol) {
  enforce(evaluate_foldbound(geom, stack, tol));
}

std::vector<Verdict> evaluate_embedded_upper(const ModelGeometry& geom, const regions::Ball& ball,
                                             const Tolerances& tol) {
  const BoundConstants c = geometric_constants(geom);
  const double rhs = c.upper_coeff_embedded * std::pow(ball.boundary_area, geom.eigen.alpha);
  return {make_verdict("embedded_upper", ball.y_n, rhs, tol.pipeline)};
}

void check_embedded_upper(const ModelGeometry& geom, const regions::Ball& ball, const Tolerances& tol) {
  enforce(evaluate_embedded_upper(geom, ball, tol));
}

std::vector<Verdict> evaluate_region_inequalities(const ModelGeometry& geom, const regions::RegionRn& r,
                                                  const Tolerances& tol) {
  (void)geom;
  return {
      make_verdict("volume_lower_bound", r.rvol_lower_bound, r.rvol, tol.closed_form),
      make_verdict("upper_face_bound", r.upper_faces(), r.area_upper_bound, tol.closed_form),
  };
}

std::vector<Verdict> evaluate_region_inequalities(const ModelGeometry& geom, int n, const Tolerances& tol) {
  return evaluate_region_inequalities(geom, regions::measure_Rn(geom, n), tol);
}

void check_region_inequalities(const ModelGeometry& geom, int n, const Tolerances& tol) {
  enforce(evaluate_region_inequalities(geom, n, tol));
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw Error(ErrorCode::RegressionIllConditioned, "need at least three points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    mx += x[j];
    my += y[j];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    sxy += (x[j] - mx) * (y[j] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::RegressionIllConditioned, "abscissae do not vary");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = y[j] - (f.slope * x[j] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / static_cast<double>(n));
  return f;
}

LinearFit closed_form_regression(const ModelGeometry& geom, int n_min, int n_max) {
  require_window(n_min, n_max);
  std::vector<double> x;
  std::vector<double> y;
  for (int n = n_min; n <= n_max; ++n) {
    const regions::RegionRn r = regions::measure_Rn(geom, n);
    x.push_back(std::log(r.area_upper_bound));
    y.push_back(std::log(r.rvol));
  }
  return fit_line(x, y);
}

bool ReportRow::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

CertifiedReport certify_balls(const ModelGeometry& geom, const std::vector<regions::Ball>& balls,
                              const CertifyOptions& options) {
  if (balls.empty()) throw Error(ErrorCode::RegressionIllConditioned, "no heights");
  const Tolerances& tol = options.tolerances;
  CertifiedReport rep;
  rep.matrix = geom.matrix;
  rep.trace = geom.eigen.trace;
  rep.det = geom.eigen.det;
  rep.lambda = geom.lambda();
  rep.mu = geom.mu();
  rep.alpha = geom.eigen.alpha;
  rep.w = geom.w;
  rep.k = lattice::backtracking_constant(geom);
  rep.cell_volume = geom.cell_volume;
  rep.a = geom.cells.a;
  rep.c_cell = geom.cells.c_cell;
  rep.jacobian = geom.cells.jacobian;
  rep.constants = geometric_constants(geom);
  rep.tolerances = tol;
  rep.seed = options.measure.seed;
  rep.n_min = balls.front().n;
  rep.n_max = balls.back().n;

  double e_const = std::numeric_limits<double>::infinity();
  double k_const = std::numeric_limits<double>::infinity();
  std::vector<double> lx;
  std::vector<double> lx_lo;
  std::vector<double> lx_hi;
  std::vector<double> ly;
  for (const regions::Ball& b : balls) {
    ReportRow row;
    row.n = b.n;
    row.y_n = b.y_n;
    row.x_lo = b.x_lo;
    row.x_hi = b.x_hi;
    row.boundary_area = b.boundary_area;
    row.fold_area = b.fold_area;
    row.estimated = b.stack0.boundary.estimated || b.stack1.boundary.estimated;
    prefixed(row.verdicts, "R_n.", evaluate_region_inequalities(geom, b.n, tol));
    for (const regions::Stack* s : {&b.stack0, &b.stack1}) {
      const std::string p = s == &b.stack0 ? "stack0." : "stack1.";
      std::size_t outside = 0;
      for (bool ok : s->rn_inside) outside += !ok;
      for (bool ok : s->inside_r_prime) outside += !ok;
      for (const regions::Slab& slab : s->slabs) outside += !slab.inside_w_in;
      row.verdicts.push_back(make_verdict(p + "containment_failures", static_cast<double>(outside), 0.0, 0.0));
      prefixed(row.verdicts, p, evaluate_slab_lemmas(geom, *s, tol));
      prefixed(row.verdicts, p, evaluate_foldbound(geom, *s, tol));
    }
    prefixed(row.verdicts, "ball.", evaluate_foldbound(geom, b, tol));
    prefixed(row.verdicts, "ball.", evaluate_embedded_upper(geom, b, tol));

    e_const = std::min(e_const, (b.y_n / geom.cell_volume) / std::pow(b.x_hi, geom.eigen.alpha));
    k_const = std::min(k_const, b.x_lo / std::pow(geom.lambda(), b.n));
    lx.push_back(0.5 * (std::log(b.x_lo) + std::log(b.x_hi)));
    lx_lo.push_back(std::log(b.x_lo));
    lx_hi.push_back(std::log(b.x_hi));
    ly.push_back(std::log(b.y_n));
    rep.rows.push_back(std::move(row));
  }
  rep.constants.E_const = e_const;
  rep.constants.K_const = k_const;
  for (std::size_t j = 1; j < balls.size(); ++j) {
    rep.max_ratio = std::max(rep.max_ratio, balls[j].x_hi / balls[j - 1].x_hi);
  }
  rep.ratio_bound = rep.constants.ratio_numerator * geom.lambda() / k_const;

  rep.summary.push_back(positive("E_const_positive", e_const));
  rep.summary.push_back(positive("K_const_positive", k_const));
  if (balls.size() >= 2) rep.summary.push_back(make_verdict("ratio_bounded", rep.max_ratio, rep.ratio_bound, 0.0));
  if (balls.size() >= 3) {
    rep.fit = fit_line(lx, ly);
    rep.fit_lo = fit_line(lx_lo, ly);
    rep.fit_hi = fit_line(lx_hi, ly);
    rep.summary.push_back(make_verdict("slope", std::abs(rep.fit.slope - rep.alpha), tol.slope, 0.0));
  } else {
    rep.summary.push_back({"slope", 0.0, 0.0, 0.0, false});
  }
  rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(), [](const ReportRow& r) { return r.pass(); }) &&
             std::all_of(rep.summary.begin(), rep.summary.end(), [](const Verdict& v) { return v.pass; });
  return rep;
}

CertifiedReport certify_exponent(const ModelGeometry& geom, int n_min, int n_max, const CertifyOptions& options) {
  require_window(n_min, n_max);
  std::vector<regions::Ball> balls;
  for (int n = n_min; n <= n_max; ++n) balls.push_back(regions::build_ball(geom, n, options.slab, options.measure));
  return certify_balls(geom, balls, options);
}

}  // namespace isospec::bounds
