#include "isospec/geometry.hpp"

#include <algorithm>
#include <limits>

#include "isospec/error.hpp"
#include "isospec/quadrature.hpp"
#include "isospec/rational.hpp"

namespace isospec::geometry {

namespace {

struct RPoint {
  Rational x;
  Rational y;
};

using RPolygon = std::vector<RPoint>;

/// Keeps the part of `poly` on the left of the directed line a -> b.
RPolygon clip_half_plane(const RPolygon& poly, const RPoint& a, const RPoint& b) {
  const Rational ex = b.x - a.x;
  const Rational ey = b.y - a.y;
  auto side = [&](const RPoint& p) { return ex * (p.y - a.y) - ey * (p.x - a.x); };
  RPolygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const RPoint& p = poly[i];
    const RPoint& q = poly[(i + 1) % n];
    const Rational sp = side(p);
    const Rational sq = side(q);
    const bool pin = sp >= Rational(0);
    const bool qin = sq >= Rational(0);
    if (pin) out.push_back(p);
    if (pin != qin && sp != Rational(0) && sq != Rational(0)) {
      const Rational t = sp / (sp - sq);
      out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
    }
  }
  return out;
}

RPolygon clip_convex(RPolygon subject, const RPolygon& clip) {
  for (std::size_t i = 0; i < clip.size() && !subject.empty(); ++i) {
    subject = clip_half_plane(subject, clip[i], clip[(i + 1) % clip.size()]);
  }
  return subject;
}

Rational shoelace(const RPolygon& poly) {
  Rational twice(0);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const RPoint& p = poly[i];
    const RPoint& q = poly[(i + 1) % poly.size()];
    twice = twice + (p.x * q.y - q.x * p.y);
  }
  return twice / Rational(2);
}

RPolygon lattice_parallelogram(const exponents::IntMatrix2& a, std::int64_t zu, std::int64_t zv) {
  // A * ([0,1]^2 + z), counter-clockwise since det A > 0.
  const std::int64_t ox = a.a11 * zu + a.a12 * zv;
  const std::int64_t oy = a.a21 * zu + a.a22 * zv;
  return {{Rational(ox), Rational(oy)},
          {Rational(ox + a.a11), Rational(oy + a.a21)},
          {Rational(ox + a.a11 + a.a12), Rational(oy + a.a21 + a.a22)},
          {Rational(ox + a.a12), Rational(oy + a.a22)}};
}

RPolygon unit_square(std::int64_t m, std::int64_t n) {
  return {{Rational(m), Rational(n)},
          {Rational(m + 1), Rational(n)},
          {Rational(m + 1), Rational(n + 1)},
          {Rational(m), Rational(n + 1)}};
}

void check_piece(const Rational& area) {
  if (area > Rational(0) && area.to_double() < 1e-12) {
    throw Error(ErrorCode::DegenerateOverlay, "overlay piece of area " + area.str());
  }
}

double projection_ratio(const MetricFunctionals& m, Vec2 edge, bool onto_xz, double z) {
  const double lx = std::pow(m.lambda(), -z) * std::abs(edge.x);
  const double my = std::pow(m.mu(), -z) * std::abs(edge.y);
  const double len = std::hypot(lx, my);
  return (onto_xz ? lx : my) / len;
}

double minimize_ratio(const MetricFunctionals& m, Vec2 edge, bool onto_xz) {
  constexpr int kGrid = 10'000;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= kGrid; ++j) {
    const double v = projection_ratio(m, edge, onto_xz, static_cast<double>(j) / kGrid);
    if (v < best_val) {
      best_val = v;
      best = j;
    }
  }
  // Golden-section refinement on the bracketing grid cells.
  double lo = std::max(0, best - 1) / static_cast<double>(kGrid);
  double hi = std::min(kGrid, best + 1) / static_cast<double>(kGrid);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo);
  double e = lo + g * (hi - lo);
  for (int it = 0; it < 80; ++it) {
    if (projection_ratio(m, edge, onto_xz, c) < projection_ratio(m, edge, onto_xz, e)) {
      hi = e;
    } else {
      lo = c;
    }
    c = hi - g * (hi - lo);
    e = lo + g * (hi - lo);
  }
  const double refined = projection_ratio(m, edge, onto_xz, 0.5 * (lo + hi));
  return std::min(best_val, refined);
}

}  // namespace

double MetricFunctionals::horizontal_area(double euclidean_area, double z) const {
  return euclidean_area * std::exp(-z * (ln_lambda_ + ln_mu_));
}

double MetricFunctionals::lateral_area(double dx, double dy, double z0, double z1) const {
  if (!(z1 > z0)) throw Error(ErrorCode::PreconditionViolated, "lateral_area needs z1 > z0");
  if (dx == 0.0 && dy == 0.0) return 0.0;
  const double ax = std::abs(dx);
  const double ay = std::abs(dy);
  auto integrand = [&](double z) {
    return std::hypot(ax * std::exp(-z * ln_lambda_), ay * std::exp(-z * ln_mu_));
  };
  return adaptive_simpson(integrand, z0, z1, 1e-9).value;
}

double MetricFunctionals::volume_weight(double z0, double z1) const {
  const double ln_d = ln_lambda_ + ln_mu_;
  return (std::exp(-z0 * ln_d) - std::exp(-z1 * ln_d)) / ln_d;
}

double closed_form_cell_volume(const ModelGeometry& geom) {
  const double d = geom.d();
  return std::abs(geom.b.det()) * (1.0 - 1.0 / d) / std::log(d);
}

ModelGeometry build_geometry(const exponents::IntMatrix2& a) {
  ModelGeometry g;
  g.matrix = a;
  g.eigen = exponents::eigen_data(a);

  // a12 != 0 for admissible A (otherwise the spectrum would be integral), so
  // (a12, ev - a11) is an eigenvector for either eigenvalue.
  auto eigenvector = [&](double ev) {
    Vec2 v{static_cast<double>(a.a12), ev - static_cast<double>(a.a11)};
    const double n = v.norm();
    v = (1.0 / n) * v;
    if (v.x < 0.0) v = -1.0 * v;
    return v;
  };
  const Vec2 v_lambda = eigenvector(g.lambda());
  Vec2 v_mu = eigenvector(g.mu());
  if (cross(v_lambda, v_mu) < 0.0) v_mu = -1.0 * v_mu;
  const double s = 1.0 / std::sqrt(cross(v_lambda, v_mu));
  g.b_inv = {s * v_lambda.x, s * v_mu.x, s * v_lambda.y, s * v_mu.y};
  g.b = g.b_inv.inverse();

  g.gamma1 = g.b.col(0);
  g.gamma2 = g.b.col(1);
  g.q = {Vec2{0.0, 0.0}, g.gamma1, g.gamma1 + g.gamma2, g.gamma2};
  g.w = std::max((g.gamma1 + g.gamma2).norm(), (g.gamma1 - g.gamma2).norm());
  g.cell_volume = closed_form_cell_volume(g);
  g.cells = cell_area_extrema(g);
  return g;
}

CellAreaExtrema cell_area_extrema(const ModelGeometry& geom) {
  const exponents::IntMatrix2& a = geom.matrix;
  const MetricFunctionals metric = geom.metric();
  const double det_b = std::abs(geom.b.det());
  // Horizontal cells at height 1 carry weight 1/d on Euclidean area.
  const double weight = metric.horizontal_area(det_b, 1.0);

  CellAreaExtrema out;

  // Pieces of the unit-square tiling inside A([0,1]^2), in level-1 lattice coordinates.
  const RPolygon dq = lattice_parallelogram(a, 0, 0);
  std::int64_t xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (const auto& p : dq) {
    xmin = std::min(xmin, p.x.num());
    xmax = std::max(xmax, p.x.num());
    ymin = std::min(ymin, p.y.num());
    ymax = std::max(ymax, p.y.num());
  }
  for (std::int64_t m = xmin; m < xmax; ++m) {
    for (std::int64_t n = ymin; n < ymax; ++n) {
      const Rational area = shoelace(clip_convex(dq, unit_square(m, n)));
      check_piece(area);
      if (area > Rational(0)) out.pieces_in_dq.push_back(area.to_double() * weight);
    }
  }

  // Pieces of the A-parallelogram tiling inside the unit square.
  const double det_a = static_cast<double>(a.det());
  const RPolygon sq = unit_square(0, 0);
  double zumin = 0, zumax = 0, zvmin = 0, zvmax = 0;
  for (const auto& p : sq) {
    // A^{-1} p
    const double px = p.x.to_double();
    const double py = p.y.to_double();
    const double zu = (a.a22 * px - a.a12 * py) / det_a;
    const double zv = (-a.a21 * px + a.a11 * py) / det_a;
    zumin = std::min(zumin, zu);
    zumax = std::max(zumax, zu);
    zvmin = std::min(zvmin, zv);
    zvmax = std::max(zvmax, zv);
  }
  for (auto zu = static_cast<std::int64_t>(std::floor(zumin)) - 1;
       zu <= static_cast<std::int64_t>(std::ceil(zumax)); ++zu) {
    for (auto zv = static_cast<std::int64_t>(std::floor(zvmin)) - 1;
         zv <= static_cast<std::int64_t>(std::ceil(zvmax)); ++zv) {
      const Rational area = shoelace(clip_convex(sq, lattice_parallelogram(a, zu, zv)));
      check_piece(area);
      if (area > Rational(0)) out.pieces_in_q.push_back(area.to_double() * weight);
    }
  }

  out.vertical = {metric.lateral_area(geom.gamma1.x, geom.gamma1.y, 0.0, 1.0),
                  metric.lateral_area(geom.gamma2.x, geom.gamma2.y, 0.0, 1.0)};

  out.a = std::min(*std::min_element(out.pieces_in_dq.begin(), out.pieces_in_dq.end()),
                   std::min(out.vertical[0], out.vertical[1]));
  out.c_cell = std::max(*std::max_element(out.pieces_in_dq.begin(), out.pieces_in_dq.end()),
                        std::max(out.vertical[0], out.vertical[1]));

  out.jacobian = std::numeric_limits<double>::infinity();
  for (Vec2 edge : {geom.gamma1, geom.gamma2}) {
    for (bool onto_xz : {true, false}) {
      out.jacobian = std::min(out.jacobian, minimize_ratio(metric, edge, onto_xz));
    }
  }
  return out;
}

}  // namespace isospec::geometry
