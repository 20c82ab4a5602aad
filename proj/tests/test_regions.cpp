#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "isospec/error.hpp"
#include "isospec/regions.hpp"

using namespace isospec;
using namespace isospec::regions;

namespace {

const ModelGeometry& paper_geometry() {
  static const ModelGeometry g = geometry::build_geometry({4, 2, 1, 1});
  return g;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Usage;
}

double simpson(auto&& f, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int j = 1; j < m; ++j) s += (j % 2 ? 4.0 : 2.0) * f(a + j * h);
  return s * h / 3.0;
}

// Triple Simpson of the volume density lambda^{-z} mu^{-z} over the box.
double brute_rvol(const ModelGeometry& g, int n) {
  const double x1 = std::pow(g.lambda(), n);
  const double y1 = std::pow(g.d(), n);
  auto density = [&](double z) { return std::pow(g.lambda(), -z) * std::pow(g.mu(), -z); };
  return simpson([&](double x) {
    (void)x;
    return simpson([&](double y) {
      (void)y;
      return simpson(density, 0.0, n, 400);
    }, 0.0, y1, 8);
  }, 0.0, x1, 8);
}

bool loop_is_simple_lattice_cycle(const std::vector<LatticePoint>& loop) {
  std::set<LatticePoint> seen(loop.begin(), loop.end());
  if (seen.size() != loop.size()) return false;
  for (std::size_t j = 0; j < loop.size(); ++j) {
    const auto& p = loop[j];
    const auto& q = loop[(j + 1) % loop.size()];
    if (std::abs(p[0] - q[0]) + std::abs(p[1] - q[1]) != 1) return false;
  }
  return true;
}

double ring_area(const Ring& r) { return polygon::signed_area(r); }

Rect hull(const std::vector<Ring>& rings) {
  Rect box = polygon::bounding_box(rings.front());
  for (const Ring& r : rings) {
    const Rect b = polygon::bounding_box(r);
    box = {std::min(box.x0, b.x0), std::min(box.y0, b.y0), std::max(box.x1, b.x1), std::max(box.y1, b.y1)};
  }
  return box;
}

}  // namespace

TEST_CASE("R_n closed forms against quadrature") {
  const ModelGeometry& g = paper_geometry();
  const RegionRn r1 = measure_Rn(g, 1);
  const RegionRn r2 = measure_Rn(g, 2);
  CHECK(r1.rvol == doctest::Approx(g.lambda() / std::log(2.0)).epsilon(1e-12));
  CHECK(r1.rvol == doctest::Approx(6.5809296217924014).epsilon(1e-12));
  CHECK(r2.rvol == doctest::Approx(90.05777408155224).epsilon(1e-12));
  for (int n = 1; n <= 4; ++n) {
    const RegionRn r = measure_Rn(g, n);
    CHECK(r.rvol == doctest::Approx(brute_rvol(g, n)).epsilon(1e-6));
    const double lam = g.lambda();
    const double mu = g.mu();
    const double side_y = std::pow(lam, n) * simpson([&](double z) { return std::pow(lam, -z); }, 0.0, n, 400);
    const double side_x = std::pow(g.d(), n) * simpson([&](double z) { return std::pow(mu, -z); }, 0.0, n, 400);
    CHECK(r.area_sides_y[0] == doctest::Approx(side_y).epsilon(1e-8));
    CHECK(r.area_sides_x[1] == doctest::Approx(side_x).epsilon(1e-8));
    CHECK(r.area_top == doctest::Approx(std::pow(lam, n)).epsilon(1e-12));
    CHECK(r.area_bottom == doctest::Approx(std::pow(lam, n) * std::pow(g.d(), n)).epsilon(1e-12));
  }
}

TEST_CASE("R_n inequalities hold for every height") {
  for (const auto& m : {exponents::IntMatrix2{4, 2, 1, 1}, exponents::IntMatrix2{3, 3, 1, 2},
                        exponents::IntMatrix2{9, 1, 4, 1}}) {
    const ModelGeometry g = geometry::build_geometry(m);
    for (int n = 1; n <= 30; ++n) {
      const RegionRn r = measure_Rn(g, n);
      CHECK(r.rvol >= r.rvol_lower_bound * (1.0 - 1e-10));
      CHECK(r.upper_faces() <= r.area_upper_bound * (1.0 + 1e-10));
      const double power = std::pow(std::pow(g.lambda(), n), g.eigen.alpha);
      CHECK(r.rvol_lower_bound == doctest::Approx(power / (2.0 * std::log(g.d()))).epsilon(1e-10));
    }
  }
}

TEST_CASE("R_n preconditions") {
  const ModelGeometry& g = paper_geometry();
  CHECK(code_of([&] { measure_Rn(g, 0); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([&] { measure_Rn(g, 1000); }) == ErrorCode::Overflow);
  CHECK(code_of([&] { build_stack(g, 1000); }) == ErrorCode::Overflow);
}

TEST_CASE("branches") {
  const ModelGeometry& g = paper_geometry();
  const Branch b0 = branch(g, 0);
  const Branch b1 = branch(g, 1);
  CHECK(b0.offset(g) == Vec2{0.0, 0.0});
  CHECK(b1.numerator == LatticePoint{1, -1});
  // The offset is D^{-1} gamma1, which is not a lattice vector.
  const Vec2 expect = g.d_power(-1)(g.gamma1);
  CHECK(b1.offset(g).x == doctest::Approx(expect.x).epsilon(1e-12));
  CHECK(b1.offset(g).y == doctest::Approx(expect.y).epsilon(1e-12));
  const Vec2 u = g.b_inv(b1.offset(g));
  CHECK(std::abs(u.x - std::round(u.x)) + std::abs(u.y - std::round(u.y)) > 0.1);
  CHECK_THROWS_AS(branch(g, 2), Error);
}

TEST_CASE("single slab") {
  const ModelGeometry& g = paper_geometry();
  const Slab s = build_slab(g, 1, 1);
  CHECK(s.contains_rect);
  CHECK(s.inside_w_in);
  const polygon::RingIndex index(s.region);
  for (Vec2 corner : base_rectangle(g, 1).ring()) CHECK(index.contains(corner));
  CHECK(loop_is_simple_lattice_cycle(s.loop));
  CHECK(ring_area(s.region) == doctest::Approx(s.euclidean_area).epsilon(1e-9));
  CHECK(code_of([&] { build_slab(g, 2, 1); }) == ErrorCode::PreconditionViolated);
  CHECK(code_of([&] { build_slab(g, 0, 1); }) == ErrorCode::PreconditionViolated);
}

TEST_CASE("slab invariants over random heights and branches") {
  const ModelGeometry& g = paper_geometry();
  const int k = lattice::backtracking_constant(g);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick_n(1, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = pick_n(rng);
    const int i = std::uniform_int_distribution<int>(1, n)(rng);
    const Slab s = build_slab(g, i, n, branch(g, trial % 2));
    CAPTURE(n);
    CAPTURE(i);
    CHECK(s.contains_rect);
    CHECK(s.inside_w_in);
    CHECK(loop_is_simple_lattice_cycle(s.loop));
    CHECK(s.twice_lattice_area > 0);
    CHECK(ring_area(s.region) == doctest::Approx(s.euclidean_area).epsilon(1e-9));
    std::size_t quad_edges = 0;
    for (const auto& piece : s.quad) {
      CHECK(piece.multiplicity_certificate <= k);
      CHECK(piece.multiplicity_certificate ==
            lattice::projection_multiplicity(piece.polyline, piece.strip.projection));
      quad_edges += piece.lattice.size() - 1;
      // Each trimmed piece lies in its strip.
      for (Vec2 p : piece.polyline) {
        const double t = piece.strip.projection == lattice::Projection::X ? p.y : p.x;
        CHECK(t >= piece.strip.lo - 1e-9 * std::max(1.0, std::abs(t)));
        CHECK(t <= piece.strip.hi() + 1e-9 * std::max(1.0, std::abs(t)));
      }
    }
    CHECK(quad_edges == s.loop.size());
    CHECK(s.edge_counts[0] + s.edge_counts[1] == static_cast<std::int64_t>(s.loop.size()));
  }
}

TEST_CASE("stack containment chain") {
  const ModelGeometry& g = paper_geometry();
  for (int n = 1; n <= 6; ++n) {
    for (int b = 0; b < 2; ++b) {
      const Stack st = build_stack(g, n, branch(g, b));
      CAPTURE(n);
      CHECK(st.slabs.size() == static_cast<std::size_t>(n));
      CHECK(st.containment_holds());
      CHECK(st.kappa == doctest::Approx(kappa(g)));
    }
  }
  CHECK(kappa(g) == doctest::Approx(std::max(std::log(1 + 2 * g.w / g.lambda()) / std::log(g.lambda()),
                                             std::log(1 + 2 * g.w) / std::log(2.0))));
}

TEST_CASE("boundary parts") {
  const ModelGeometry& g = paper_geometry();
  const auto metric = g.metric();
  for (int n = 1; n <= 5; ++n) {
    const Stack st = build_stack(g, n);
    const BoundaryMeasurement& m = st.boundary;
    CAPTURE(n);
    CHECK(m.top > 0.0);
    CHECK(m.vertical > 0.0);
    CHECK(m.horizontal > 0.0);
    CHECK(m.total_upper == doctest::Approx(m.top + m.vertical + m.horizontal).epsilon(1e-14));
    CHECK_FALSE(m.estimated);
    REQUIRE(m.levels.size() == static_cast<std::size_t>(n));
    for (const HorizontalLevel& lv : m.levels) {
      CHECK(lv.exact >= 0.0);
      CHECK(lv.exact <= lv.annulus_bound);
    }
    // The top face of R'_{n+kappa} has area lambda^{n+kappa}.
    CHECK(m.top <= std::pow(g.d(), st.kappa) * std::pow(g.lambda(), n + st.kappa));
    CHECK(m.top == doctest::Approx(metric.horizontal_area(st.slabs.back().euclidean_area, n)));
    double v = 0.0;
    for (double x : m.vertical_by_level) v += x;
    CHECK(v == doctest::Approx(m.vertical).epsilon(1e-12));
  }
}

TEST_CASE("vertical part is the sum over the traced pieces") {
  const ModelGeometry& g = paper_geometry();
  const auto metric = g.metric();
  const Stack st = build_stack(g, 1);
  double sum = 0.0;
  for (const auto& piece : st.slabs[0].quad) {
    for (std::size_t j = 0; j + 1 < piece.polyline.size(); ++j) {
      const Vec2 d = piece.polyline[j + 1] - piece.polyline[j];
      sum += metric.lateral_area(d.x, d.y, 0.0, 1.0);
    }
  }
  CHECK(st.boundary.vertical == doctest::Approx(sum).epsilon(1e-9));
}

TEST_CASE("horizontal part against Monte Carlo") {
  const ModelGeometry& g = paper_geometry();
  const auto metric = g.metric();
  const int n = 2;
  const Stack st = build_stack(g, n);
  // Independent estimate in the plane: sample a box holding every D_i.
  std::vector<Ring> rings{base_rectangle(g, n).ring()};
  for (const Slab& s : st.slabs) rings.push_back(s.region);
  const Rect box = hull(rings);
  std::vector<polygon::RingIndex> index(rings.begin(), rings.end());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(box.x0, box.x1);
  std::uniform_real_distribution<double> uy(box.y0, box.y1);
  std::vector<long> hits(n, 0);
  const long samples = 1'000'000;
  for (long s = 0; s < samples; ++s) {
    const Vec2 p{ux(rng), uy(rng)};
    for (int h = 0; h < n; ++h) hits[h] += index[h].contains(p) != index[h + 1].contains(p);
  }
  double estimate = 0.0;
  for (int h = 0; h < n; ++h) estimate += metric.horizontal_area(box.area() * hits[h] / samples, h);
  CHECK(estimate == doctest::Approx(st.boundary.horizontal).epsilon(0.02));

  MeasureOptions mc;
  mc.force_monte_carlo = true;
  const BoundaryMeasurement forced = measure_boundary(g, st, mc);
  CHECK(forced.estimated);
  CHECK(forced.horizontal == doctest::Approx(st.boundary.horizontal).epsilon(0.02));
}

TEST_CASE("stack volume against 3D Monte Carlo") {
  const ModelGeometry& g = paper_geometry();
  const int n = 3;
  const Stack st = build_stack(g, n);
  std::vector<Ring> rings;
  for (const Slab& s : st.slabs) rings.push_back(s.region);
  const Rect box = hull(rings);
  std::vector<polygon::RingIndex> index;
  for (const Slab& s : st.slabs) index.emplace_back(s.region);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(box.x0, box.x1);
  std::uniform_real_distribution<double> uy(box.y0, box.y1);
  std::uniform_real_distribution<double> uz(0.0, n);
  const double ln_d = std::log(g.d());
  double acc = 0.0;
  const long samples = 1'000'000;
  for (long s = 0; s < samples; ++s) {
    const double z = uz(rng);
    const int level = std::min(n, static_cast<int>(z) + 1);
    if (index[level - 1].contains({ux(rng), uy(rng)})) acc += std::exp(-z * ln_d);
  }
  const double estimate = box.area() * n * acc / samples;
  CHECK(estimate == doctest::Approx(st.rvol).epsilon(0.01));
}

TEST_CASE("ball") {
  const ModelGeometry& g = paper_geometry();
  for (int n = 1; n <= 4; ++n) {
    const Ball b = build_ball(g, n);
    const RegionRn r = measure_Rn(g, n);
    CAPTURE(n);
    CHECK(b.y_n >= 2.0 * r.rvol);
    CHECK(b.fold_area >= r.area_bottom);
    CHECK(b.bottom_difference > 0.0);
    CHECK(b.x_lo > 0.0);
    CHECK(b.x_lo < b.x_hi);
    CHECK(b.y_n == doctest::Approx(b.stack0.rvol + b.stack1.rvol));
    // Both bottoms split into the common part and the two differences.
    const double a0 = b.stack0.slabs[0].euclidean_area;
    const double a1 = b.stack1.slabs[0].euclidean_area;
    CHECK(a0 + a1 == doctest::Approx(2.0 * b.fold_area + b.bottom_difference).epsilon(1e-9));
    CHECK(b.stack1.containment_holds());
  }
}

TEST_CASE("fold area against an independent overlay") {
  const ModelGeometry& g = paper_geometry();
  const Ball b = build_ball(g, 2);
  const double inter = polygon::intersection_area(b.stack0.slabs[0].region, b.stack1.slabs[0].region);
  // The library overlays in an integer frame; this overlay sees rounded plane coordinates.
  CHECK(b.fold_area == doctest::Approx(inter).epsilon(1e-8));
}

TEST_CASE("stack svg") {
  const ModelGeometry& g = paper_geometry();
  const Stack st = build_stack(g, 2);
  const std::string svg = stack_svg(g, st);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("id=\"level-1\"") != std::string::npos);
  CHECK(svg.find("id=\"level-2\"") != std::string::npos);
  CHECK(svg.find("id=\"level-3\"") == std::string::npos);
  CHECK(svg.find("id=\"base\"") != std::string::npos);
}
