#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "isospec/error.hpp"
#include "isospec/lattice.hpp"

using namespace isospec;
using namespace isospec::lattice;

namespace {

const ModelGeometry& paper_geometry() {
  static const ModelGeometry g = geometry::build_geometry({4, 2, 1, 1});
  return g;
}

// Distinct points where an axis-parallel segment meets the materialized edges.
int crossings(const std::vector<Segment>& edges, Vec2 p, Vec2 q) {
  std::vector<double> hits;
  const bool vertical = p.x == q.x;
  for (const Segment& e : edges) {
    const Vec2 d = e.b - e.a;
    const double denom = vertical ? d.x : d.y;
    if (denom == 0.0) continue;
    const double s = vertical ? (p.x - e.a.x) / denom : (p.y - e.a.y) / denom;
    if (s < -1e-12 || s > 1 + 1e-12) continue;
    const double along = vertical ? e.a.y + s * d.y : e.a.x + s * d.x;
    const double lo = vertical ? p.y : p.x;
    const double hi = vertical ? q.y : q.x;
    if (along >= lo - 1e-12 && along <= hi + 1e-12) hits.push_back(along);
  }
  std::sort(hits.begin(), hits.end());
  int count = 0;
  for (std::size_t j = 0; j < hits.size(); ++j) {
    if (j == 0 || hits[j] - hits[j - 1] > 1e-9) ++count;
  }
  return count;
}

// Plain Dijkstra over materialized arrangement edges lying in the strip.
double oracle_trace_cost(const ModelGeometry& g, const Strip& strip, int level, double margin) {
  const bool px = strip.projection == Projection::X;
  const double lam = std::pow(g.lambda(), level - 1);
  const double span_margin = margin * (px ? lam : std::pow(g.mu(), level - 1));
  const polygon::Rect window =
      px ? polygon::Rect{strip.span_lo - span_margin, strip.lo, strip.span_hi + span_margin, strip.hi()}
         : polygon::Rect{strip.lo, strip.span_lo - span_margin, strip.hi(), strip.span_hi + span_margin};
  const Arrangement arr(g, level, {}, window);
  const double tol = 1e-12 * std::max(1.0, strip.width);
  auto in_strip = [&](Vec2 p) {
    const double t = px ? p.y : p.x;
    return t >= strip.lo - tol && t <= strip.hi() + tol && window.contains(px ? Vec2{p.x, window.y0} : Vec2{window.x0, p.y});
  };
  const auto metric = g.metric();
  std::map<LatticePoint, std::vector<std::pair<LatticePoint, double>>> adj;
  std::map<LatticePoint, Vec2> where;
  for (const Segment& s : arr.materialize()) {
    if (!in_strip(s.a) || !in_strip(s.b)) continue;
    const LatticePoint to = s.direction == 0 ? LatticePoint{s.from[0] + 1, s.from[1]} : LatticePoint{s.from[0], s.from[1] + 1};
    const double c = metric.lateral_area(s.b.x - s.a.x, s.b.y - s.a.y, level - 1, level);
    adj[s.from].push_back({to, c});
    adj[to].push_back({s.from, c});
    where[s.from] = s.a;
    where[to] = s.b;
  }
  std::map<LatticePoint, double> dist;
  using Item = std::pair<double, LatticePoint>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (const auto& [u, p] : where) {
    if ((px ? p.x : p.y) <= strip.span_lo) {
      dist[u] = 0.0;
      pq.push({0.0, u});
    }
  }
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    const Vec2 p = where[u];
    if ((px ? p.x : p.y) >= strip.span_hi) return d;
    for (const auto& [v, c] : adj[u]) {
      const auto it = dist.find(v);
      if (it == dist.end() || d + c < it->second) {
        dist[v] = d + c;
        pq.push({d + c, v});
      }
    }
  }
  return -1.0;
}

double path_cost(const ModelGeometry& g, const TracedLine& line) {
  const auto e = line.edge_counts();
  return static_cast<double>(e[0]) * g.cells.vertical[0] + static_cast<double>(e[1]) * g.cells.vertical[1];
}

// Independent fiber sampling: the largest number of polyline points on a
// random fiber, including fibers through vertices.
int sampled_multiplicity(const TracedLine& line, std::mt19937_64& rng, int fibers) {
  const bool px = line.strip.projection == Projection::X;
  auto s_of = [&](Vec2 p) { return px ? p.x : p.y; };
  double lo = s_of(line.polyline.front());
  double hi = lo;
  for (Vec2 p : line.polyline) {
    lo = std::min(lo, s_of(p));
    hi = std::max(hi, s_of(p));
  }
  std::uniform_real_distribution<double> pick(lo, hi);
  std::uniform_int_distribution<std::size_t> vertex(0, line.polyline.size() - 1);
  int best = 0;
  for (int f = 0; f < fibers; ++f) {
    const double s = f % 2 ? pick(rng) : s_of(line.polyline[vertex(rng)]);
    int count = 0;
    for (std::size_t j = 0; j + 1 < line.polyline.size(); ++j) {
      const double a = s_of(line.polyline[j]);
      const double b = s_of(line.polyline[j + 1]);
      // Half-open edges so shared vertices count once.
      if (a == s || (std::min(a, b) < s && s < std::max(a, b))) ++count;
    }
    if (s_of(line.polyline.back()) == s) ++count;
    best = std::max(best, count);
  }
  return best;
}

}  // namespace

TEST_CASE("backtracking constant against random segment placement") {
  const ModelGeometry& g = paper_geometry();
  const int k = backtracking_constant(g);
  CHECK(k == 3);
  const Arrangement arr(g, 1, {}, {-4.0, -4.0, 4.0 + g.w, 4.0 + g.w});
  const auto edges = arr.materialize();
  std::mt19937_64 rng(7);
  // One fundamental domain of positions suffices by periodicity; [-2, 2]^2 covers it.
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  int seen = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const Vec2 p{pos(rng), pos(rng)};
    const bool vertical = trial % 2 == 0;
    const Vec2 q = vertical ? Vec2{p.x, p.y + g.w} : Vec2{p.x + g.w, p.y};
    const int c = crossings(edges, p, q);
    REQUIRE(c <= k);
    seen = std::max(seen, c);
  }
  CHECK(seen == k);
  CHECK(backtracking_constant(g, Projection::X) <= k);
  CHECK(backtracking_constant(g, Projection::Y) <= k);
}

TEST_CASE("arrangement is periodic under the lattice") {
  const ModelGeometry& g = paper_geometry();
  const polygon::Rect win{-3.0, -3.0, 3.0, 3.0};
  const Vec2 shift = 2.0 * g.gamma1 + (-1.0) * g.gamma2;
  const Arrangement a(g, 1, {}, win);
  const Arrangement b(g, 1, {}, {win.x0 + shift.x, win.y0 + shift.y, win.x1 + shift.x, win.y1 + shift.y});
  std::set<std::tuple<long, long, int>> ka;
  std::set<std::tuple<long, long, int>> kb;
  for (const Segment& s : a.materialize()) ka.insert({s.from[0] + 2, s.from[1] - 1, s.direction});
  for (const Segment& s : b.materialize()) kb.insert({s.from[0], s.from[1], s.direction});
  CHECK(ka == kb);
  for (const Segment& s : b.materialize()) {
    const Vec2 base = a.vertex({s.from[0] - 2, s.from[1] + 1});
    CHECK(std::abs(s.a.x - base.x - shift.x) < 1e-12);
    CHECK(std::abs(s.a.y - base.y - shift.y) < 1e-12);
  }
}

TEST_CASE("level-2 arrangement is the D-image of level 1") {
  const ModelGeometry& g = paper_geometry();
  const Mat2 d = g.d_power(1);
  const Arrangement l1(g, 1, {}, {-2.0, -2.0, 2.0, 2.0});
  const Arrangement l2(g, 2, {}, {});
  for (const Segment& s : l1.materialize()) {
    const Vec2 a = d(s.a);
    const Vec2 b2 = l2.vertex(s.from);
    CHECK(std::abs(a.x - b2.x) < 1e-9);
    CHECK(std::abs(a.y - b2.y) < 1e-9);
  }
  // Level-2 vertices are level-1 vertices (A preserves the lattice).
  const auto a = g.matrix;
  for (LatticePoint u : {LatticePoint{1, 0}, LatticePoint{0, 1}, LatticePoint{3, -2}}) {
    const Vec2 p = l2.vertex(u);
    const Vec2 q = l1.vertex({a.a11 * u[0] + a.a12 * u[1], a.a21 * u[0] + a.a22 * u[1]});
    CHECK(std::abs(p.x - q.x) < 1e-9);
    CHECK(std::abs(p.y - q.y) < 1e-9);
  }
}

TEST_CASE("traced line is a shortest strip path") {
  const ModelGeometry& g = paper_geometry();
  const double span = std::pow(g.lambda(), 3);
  const Strip strip{Projection::X, -g.w, g.w, 0.0, span};
  const TracedLine line = trace_strip_line(g, strip, 1);
  CHECK(line.retries == 0);
  for (Vec2 p : line.polyline) {
    CHECK(p.y >= -g.w - 1e-9);
    CHECK(p.y <= 1e-9);
  }
  CHECK(line.polyline.front().x <= 0.0);
  CHECK(line.polyline.back().x >= span);
  for (std::size_t j = 1; j < line.lattice.size(); ++j) {
    CHECK(std::abs(line.lattice[j][0] - line.lattice[j - 1][0]) + std::abs(line.lattice[j][1] - line.lattice[j - 1][1]) ==
          1);
  }
  const double oracle = oracle_trace_cost(g, strip, 1, line.margin);
  REQUIRE(oracle > 0.0);
  CHECK(path_cost(g, line) == doctest::Approx(oracle).epsilon(1e-9));

  SUBCASE("vertical strip") {
    const Strip ys{Projection::Y, -g.w, g.w, 0.0, 8.0};
    const TracedLine yl = trace_strip_line(g, ys, 1);
    CHECK(path_cost(g, yl) == doctest::Approx(oracle_trace_cost(g, ys, 1, yl.margin)).epsilon(1e-9));
  }
}

TEST_CASE("tracing commutes with D") {
  const ModelGeometry& g = paper_geometry();
  const double lam = g.lambda();
  const double mu = g.mu();
  const Strip s1{Projection::X, -g.w, g.w, 0.0, lam * lam};
  const Strip s2{Projection::X, -mu * g.w, mu * g.w, 0.0, lam * lam * lam};
  const TracedLine l1 = trace_strip_line(g, s1, 1);
  const TracedLine l2 = trace_strip_line(g, s2, 2);
  REQUIRE(l1.polyline.size() == l2.polyline.size());
  const Mat2 d = g.d_power(1);
  for (std::size_t j = 0; j < l1.polyline.size(); ++j) {
    const Vec2 p = d(l1.polyline[j]);
    CHECK(std::abs(p.x - l2.polyline[j].x) < 1e-9 * std::max(1.0, std::abs(p.x)));
    CHECK(std::abs(p.y - l2.polyline[j].y) < 1e-9);
  }
}

TEST_CASE("narrow strip fails to trace") {
  const ModelGeometry& g = paper_geometry();
  const Strip narrow{Projection::X, -0.5 * g.w, 0.5 * g.w, 0.0, 20.0};
  try {
    trace_strip_line(g, narrow, 1);
    FAIL("expected TraceFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TraceFailed);
  }
  CHECK_THROWS_AS(trace_strip_line(g, narrow, 0), Error);
}

TEST_CASE("fiber sampling never beats the certificate") {
  const ModelGeometry& g = paper_geometry();
  const int k = backtracking_constant(g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> off(-3.0, 3.0);
  std::uniform_int_distribution<int> level(1, 4);
  for (int trial = 0; trial < 24; ++trial) {
    const int i = level(rng);
    const bool px = trial % 2 == 0;
    const double scale = std::pow(px ? g.mu() : g.lambda(), i - 1);
    const double lo = off(rng);
    const Strip s{px ? Projection::X : Projection::Y, lo, g.w * scale, off(rng), 30.0 + 10.0 * trial};
    const Vec2 offset{off(rng), off(rng)};
    const TracedLine line = trace_strip_line(g, s, i, offset);
    const int sampled = sampled_multiplicity(line, rng, 100);
    CHECK(sampled <= line.multiplicity_certificate);
    CHECK(line.multiplicity_certificate <= k);
  }
}

TEST_CASE("projection multiplicity") {
  using P = std::vector<Vec2>;
  CHECK(projection_multiplicity(P{}, Projection::X) == 0);
  CHECK(projection_multiplicity(P{{0, 0}}, Projection::X) == 1);
  CHECK(projection_multiplicity(P{{0, 0}, {1, 0}, {2, 1}}, Projection::X) == 1);
  // Backtrack: x goes 0 -> 2 -> 1 -> 3, the fiber at 1.5 meets three edges.
  CHECK(projection_multiplicity(P{{0, 0}, {2, 1}, {1, 2}, {3, 3}}, Projection::X) == 3);
  // A vertical edge puts two points on one fiber.
  CHECK(projection_multiplicity(P{{0, 0}, {0, 1}, {1, 1}}, Projection::X) == 2);
  CHECK(projection_multiplicity(P{{0, 0}, {0, 1}, {1, 1}}, Projection::Y) == 2);
}

TEST_CASE("arrangement svg") {
  const ModelGeometry& g = paper_geometry();
  const Arrangement arr(g, 1, {}, {-1.0, -1.0, 4.0, 2.0});
  const Strip s{Projection::X, -g.w, g.w, 0.0, 3.0};
  const std::vector<TracedLine> lines{trace_strip_line(g, s, 1)};
  const std::string svg = arrangement_svg(arr, lines);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
