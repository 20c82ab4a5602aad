#include "isospec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>

#include "isospec/error.hpp"

namespace isospec::lattice {

namespace {

// Points of an arithmetic progression of the given spacing inside a closed
// window of the given length, maximized over the window's phase.
int family_max(double spacing, double length) {
  auto count = [&](double y) {
    return static_cast<int>(std::floor((y + length) / spacing) - std::ceil(y / spacing)) + 1;
  };
  // The count only changes where an end of the window crosses a point.
  double r = std::fmod(-length, spacing);
  if (r < 0.0) r += spacing;
  const double events[] = {0.0, r, spacing};
  int best = 0;
  for (int j = 0; j < 2; ++j) {
    best = std::max(best, count(events[j]));
    best = std::max(best, count(0.5 * (events[j] + events[j + 1])));
  }
  return best;
}

/// Lattice rows u1 = const, each holding a contiguous run of u2.
struct RowGraph {
  std::int64_t u1_min = 0;
  std::vector<std::int64_t> start;   // first u2 per row
  std::vector<std::int64_t> length;  // run length per row
  std::vector<std::int64_t> offset;  // node index of the first entry per row

  std::int64_t size() const { return offset.empty() ? 0 : offset.back() + length.back(); }

  std::int64_t index(std::int64_t u1, std::int64_t u2) const {
    const std::int64_t r = u1 - u1_min;
    if (r < 0 || r >= static_cast<std::int64_t>(start.size())) return -1;
    const std::int64_t k = u2 - start[r];
    if (k < 0 || k >= length[r]) return -1;
    return offset[r] + k;
  }

  LatticePoint point(std::int64_t node) const {
    const auto it = std::upper_bound(offset.begin(), offset.end(), node);
    const std::int64_t r = (it - offset.begin()) - 1;
    return {u1_min + r, start[r] + (node - offset[r])};
  }
};

struct Frame1 {
  // s = projection coordinate, t = transverse coordinate, both linear in u.
  double s1, s2, t1, t2;
};

Frame1 frame_for(const Mat2& b, Projection p) {
  if (p == Projection::X) return {b.m11, b.m12, b.m21, b.m22};
  return {b.m21, b.m22, b.m11, b.m12};
}

RowGraph enumerate_nodes(const Mat2& b, Projection p, double t_lo, double t_hi, double s_lo, double s_hi,
                         std::size_t budget) {
  const Frame1 f = frame_for(b, p);
  const Mat2 inv = b.inverse();
  auto to_plane = [&](double s, double t) { return p == Projection::X ? Vec2{s, t} : Vec2{t, s}; };
  double u1_lo = std::numeric_limits<double>::infinity();
  double u1_hi = -u1_lo;
  for (double s : {s_lo, s_hi}) {
    for (double t : {t_lo, t_hi}) {
      const Vec2 u = inv(to_plane(s, t));
      u1_lo = std::min(u1_lo, u.x);
      u1_hi = std::max(u1_hi, u.x);
    }
  }
  const double tol = 1e-12 * std::max(1.0, std::abs(t_hi - t_lo));
  auto inside = [&](std::int64_t u1, std::int64_t u2) {
    const double t = f.t1 * u1 + f.t2 * u2;
    const double s = f.s1 * u1 + f.s2 * u2;
    return t >= t_lo - tol && t <= t_hi + tol && s >= s_lo && s <= s_hi;
  };
  auto interval = [](double c1, double c2, double lo, double hi, double u1) {
    double a = (lo - c1 * u1) / c2;
    double z = (hi - c1 * u1) / c2;
    if (a > z) std::swap(a, z);
    return std::pair{a, z};
  };

  RowGraph g;
  g.u1_min = static_cast<std::int64_t>(std::floor(u1_lo)) - 1;
  const auto u1_max = static_cast<std::int64_t>(std::ceil(u1_hi)) + 1;
  std::int64_t total = 0;
  for (std::int64_t u1 = g.u1_min; u1 <= u1_max; ++u1) {
    const auto [ta, tz] = interval(f.t1, f.t2, t_lo, t_hi, static_cast<double>(u1));
    const auto [sa, sz] = interval(f.s1, f.s2, s_lo, s_hi, static_cast<double>(u1));
    auto lo = static_cast<std::int64_t>(std::ceil(std::max(ta, sa))) - 1;
    auto hi = static_cast<std::int64_t>(std::floor(std::min(tz, sz))) + 1;
    while (lo <= hi && !inside(u1, lo)) ++lo;
    while (hi >= lo && !inside(u1, hi)) --hi;
    g.start.push_back(lo);
    g.length.push_back(std::max<std::int64_t>(0, hi - lo + 1));
    g.offset.push_back(total);
    total += g.length.back();
    if (static_cast<std::size_t>(total) > budget) {
      throw Error(ErrorCode::Overflow, "strip window holds more than " + std::to_string(budget) + " vertices");
    }
  }
  return g;
}

struct PreimageStrip {
  Projection projection;
  double t_lo, t_hi, s_lo, s_hi;
};

std::vector<LatticePoint> shortest_strip_path(const ModelGeometry& geom, const PreimageStrip& strip,
                                              double margin, std::size_t budget) {
  const Frame1 f = frame_for(geom.b, strip.projection);
  const RowGraph g =
      enumerate_nodes(geom.b, strip.projection, strip.t_lo, strip.t_hi, strip.s_lo - margin, strip.s_hi + margin, budget);
  const std::int64_t n = g.size();
  if (n == 0) return {};

  const std::array<double, 2> cost = {geom.cells.vertical[0], geom.cells.vertical[1]};
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(static_cast<std::size_t>(n), -1);
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;

  auto proj = [&](const LatticePoint& u) { return f.s1 * u[0] + f.s2 * u[1]; };
  for (std::int64_t v = 0; v < n; ++v) {
    if (proj(g.point(v)) <= strip.s_lo) {
      dist[v] = 0.0;
      queue.emplace(0.0, v);
    }
  }

  std::int64_t target = -1;
  while (!queue.empty()) {
    const auto [dv, v] = queue.top();
    queue.pop();
    if (dv > dist[v]) continue;
    const LatticePoint u = g.point(v);
    if (proj(u) >= strip.s_hi) {
      target = v;
      break;
    }
    const std::array<std::pair<LatticePoint, int>, 4> steps = {{
        {{u[0] + 1, u[1]}, 0},
        {{u[0] - 1, u[1]}, 0},
        {{u[0], u[1] + 1}, 1},
        {{u[0], u[1] - 1}, 1},
    }};
    for (const auto& [nb, dir] : steps) {
      const std::int64_t w = g.index(nb[0], nb[1]);
      if (w < 0) continue;
      const double nd = dv + cost[dir];
      if (nd < dist[w]) {
        dist[w] = nd;
        parent[w] = v;
        queue.emplace(nd, w);
      }
    }
  }
  if (target < 0) return {};

  std::vector<LatticePoint> path;
  for (std::int64_t v = target; v >= 0; v = parent[v]) path.push_back(g.point(v));
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

Arrangement::Arrangement(const ModelGeometry& geom, int level, Vec2 offset, polygon::Rect window)
    : level_(level), offset_(offset), frame_(geom.level_frame(level)), window_(window) {
  if (level < 1) throw Error(ErrorCode::PreconditionViolated, "arrangement level must be >= 1");
}

Vec2 Arrangement::vertex(LatticePoint u) const {
  return offset_ + frame_(Vec2{static_cast<double>(u[0]), static_cast<double>(u[1])});
}

std::vector<Segment> Arrangement::materialize() const {
  const Mat2 inv = frame_.inverse();
  double lo[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double hi[2] = {-lo[0], -lo[1]};
  for (const Vec2& corner : window_.ring()) {
    const Vec2 u = inv(corner - offset_);
    lo[0] = std::min(lo[0], u.x);
    lo[1] = std::min(lo[1], u.y);
    hi[0] = std::max(hi[0], u.x);
    hi[1] = std::max(hi[1], u.y);
  }
  std::vector<Segment> out;
  for (auto u1 = static_cast<std::int64_t>(std::floor(lo[0])) - 1; u1 <= static_cast<std::int64_t>(std::ceil(hi[0]));
       ++u1) {
    for (auto u2 = static_cast<std::int64_t>(std::floor(lo[1])) - 1;
         u2 <= static_cast<std::int64_t>(std::ceil(hi[1])); ++u2) {
      const Vec2 a = vertex({u1, u2});
      for (int dir = 0; dir < 2; ++dir) {
        const Vec2 b = vertex(dir == 0 ? LatticePoint{u1 + 1, u2} : LatticePoint{u1, u2 + 1});
        const polygon::Rect box{std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
        if (box.x1 < window_.x0 || box.x0 > window_.x1 || box.y1 < window_.y0 || box.y0 > window_.y1) continue;
        out.push_back({a, b, {u1, u2}, dir});
      }
    }
  }
  return out;
}

int backtracking_constant(const ModelGeometry& geom, Projection fibers_of) {
  // u = B^{-1} p. Along a vertical fiber (fibers of the x-projection) the
  // lines u1 = m and u2 = m are crossed at spacings 1/|B^{-1}_12| and
  // 1/|B^{-1}_22|; horizontally at 1/|B^{-1}_11| and 1/|B^{-1}_21|. The two
  // progressions' relative phase varies continuously with the fiber's
  // position, so their maxima are attained simultaneously.
  const Mat2& bi = geom.b_inv;
  const bool vertical = fibers_of == Projection::X;
  const double c1 = std::abs(vertical ? bi.m12 : bi.m11);
  const double c2 = std::abs(vertical ? bi.m22 : bi.m21);
  int k = 0;
  for (double c : {c1, c2}) {
    if (c == 0.0) {
      throw Error(ErrorCode::PreconditionViolated, "lattice line parallel to an axis");
    }
    k += family_max(1.0 / c, geom.w);
  }
  return k;
}

int backtracking_constant(const ModelGeometry& geom) {
  return std::max(backtracking_constant(geom, Projection::X), backtracking_constant(geom, Projection::Y));
}

std::array<std::int64_t, 2> TracedLine::edge_counts() const {
  std::array<std::int64_t, 2> counts{0, 0};
  for (std::size_t j = 1; j < lattice.size(); ++j) ++counts[lattice[j][0] != lattice[j - 1][0] ? 0 : 1];
  return counts;
}

int projection_multiplicity(std::span<const Vec2> polyline, Projection projection) {
  if (polyline.empty()) return 0;
  auto s_of = [&](const Vec2& p) { return projection == Projection::X ? p.x : p.y; };
  std::vector<double> verts;
  std::vector<double> mins;
  std::vector<double> maxs;
  std::vector<double> flat;  // edges lying inside one fiber
  verts.reserve(polyline.size());
  for (std::size_t j = 0; j < polyline.size(); ++j) {
    verts.push_back(s_of(polyline[j]));
    if (j + 1 < polyline.size()) {
      const double a = s_of(polyline[j]);
      const double b = s_of(polyline[j + 1]);
      mins.push_back(std::min(a, b));
      maxs.push_back(std::max(a, b));
      if (a == b) flat.push_back(a);
    }
  }
  std::sort(verts.begin(), verts.end());
  std::sort(mins.begin(), mins.end());
  std::sort(maxs.begin(), maxs.end());
  std::sort(flat.begin(), flat.end());
  auto count_lt = [](const std::vector<double>& v, double x) {
    return static_cast<long>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  auto count_le = [](const std::vector<double>& v, double x) {
    return static_cast<long>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
  };
  long best = 0;
  for (std::size_t j = 0; j < verts.size();) {
    const double x = verts[j];
    std::size_t m = j;
    while (m < verts.size() && verts[m] == x) ++m;
    // Edges whose open projection interval contains x, plus the vertices at x.
    const long flat_here = count_le(flat, x) - count_lt(flat, x);
    const long through = count_lt(mins, x) - (count_le(maxs, x) - flat_here);
    best = std::max(best, through + static_cast<long>(m - j));
    // Edges covering the open gap to the next event.
    const long gap = count_le(mins, x) - count_le(maxs, x);
    best = std::max(best, gap);
    j = m;
  }
  return static_cast<int>(best);
}

TracedLine trace_strip_line(const ModelGeometry& geom, const Strip& strip, int level, Vec2 offset,
                            const TraceOptions& options) {
  if (level < 1) throw Error(ErrorCode::PreconditionViolated, "trace level must be >= 1");
  const double lam_i = std::pow(geom.lambda(), level - 1);
  const double mu_i = std::pow(geom.mu(), level - 1);
  // D^{1-level}(p - offset): the strip's level-1 preimage.
  PreimageStrip pre{strip.projection, 0, 0, 0, 0};
  if (strip.projection == Projection::X) {
    pre.t_lo = (strip.lo - offset.y) / mu_i;
    pre.t_hi = (strip.hi() - offset.y) / mu_i;
    pre.s_lo = (strip.span_lo - offset.x) / lam_i;
    pre.s_hi = (strip.span_hi - offset.x) / lam_i;
  } else {
    pre.t_lo = (strip.lo - offset.x) / lam_i;
    pre.t_hi = (strip.hi() - offset.x) / lam_i;
    pre.s_lo = (strip.span_lo - offset.y) / mu_i;
    pre.s_hi = (strip.span_hi - offset.y) / mu_i;
  }
  if (pre.t_hi - pre.t_lo < geom.w * (1.0 - 1e-9)) {
    throw Error(ErrorCode::TraceFailed, "strip narrower than the level-scaled diameter");
  }
  if (!(pre.s_lo < pre.s_hi)) throw Error(ErrorCode::PreconditionViolated, "empty strip span");

  double margin = options.margin_factor * geom.w;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt, margin *= 2.0) {
    std::vector<LatticePoint> path = shortest_strip_path(geom, pre, margin, options.node_budget);
    if (path.empty()) continue;

    TracedLine line;
    line.level = level;
    line.offset = offset;
    line.strip = strip;
    line.margin = margin;
    line.retries = attempt;
    line.lattice = std::move(path);
    const Mat2 frame = geom.level_frame(level);
    line.polyline.reserve(line.lattice.size());
    for (const LatticePoint& u : line.lattice) {
      line.polyline.push_back(offset + frame(Vec2{static_cast<double>(u[0]), static_cast<double>(u[1])}));
    }
    line.multiplicity_certificate = projection_multiplicity(line.polyline, strip.projection);
    const int k = backtracking_constant(geom, strip.projection);
    if (line.multiplicity_certificate > k) {
      throw Error(ErrorCode::CertificateExceeded, "traced line is " + std::to_string(line.multiplicity_certificate) +
                                                      "-to-one, backtracking constant is " + std::to_string(k));
    }
    return line;
  }
  throw Error(ErrorCode::TraceFailed, "no lattice path across the strip window");
}

std::string arrangement_svg(const Arrangement& arrangement, std::span<const TracedLine> lines) {
  const polygon::Rect& win = arrangement.window();
  constexpr double kSize = 800.0;
  const double sx = kSize / win.width();
  const double sy = kSize / win.height();
  auto px = [&](Vec2 p) {
    std::ostringstream o;
    o.precision(6);
    o << (p.x - win.x0) * sx << ',' << (win.y1 - p.y) * sy;
    return o.str();
  };
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kSize << "\" height=\"" << kSize
      << "\">\n<g stroke=\"#bbbbbb\" stroke-width=\"0.5\">\n";
  for (const Segment& s : arrangement.materialize()) {
    svg << "<polyline fill=\"none\" points=\"" << px(s.a) << ' ' << px(s.b) << "\"/>\n";
  }
  svg << "</g>\n";
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  for (std::size_t j = 0; j < lines.size(); ++j) {
    svg << "<polyline fill=\"none\" stroke=\"" << colors[j % 4] << "\" stroke-width=\"1.5\" points=\"";
    for (const Vec2& p : lines[j].polyline) svg << px(p) << ' ';
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace isospec::lattice
