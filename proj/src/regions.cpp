#include "isospec/regions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "isospec/error.hpp"
#include "isospec/parallel.hpp"

namespace isospec::regions {

namespace {

constexpr double kOverflowCap = 1e300;

struct PointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept {
    const auto a = static_cast<std::uint64_t>(p[0]);
    const auto b = static_cast<std::uint64_t>(p[1]);
    return std::hash<std::uint64_t>{}(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL + (a << 6)));
  }
};

using PointIndex = std::unordered_map<LatticePoint, std::size_t, PointHash>;

PointIndex index_of(const std::vector<LatticePoint>& path) {
  PointIndex idx;
  idx.reserve(path.size() * 2);
  for (std::size_t j = 0; j < path.size(); ++j) idx.emplace(path[j], j);
  return idx;
}

std::int64_t twice_area(const std::vector<LatticePoint>& loop) {
  __int128 sum = 0;
  const std::size_t n = loop.size();
  for (std::size_t j = 0; j < n; ++j) {
    const LatticePoint& p = loop[j];
    const LatticePoint& q = loop[(j + 1) % n];
    sum += static_cast<__int128>(p[0]) * q[1] - static_cast<__int128>(q[0]) * p[1];
  }
  return static_cast<std::int64_t>(sum);
}

/// Integer image scale * M u + shift of a lattice loop, with straight runs
/// collapsed, as a ring of exactly representable doubles.
Ring integer_ring(const std::vector<LatticePoint>& loop, const exponents::IntMatrix2& m, std::int64_t scale,
                  LatticePoint shift) {
  std::vector<LatticePoint> pts;
  pts.reserve(loop.size());
  auto keep = [&](const LatticePoint& p, const LatticePoint& q, const LatticePoint& r) {
    const std::int64_t ax = q[0] - p[0], ay = q[1] - p[1];
    const std::int64_t bx = r[0] - q[0], by = r[1] - q[1];
    return ax * by - ay * bx != 0 || ax * bx + ay * by < 0;
  };
  for (const LatticePoint& u : loop) {
    const LatticePoint v{scale * (m.a11 * u[0] + m.a12 * u[1]) + shift[0],
                         scale * (m.a21 * u[0] + m.a22 * u[1]) + shift[1]};
    while (pts.size() >= 2 && !keep(pts[pts.size() - 2], pts.back(), v)) pts.pop_back();
    pts.push_back(v);
  }
  // Close the run across the seam.
  bool changed = true;
  while (changed && pts.size() > 3) {
    changed = false;
    if (!keep(pts[pts.size() - 2], pts.back(), pts.front())) {
      pts.pop_back();
      changed = true;
    } else if (!keep(pts.back(), pts.front(), pts[1])) {
      pts.erase(pts.begin());
      changed = true;
    }
  }
  Ring ring;
  ring.reserve(pts.size());
  for (const LatticePoint& p : pts) ring.push_back({static_cast<double>(p[0]), static_cast<double>(p[1])});
  return ring;
}

constexpr exponents::IntMatrix2 kIdentity{1, 0, 0, 1};

/// Lattice-unit area of a sym-diff b, exact except for the intersection.
double symmetric_difference(const Ring& a, const Ring& b, const MeasureOptions& options, bool& estimated) {
  if (!options.force_monte_carlo) {
    try {
      return polygon::symmetric_difference_area(a, b);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PolygonOpFailed) throw;
    }
  }
  estimated = true;
  return monte_carlo_symmetric_difference(a, b, options.monte_carlo_samples, options.seed);
}

std::vector<LatticePoint> slice(const std::vector<LatticePoint>& v, std::size_t from, std::size_t to) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from), v.begin() + static_cast<std::ptrdiff_t>(to) + 1};
}

lattice::TracedLine trimmed(const ModelGeometry& geom, const lattice::TracedLine& line, std::size_t from,
                            std::size_t to) {
  lattice::TracedLine out = line;
  out.lattice = slice(line.lattice, from, to);
  out.polyline.assign(line.polyline.begin() + static_cast<std::ptrdiff_t>(from),
                      line.polyline.begin() + static_cast<std::ptrdiff_t>(to) + 1);
  out.multiplicity_certificate = lattice::projection_multiplicity(out.polyline, line.strip.projection);
  if (out.multiplicity_certificate > lattice::backtracking_constant(geom, line.strip.projection)) {
    throw Error(ErrorCode::CertificateExceeded, "trimmed line exceeds the backtracking constant");
  }
  return out;
}

struct Corners {
  std::size_t a1, b1;  // L1 range: p41 .. p12
  std::size_t a2, b2;  // L2 range: p12 .. p23
  std::size_t a3, b3;  // L3 range: p34 .. p23
  std::size_t a4, b4;  // L4 range: p41 .. p34
};

bool valid_loop(const std::vector<LatticePoint>& loop) {
  if (loop.size() < 4) return false;
  std::unordered_set<LatticePoint, PointHash> seen(loop.size() * 2);
  for (std::size_t j = 0; j < loop.size(); ++j) {
    if (!seen.insert(loop[j]).second) return false;
    const LatticePoint& p = loop[j];
    const LatticePoint& q = loop[(j + 1) % loop.size()];
    if (std::abs(p[0] - q[0]) + std::abs(p[1] - q[1]) != 1) return false;
  }
  return twice_area(loop) > 0;
}

/// Innermost-corner trimming, starting from a given p41 candidate on L1.
std::optional<Corners> trim_from(const std::array<std::vector<LatticePoint>, 4>& l,
                                 const std::array<PointIndex, 4>& idx, std::size_t a1) {
  auto on = [&](int j, const LatticePoint& p) { return idx[j].find(p) != idx[j].end(); };
  for (int iter = 0; iter < 64; ++iter) {
    Corners c{};
    c.a1 = a1;
    std::size_t j = a1 + 1;
    while (j < l[0].size() && !on(1, l[0][j])) ++j;
    if (j == l[0].size()) return std::nullopt;
    c.b1 = j;
    c.a2 = idx[1].at(l[0][j]);
    j = c.a2 + 1;
    while (j < l[1].size() && !on(2, l[1][j])) ++j;
    if (j == l[1].size()) return std::nullopt;
    c.b2 = j;
    c.b3 = idx[2].at(l[1][j]);
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(c.b3) - 1;
    while (k >= 0 && !on(3, l[2][k])) --k;
    if (k < 0) return std::nullopt;
    c.a3 = static_cast<std::size_t>(k);
    c.b4 = idx[3].at(l[2][k]);
    k = static_cast<std::ptrdiff_t>(c.b4) - 1;
    while (k >= 0 && !on(0, l[3][k])) --k;
    if (k < 0) return std::nullopt;
    c.a4 = static_cast<std::size_t>(k);
    const std::size_t closing = idx[0].at(l[3][k]);
    if (closing == a1) return c;
    a1 = closing;
  }
  return std::nullopt;
}

std::vector<LatticePoint> assemble(const std::array<std::vector<LatticePoint>, 4>& l, const Corners& c) {
  std::vector<LatticePoint> loop;
  for (std::size_t j = c.a1; j < c.b1; ++j) loop.push_back(l[0][j]);
  for (std::size_t j = c.a2; j < c.b2; ++j) loop.push_back(l[1][j]);
  for (std::size_t j = c.b3; j > c.a3; --j) loop.push_back(l[2][j]);
  for (std::size_t j = c.b4; j > c.a4; --j) loop.push_back(l[3][j]);
  return loop;
}

std::array<std::int64_t, 2> loop_edge_counts(const std::vector<LatticePoint>& loop) {
  std::array<std::int64_t, 2> counts{0, 0};
  for (std::size_t j = 0; j < loop.size(); ++j) {
    const LatticePoint& p = loop[j];
    const LatticePoint& q = loop[(j + 1) % loop.size()];
    ++counts[p[0] != q[0] ? 0 : 1];
  }
  return counts;
}

double slack_for(const Rect& r) { return 1e-9 * (r.width() + r.height()); }

}  // namespace

RegionRn measure_Rn_real(const ModelGeometry& geom, double n) {
  const double lam = geom.lambda();
  const double mu = geom.mu();
  const double d = geom.d();
  const double lam_n = std::pow(lam, n);
  const double d_n = std::pow(d, n);
  if (!(lam_n * d_n < kOverflowCap)) {
    throw Error(ErrorCode::Overflow, "lambda^n (lambda mu)^n exceeds the cap");
  }
  RegionRn r;
  r.n = n;
  r.rvol = (lam_n * d_n - lam_n) / std::log(d);
  r.rvol_lower_bound = lam_n * d_n / (2.0 * std::log(d));
  r.area_top = lam_n;
  r.area_bottom = lam_n * d_n;
  const double side_y = (lam_n - 1.0) / std::log(lam);
  const double side_x = lam_n * (1.0 - std::pow(mu, n)) / -std::log(mu);
  r.area_sides_x = {side_x, side_x};
  r.area_sides_y = {side_y, side_y};
  r.area_upper_bound = (1.0 + 2.0 / std::log(lam) - 2.0 / std::log(mu)) * lam_n;
  return r;
}

RegionRn measure_Rn(const ModelGeometry& geom, int n) {
  if (n < 1) throw Error(ErrorCode::PreconditionViolated, "R_n needs n >= 1");
  return measure_Rn_real(geom, n);
}

Vec2 Branch::offset(const ModelGeometry& geom) const {
  const double d = geom.d();
  return geom.b(Vec2{numerator[0] / d, numerator[1] / d});
}

Branch branch(const ModelGeometry& geom, int index) {
  if (index == 0) return {0, {0, 0}};
  if (index != 1) throw Error(ErrorCode::PreconditionViolated, "only branches 0 and 1 exist");
  // D^{-1} B e_j = B A^{-1} e_j, and d A^{-1} = adj A.
  const auto& a = geom.matrix;
  const std::int64_t d = geom.eigen.det;
  const LatticePoint col1{a.a22, -a.a21};
  const LatticePoint col2{-a.a12, a.a11};
  const bool col1_integral = col1[0] % d == 0 && col1[1] % d == 0;
  return {1, col1_integral ? col2 : col1};
}

double kappa(const ModelGeometry& geom) {
  const double lam = geom.lambda();
  const double w = geom.w;
  return std::max(std::log(1.0 + 2.0 * w / lam) / std::log(lam), std::log(1.0 + 2.0 * w) / std::log(geom.d()));
}

Rect base_rectangle(const ModelGeometry& geom, int n) {
  return {0.0, 0.0, std::pow(geom.lambda(), n), std::pow(geom.d(), n)};
}

Rect strip_box(const ModelGeometry& geom, int i, int n) {
  const double wx = std::pow(geom.lambda(), i - 1) * geom.w;
  const double wy = std::pow(geom.mu(), i - 1) * geom.w;
  const Rect base = base_rectangle(geom, n);
  return {-wx, -wy, base.x1 + wx, base.y1 + wy};
}

Rect r_prime_footprint(const ModelGeometry& geom, int n) {
  const double k = kappa(geom);
  const double x0 = -std::pow(geom.lambda(), n - 1) * geom.w;
  const double y0 = -geom.w;
  return {x0, y0, x0 + std::pow(geom.lambda(), n + k), y0 + std::pow(geom.d(), n + k)};
}

Slab build_slab(const ModelGeometry& geom, int i, int n, const Branch& br, const SlabOptions& options) {
  if (i < 1 || i > n) throw Error(ErrorCode::PreconditionViolated, "slab needs 1 <= i <= n");
  measure_Rn(geom, n);  // overflow guard

  Slab s;
  s.i = i;
  s.n = n;
  s.branch = br;
  const Rect base = base_rectangle(geom, n);
  const double wx = std::pow(geom.lambda(), i - 1) * geom.w;
  const double wy = std::pow(geom.mu(), i - 1) * geom.w;
  using lattice::Projection;
  s.strips = {{
      {Projection::X, -wy, wy, -wx, base.x1 + wx},
      {Projection::Y, base.x1, wx, -wy, base.y1 + wy},
      {Projection::X, base.y1, wy, -wx, base.x1 + wx},
      {Projection::Y, -wx, wx, -wy, base.y1 + wy},
  }};
  const Vec2 offset = br.offset(geom);
  for (int j = 0; j < 4; ++j) s.lines[j] = lattice::trace_strip_line(geom, s.strips[j], i, offset, options.trace);

  std::array<std::vector<LatticePoint>, 4> paths;
  std::array<PointIndex, 4> idx;
  for (int j = 0; j < 4; ++j) {
    paths[j] = s.lines[j].lattice;
    idx[j] = index_of(paths[j]);
  }
  // Candidates for p41, innermost (last along L1) first.
  std::vector<std::size_t> starts;
  for (std::size_t j = paths[0].size(); j-- > 0;) {
    if (idx[3].count(paths[0][j])) starts.push_back(j);
    if (starts.size() == 3) break;
  }
  std::optional<Corners> corners;
  for (std::size_t a1 : starts) {
    corners = trim_from(paths, idx, a1);
    if (corners && valid_loop(assemble(paths, *corners))) break;
    corners.reset();
  }
  if (!corners) throw Error(ErrorCode::NonSimpleLoop, "could not trim strip lines into a simple loop");
  const Corners& c = *corners;
  s.loop = assemble(paths, c);
  s.quad = {trimmed(geom, s.lines[0], c.a1, c.b1), trimmed(geom, s.lines[1], c.a2, c.b2),
            trimmed(geom, s.lines[2], c.a3, c.b3), trimmed(geom, s.lines[3], c.a4, c.b4)};

  const geometry::Mat2 frame = geom.level_frame(i);
  s.region.reserve(s.loop.size());
  for (const LatticePoint& u : s.loop) {
    s.region.push_back(offset + frame(Vec2{static_cast<double>(u[0]), static_cast<double>(u[1])}));
  }
  s.twice_lattice_area = twice_area(s.loop);
  s.euclidean_area = 0.5 * static_cast<double>(s.twice_lattice_area) * std::abs(frame.det());
  s.edge_counts = loop_edge_counts(s.loop);
  s.w_in = strip_box(geom, i, n);
  s.contains_rect = polygon::ring_contains_rect(s.region, base);
  s.inside_w_in = polygon::rect_contains_ring(s.w_in, s.region, slack_for(s.w_in));
  return s;
}

bool Stack::containment_holds() const {
  return std::all_of(rn_inside.begin(), rn_inside.end(), [](bool b) { return b; }) &&
         std::all_of(inside_r_prime.begin(), inside_r_prime.end(), [](bool b) { return b; }) &&
         std::all_of(slabs.begin(), slabs.end(), [](const Slab& s) { return s.inside_w_in; });
}

double monte_carlo_symmetric_difference(const Ring& a, const Ring& b, std::size_t samples, std::uint64_t seed) {
  const Rect ba = polygon::bounding_box(a);
  const Rect bb = polygon::bounding_box(b);
  const Rect box{std::min(ba.x0, bb.x0), std::min(ba.y0, bb.y0), std::max(ba.x1, bb.x1), std::max(ba.y1, bb.y1)};
  const polygon::RingIndex ia(a);
  const polygon::RingIndex ib(b);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.x0, box.x1);
  std::uniform_real_distribution<double> uy(box.y0, box.y1);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec2 p{ux(rng), uy(rng)};
    if (ia.contains(p) != ib.contains(p)) ++hits;
  }
  return box.area() * static_cast<double>(hits) / static_cast<double>(samples);
}

BoundaryMeasurement measure_boundary(const ModelGeometry& geom, const Stack& stack, const MeasureOptions& options) {
  const int n = stack.n;
  const auto metric = geom.metric();
  const double lam = geom.lambda();
  const double mu = geom.mu();
  const double w = geom.w;
  const double det_b = std::abs(geom.b.det());
  const Rect base = base_rectangle(geom, n);

  BoundaryMeasurement m;
  m.bottom = base.area();
  m.top = metric.horizontal_area(stack.slabs.back().euclidean_area, n);

  // Each loop edge at level i is D^{i-1} gamma_j over [i - 1, i].
  m.vertical_by_level.resize(n);
  for (int i = 1; i <= n; ++i) {
    const Slab& s = stack.slabs[i - 1];
    double v = 0.0;
    for (int j = 0; j < 2; ++j) {
      const Vec2 e = geom.d_power(i - 1)(j == 0 ? geom.gamma1 : geom.gamma2);
      v += static_cast<double>(s.edge_counts[j]) * metric.lateral_area(e.x, e.y, i - 1, i);
    }
    m.vertical_by_level[i - 1] = v;
    m.vertical += v;
  }

  m.levels.resize(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t hs) {
    const int h = static_cast<int>(hs);
    HorizontalLevel& lv = m.levels[hs];
    lv.height = h;
    double euclid = 0.0;
    if (h == 0) {
      euclid = stack.slabs[0].euclidean_area - base.area();
    } else {
      // Level-h lattice frame: D_{h+1} vertices are A u.
      const Ring lower = integer_ring(stack.slabs[h - 1].loop, kIdentity, 1, {0, 0});
      const Ring upper = integer_ring(stack.slabs[h].loop, geom.matrix, 1, {0, 0});
      const double lattice_units = symmetric_difference(lower, upper, options, lv.estimated);
      euclid = lattice_units * det_b * std::pow(geom.d(), h - 1);
    }
    lv.exact = metric.horizontal_area(euclid, h);
    lv.annulus_bound = metric.horizontal_area(strip_box(geom, h + 1, n).area() - base.area(), h);
    lv.paper_annulus = (std::pow(lam, n - h) + 2.0 * w / lam) * (std::pow(lam, n) * std::pow(mu, n - h) + 2.0 * w / mu) -
                       std::pow(lam, n - h) * std::pow(lam, n) * std::pow(mu, n - h);
  });
  for (const HorizontalLevel& lv : m.levels) {
    m.horizontal += lv.exact;
    m.estimated = m.estimated || lv.estimated;
  }
  m.total_upper = m.top + m.vertical + m.horizontal;
  return m;
}

Stack build_stack(const ModelGeometry& geom, int n, const Branch& br, const SlabOptions& slab,
                  const MeasureOptions& measure) {
  if (n < 1) throw Error(ErrorCode::PreconditionViolated, "stack needs n >= 1");
  measure_Rn(geom, n);
  Stack st;
  st.n = n;
  st.branch = br;
  st.kappa = kappa(geom);
  st.r_prime = r_prime_footprint(geom, n);
  st.slabs.resize(n);
  parallel_for(static_cast<std::size_t>(n),
               [&](std::size_t j) { st.slabs[j] = build_slab(geom, static_cast<int>(j) + 1, n, br, slab); });
  const auto metric = geom.metric();
  for (const Slab& s : st.slabs) {
    st.rn_inside.push_back(s.contains_rect);
    st.inside_r_prime.push_back(polygon::rect_contains_ring(st.r_prime, s.region, slack_for(st.r_prime)));
    st.rvol += s.euclidean_area * metric.volume_weight(s.i - 1, s.i);
  }
  st.boundary = measure_boundary(geom, st, measure);
  return st;
}

Ball build_ball(const ModelGeometry& geom, int n, const SlabOptions& slab, const MeasureOptions& measure) {
  Ball b;
  b.n = n;
  b.stack0 = build_stack(geom, n, branch(geom, 0), slab, measure);
  b.stack1 = build_stack(geom, n, branch(geom, 1), slab, measure);

  // Both bottoms in the level-1 frame scaled by d, where the branch offset is integral.
  const std::int64_t d = geom.eigen.det;
  const Ring r0 = integer_ring(b.stack0.slabs[0].loop, kIdentity, d, b.stack0.branch.numerator);
  const Ring r1 = integer_ring(b.stack1.slabs[0].loop, kIdentity, d, b.stack1.branch.numerator);
  const double to_euclid = std::abs(geom.b.det()) / static_cast<double>(d * d);
  const double a0 = 0.5 * static_cast<double>(b.stack0.slabs[0].twice_lattice_area) * static_cast<double>(d * d);
  const double a1 = 0.5 * static_cast<double>(b.stack1.slabs[0].twice_lattice_area) * static_cast<double>(d * d);
  double inter = 0.0;
  if (measure.force_monte_carlo) {
    inter = 0.5 * (a0 + a1 - monte_carlo_symmetric_difference(r0, r1, measure.monte_carlo_samples, measure.seed));
  } else {
    try {
      inter = polygon::intersection_area(r0, r1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PolygonOpFailed) throw;
      inter = 0.5 * (a0 + a1 - monte_carlo_symmetric_difference(r0, r1, measure.monte_carlo_samples, measure.seed));
    }
  }
  b.fold_area = inter * to_euclid;
  b.bottom_difference = (a0 + a1 - 2.0 * inter) * to_euclid;

  b.boundary_area = b.bottom_difference;
  for (const Stack* s : {&b.stack0, &b.stack1}) {
    const BoundaryMeasurement& m = s->boundary;
    b.boundary_area += m.top + m.vertical + (m.horizontal - m.levels[0].exact);
  }
  b.x_lo = b.boundary_area / geom.cells.c_cell;
  b.x_hi = b.boundary_area / geom.cells.a;
  b.y_n = b.stack0.rvol + b.stack1.rvol;
  return b;
}

std::string stack_svg(const ModelGeometry& geom, const Stack& stack) {
  const Rect view = stack.r_prime;
  constexpr double kWidth = 900.0;
  constexpr double kHeight = 600.0;
  // Each axis is scaled independently: the region is far wider than tall.
  auto px = [&](Vec2 p) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(2);
    o << (p.x - view.x0) / view.width() * kWidth << ',' << (view.y1 - p.y) / view.height() * kHeight;
    return o.str();
  };
  auto rect_points = [&](const Rect& r) {
    std::string s;
    for (const Vec2& p : r.ring()) s += px(p) + ' ';
    return s;
  };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\">\n"
      << "<polygon id=\"r-prime\" fill=\"none\" stroke=\"#000000\" stroke-dasharray=\"4,3\" points=\""
      << rect_points(view) << "\"/>\n";
  for (const Slab& s : stack.slabs) {
    // Drawing only: long loops are thinned to at most ~20000 points.
    const std::size_t stride = std::max<std::size_t>(1, s.region.size() / 20000);
    svg << "<polygon id=\"level-" << s.i << "\" fill=\"none\" stroke=\"" << colors[(s.i - 1) % 10]
        << "\" stroke-width=\"1\" points=\"";
    for (std::size_t j = 0; j < s.region.size(); j += stride) svg << px(s.region[j]) << ' ';
    svg << "\"/>\n";
  }
  svg << "<polygon id=\"base\" fill=\"#cccccc\" fill-opacity=\"0.5\" stroke=\"#000000\" points=\""
      << rect_points(base_rectangle(geom, stack.n)) << "\"/>\n"
      << "</svg>\n";
  return svg.str();
}

}  // namespace isospec::regions
