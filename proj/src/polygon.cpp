#include "isospec/polygon.hpp"

#include <algorithm>
#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "isospec/error.hpp"

namespace isospec::polygon {

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/false>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

BgPolygon to_bg(std::span<const Vec2> ring) {
  BgPolygon p;
  p.outer().reserve(ring.size());
  for (const Vec2& v : ring) p.outer().emplace_back(v.x, v.y);
  bg::correct(p);
  return p;
}

}  // namespace

double signed_area(std::span<const Vec2> ring) {
  double twice = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(ring[i], ring[(i + 1) % n]);
  return 0.5 * twice;
}

Rect bounding_box(std::span<const Vec2> ring) {
  Rect r{ring.front().x, ring.front().y, ring.front().x, ring.front().y};
  for (const Vec2& v : ring) {
    r.x0 = std::min(r.x0, v.x);
    r.y0 = std::min(r.y0, v.y);
    r.x1 = std::max(r.x1, v.x);
    r.y1 = std::max(r.y1, v.y);
  }
  return r;
}

Ring simplify_collinear(std::span<const Vec2> ring) {
  Ring out;
  out.reserve(ring.size());
  for (const Vec2& v : ring) {
    if (out.empty() || !(out.back() == v)) out.push_back(v);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  bool changed = true;
  while (changed && out.size() > 3) {
    changed = false;
    Ring next;
    next.reserve(out.size());
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = out[(i + n - 1) % n];
      const Vec2 cur = out[i];
      const Vec2 nxt = out[(i + 1) % n];
      const double scale = (cur - prev).norm() * (nxt - cur).norm();
      const double dot = (cur.x - prev.x) * (nxt.x - cur.x) + (cur.y - prev.y) * (nxt.y - cur.y);
      if (std::abs(orient(prev, cur, nxt)) <= 1e-14 * scale && dot > 0.0) {
        changed = true;
        continue;
      }
      next.push_back(cur);
    }
    out.swap(next);
  }
  return out;
}

bool point_in_ring(std::span<const Vec2> ring, Vec2 p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = ring[i];
    const Vec2 b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

RingIndex::RingIndex(std::span<const Vec2> ring, std::size_t bands)
    : ring_(ring.begin(), ring.end()), bbox_(bounding_box(ring)) {
  if (bands == 0) bands = std::max<std::size_t>(1, ring_.size() / 4);
  band_height_ = bbox_.height() / static_cast<double>(bands);
  if (!(band_height_ > 0.0)) band_height_ = 1.0;
  bands_.resize(bands);
  const std::size_t n = ring_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = ring_[i];
    const Vec2 b = ring_[(i + 1) % n];
    const double lo = std::min(a.y, b.y);
    const double hi = std::max(a.y, b.y);
    auto band_of = [&](double y) {
      const auto k = static_cast<std::ptrdiff_t>(std::floor((y - bbox_.y0) / band_height_));
      return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bands) - 1));
    };
    for (std::size_t k = band_of(lo); k <= band_of(hi); ++k) bands_[k].push_back(i);
  }
}

bool RingIndex::contains(Vec2 p) const {
  if (!bbox_.contains(p)) return false;
  const auto k = static_cast<std::ptrdiff_t>(std::floor((p.y - bbox_.y0) / band_height_));
  const auto band = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bands_.size()) - 1));
  bool inside = false;
  const std::size_t n = ring_.size();
  for (std::size_t i : bands_[band]) {
    const Vec2 a = ring_[i];
    const Vec2 b = ring_[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

bool segment_meets_open_rect(Vec2 p, Vec2 q, const Rect& r) {
  // Liang-Barsky against the closed rectangle, then test the clipped midpoint.
  double t0 = 0.0;
  double t1 = 1.0;
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  const double pk[4] = {-dx, dx, -dy, dy};
  const double qk[4] = {p.x - r.x0, r.x1 - p.x, p.y - r.y0, r.y1 - p.y};
  for (int k = 0; k < 4; ++k) {
    if (pk[k] == 0.0) {
      if (qk[k] < 0.0) return false;
      continue;
    }
    const double t = qk[k] / pk[k];
    if (pk[k] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
    if (t0 > t1) return false;
  }
  const double tm = 0.5 * (t0 + t1);
  const Vec2 m{p.x + tm * dx, p.y + tm * dy};
  return m.x > r.x0 && m.x < r.x1 && m.y > r.y0 && m.y < r.y1;
}

bool ring_contains_rect(std::span<const Vec2> ring, const Rect& r) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (segment_meets_open_rect(ring[i], ring[(i + 1) % n], r)) return false;
  }
  return point_in_ring(ring, {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)});
}

bool rect_contains_ring(const Rect& r, std::span<const Vec2> ring, double slack) {
  const Rect grown{r.x0 - slack, r.y0 - slack, r.x1 + slack, r.y1 + slack};
  return std::all_of(ring.begin(), ring.end(), [&](const Vec2& v) { return grown.contains(v); });
}

double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b) {
  const double area_a = std::abs(signed_area(a));
  const double area_b = std::abs(signed_area(b));
  double area = 0.0;
  try {
    const BgPolygon pa = to_bg(a);
    const BgPolygon pb = to_bg(b);
    BgMulti out;
    bg::intersection(pa, pb, out);
    area = bg::area(out);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::PolygonOpFailed, std::string("polygon intersection threw: ") + e.what());
  }
  const double tol = 1e-9 * std::max(area_a, area_b);
  if (!std::isfinite(area) || area < -tol || area > std::min(area_a, area_b) + tol) {
    throw Error(ErrorCode::PolygonOpFailed, "polygon intersection area out of range");
  }
  return area;
}

double symmetric_difference_area(std::span<const Vec2> a, std::span<const Vec2> b) {
  const double inter = intersection_area(a, b);
  return std::abs(signed_area(a)) + std::abs(signed_area(b)) - 2.0 * inter;
}

}  // namespace isospec::polygon
