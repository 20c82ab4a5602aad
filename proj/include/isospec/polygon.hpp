#pragma once

#include <span>
#include <vector>

#include "isospec/geometry.hpp"

namespace isospec::polygon {

using geometry::Vec2;
using Ring = std::vector<Vec2>;

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  Ring ring() const { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

double signed_area(std::span<const Vec2> ring);
Rect bounding_box(std::span<const Vec2> ring);

/// Drops consecutive duplicates and interior vertices of straight runs.
Ring simplify_collinear(std::span<const Vec2> ring);

/// Even-odd point location; points on the boundary may land either way.
bool point_in_ring(std::span<const Vec2> ring, Vec2 p);

/// Point location accelerated by bucketing edges into horizontal bands.
class RingIndex {
 public:
  explicit RingIndex(std::span<const Vec2> ring, std::size_t bands = 0);
  bool contains(Vec2 p) const;
  const Rect& bbox() const { return bbox_; }

 private:
  std::vector<Vec2> ring_;
  Rect bbox_;
  double band_height_ = 1.0;
  std::vector<std::vector<std::size_t>> bands_;
};

/// True iff the closed segments [p1, p2] and [q1, q2] share a point.
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

/// True iff the closed segment [p, q] meets the open interior of `r`.
bool segment_meets_open_rect(Vec2 p, Vec2 q, const Rect& r);

/// rect subset of the closed region bounded by the simple ring: no edge enters
/// the open rectangle and the rectangle's centre is inside.
bool ring_contains_rect(std::span<const Vec2> ring, const Rect& r);

/// Every vertex of the ring lies in the closed rectangle (the rectangle is
/// convex, so the enclosed region does too).
bool rect_contains_ring(const Rect& r, std::span<const Vec2> ring, double slack = 0.0);

/// Area of the intersection of the regions bounded by two simple rings.
/// Throws Error{PolygonOpFailed} when the overlay fails or is inconsistent.
double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b);

/// area(a) + area(b) - 2 area(a cap b).
double symmetric_difference_area(std::span<const Vec2> a, std::span<const Vec2> b);

}  // namespace isospec::polygon
