#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isospec/geometry.hpp"
#include "isospec/polygon.hpp"

namespace isospec::lattice {

using geometry::Mat2;
using geometry::ModelGeometry;
using geometry::Vec2;

/// Integer coordinates u of the vertex offset + D^{level-1} B u.
using LatticePoint = std::array<std::int64_t, 2>;

/// Which coordinate a strip projects onto. Projection::X strips are
/// R x [lo, lo + width]; their fibers are vertical segments.
enum class Projection { X, Y };

struct Strip {
  Projection projection = Projection::X;
  double lo = 0.0;     // transverse interval [lo, lo + width]
  double width = 0.0;
  double span_lo = 0.0;  // the traced line must reach both ends of
  double span_hi = 0.0;  // [span_lo, span_hi] along the projection axis

  double hi() const { return lo + width; }
  friend bool operator==(const Strip&, const Strip&) = default;
};

struct Segment {
  Vec2 a;
  Vec2 b;
  LatticePoint from;
  int direction = 0;  // 0: along gamma1, 1: along gamma2
};

/// Lambda_level: the edges of the translates offset + D^{level-1}(gamma + Q).
class Arrangement {
 public:
  Arrangement(const ModelGeometry& geom, int level, Vec2 offset, polygon::Rect window);

  int level() const { return level_; }
  Vec2 offset() const { return offset_; }
  const Mat2& frame() const { return frame_; }
  const polygon::Rect& window() const { return window_; }
  Vec2 generator(int j) const { return frame_.col(j); }
  Vec2 vertex(LatticePoint u) const;

  /// Every full edge whose bounding box meets the window.
  std::vector<Segment> materialize() const;

 private:
  int level_;
  Vec2 offset_;
  Mat2 frame_;
  polygon::Rect window_;
};

/// Largest number of points an axis-parallel segment of length w shares
/// with Lambda_1, from a phase sweep over the two line families.
int backtracking_constant(const ModelGeometry& geom);

/// Same, for segments parallel to one axis only (fibers of that projection).
int backtracking_constant(const ModelGeometry& geom, Projection fibers_of);

struct TracedLine {
  int level = 1;
  Vec2 offset;
  Strip strip;
  std::vector<LatticePoint> lattice;
  std::vector<Vec2> polyline;
  int multiplicity_certificate = 0;
  double margin = 0.0;  // window margin (level-1 units) that succeeded
  int retries = 0;

  /// Edges along gamma1 and gamma2 respectively.
  std::array<std::int64_t, 2> edge_counts() const;
};

struct TraceOptions {
  double margin_factor = 10.0;  // window margin in units of w
  int max_retries = 4;          // margin doublings on failure
  std::size_t node_budget = 50'000'000;
};

/// Shortest lattice path inside the strip whose projection runs from
/// <= span_lo to >= span_hi. Traced in the level-1 preimage of the strip and
/// mapped forward. Throws TraceFailed, CertificateExceeded, Overflow.
TracedLine trace_strip_line(const ModelGeometry& geom, const Strip& strip, int level, Vec2 offset = {},
                            const TraceOptions& options = {});

/// Maximum number of points of the polyline on one fiber of the projection.
int projection_multiplicity(std::span<const Vec2> polyline, Projection projection);

/// Arrangement edges plus traced lines, for debugging.
std::string arrangement_svg(const Arrangement& arrangement, std::span<const TracedLine> lines);

}  // namespace isospec::lattice
