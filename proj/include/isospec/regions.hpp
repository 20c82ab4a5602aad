#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "isospec/geometry.hpp"
#include "isospec/lattice.hpp"
#include "isospec/polygon.hpp"

namespace isospec::regions {

using geometry::ModelGeometry;
using geometry::Vec2;
using lattice::LatticePoint;
using polygon::Rect;
using polygon::Ring;

/// The box [0, lambda^n] x [0, (lambda mu)^n] x [0, n] and its faces.
struct RegionRn {
  double n = 0.0;
  double rvol = 0.0;
  double rvol_lower_bound = 0.0;    // (lambda^n)^alpha / (2 ln d)
  double area_top = 0.0;
  std::array<double, 2> area_sides_x{};  // faces x = 0 and x = lambda^n
  std::array<double, 2> area_sides_y{};  // faces y = 0 and y = (lambda mu)^n
  double area_bottom = 0.0;
  double area_upper_bound = 0.0;    // (1 + 2/ln lambda - 2/ln mu) lambda^n

  /// Everything but the bottom face.
  double upper_faces() const {
    return area_top + area_sides_x[0] + area_sides_x[1] + area_sides_y[0] + area_sides_y[1];
  }
};

/// Closed forms for R_n. Throws PreconditionViolated for n < 1, Overflow when
/// lambda^n (lambda mu)^n reaches 1e300.
RegionRn measure_Rn(const ModelGeometry& geom, int n);

/// Same closed forms at a real height (used for R'_{n + kappa}); no n >= 1 check.
RegionRn measure_Rn_real(const ModelGeometry& geom, double n);

/// The stack's horizontal translate of the lattice: offset = B (numerator / d).
struct Branch {
  int index = 0;
  LatticePoint numerator{0, 0};

  Vec2 offset(const ModelGeometry& geom) const;
};

/// Branch 0 is the trivial coset; branch 1 is the class of D^{-1} gamma1 (or
/// D^{-1} gamma2 when that one is already in the lattice).
Branch branch(const ModelGeometry& geom, int index);

struct Slab {
  int i = 0;
  int n = 0;
  Branch branch;
  std::array<lattice::Strip, 4> strips;     // bottom, right, top, left
  std::array<lattice::TracedLine, 4> lines; // untrimmed
  std::array<lattice::TracedLine, 4> quad;  // trimmed to the loop
  std::vector<LatticePoint> loop;           // counterclockwise, level-i lattice
  Ring region;                              // D_i in the plane
  std::int64_t twice_lattice_area = 0;
  double euclidean_area = 0.0;
  Rect w_in;
  std::array<std::int64_t, 2> edge_counts{};  // loop edges along gamma1, gamma2
  bool contains_rect = false;
  bool inside_w_in = false;
};

struct SlabOptions {
  lattice::TraceOptions trace;
};

/// Traces the four strips around [0, lambda^n] x [0, (lambda mu)^n] at level i,
/// trims them to a simple loop and checks containment.
/// Throws PreconditionViolated unless 1 <= i <= n; TraceFailed and
/// NonSimpleLoop propagate.
Slab build_slab(const ModelGeometry& geom, int i, int n, const Branch& branch = {},
                const SlabOptions& options = {});

struct HorizontalLevel {
  int height = 0;
  double exact = 0.0;          // Riemannian area of D_h sym-diff D_{h+1} (D_0 = the base)
  double annulus_bound = 0.0;  // area of W_{h+1,n} minus the base, at height h
  double paper_annulus = 0.0;  // the closed form with W_{h,n}
  bool estimated = false;      // Monte Carlo fallback was used
};

struct BoundaryMeasurement {
  double top = 0.0;
  double vertical = 0.0;
  double horizontal = 0.0;
  double total_upper = 0.0;
  double bottom = 0.0;  // the excluded base rectangle
  double fold = 0.0;
  std::vector<HorizontalLevel> levels;
  std::vector<double> vertical_by_level;
  bool estimated = false;
};

struct MeasureOptions {
  std::size_t monte_carlo_samples = 1'000'000;
  std::uint64_t seed = 0;
  bool force_monte_carlo = false;
};

struct Stack {
  int n = 0;
  Branch branch;
  std::vector<Slab> slabs;
  double kappa = 0.0;
  Rect r_prime;  // footprint of R'_{n + kappa}
  std::vector<bool> rn_inside;      // base rectangle inside D_i, per level
  std::vector<bool> inside_r_prime; // D_i inside the footprint of R'_{n + kappa}
  BoundaryMeasurement boundary;
  double rvol = 0.0;

  bool containment_holds() const;
};

double kappa(const ModelGeometry& geom);
Rect base_rectangle(const ModelGeometry& geom, int n);
Rect strip_box(const ModelGeometry& geom, int i, int n);  // W_{i,n}
Rect r_prime_footprint(const ModelGeometry& geom, int n);

/// Slabs i = 1..n, measured. Throws Overflow past the closed-form cap.
Stack build_stack(const ModelGeometry& geom, int n, const Branch& branch = {}, const SlabOptions& slab = {},
                  const MeasureOptions& measure = {});

BoundaryMeasurement measure_boundary(const ModelGeometry& geom, const Stack& stack,
                                     const MeasureOptions& options = {});

/// Area of the symmetric difference of two simple rings by uniform sampling of
/// their joint bounding box.
double monte_carlo_symmetric_difference(const Ring& a, const Ring& b, std::size_t samples, std::uint64_t seed);

struct Ball {
  int n = 0;
  Stack stack0;
  Stack stack1;
  double fold_area = 0.0;          // area of D^0_1 cap D^1_1 at height 0
  double bottom_difference = 0.0;  // area of D^0_1 sym-diff D^1_1 at height 0
  double boundary_area = 0.0;      // RArea of the boundary of B_n
  double x_lo = 0.0;
  double x_hi = 0.0;
  double y_n = 0.0;
};

Ball build_ball(const ModelGeometry& geom, int n, const SlabOptions& slab = {}, const MeasureOptions& measure = {});

/// Cross-section drawing: base rectangle, D_1..D_n, and R'_{n + kappa}.
std::string stack_svg(const ModelGeometry& geom, const Stack& stack);

}  // namespace isospec::regions
