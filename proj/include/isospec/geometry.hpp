#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "isospec/exponents.hpp"

namespace isospec::geometry {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  double norm() const { return std::hypot(x, y); }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct Mat2 {
  double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

  double det() const { return m11 * m22 - m12 * m21; }
  Mat2 inverse() const {
    const double k = 1.0 / det();
    return {m22 * k, -m12 * k, -m21 * k, m11 * k};
  }
  Vec2 operator()(Vec2 v) const { return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y}; }
  Vec2 col(int j) const { return j == 0 ? Vec2{m11, m21} : Vec2{m12, m22}; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
  }
  static Mat2 diag(double a, double b) { return {a, 0.0, 0.0, b}; }
  static Mat2 from(const exponents::IntMatrix2& a) {
    return {static_cast<double>(a.a11), static_cast<double>(a.a12), static_cast<double>(a.a21),
            static_cast<double>(a.a22)};
  }
};

/// Stateless evaluator of the metric ds^2 = lambda^{-2z} dx^2 + mu^{-2z} dy^2 + dz^2.
class MetricFunctionals {
 public:
  MetricFunctionals(double lambda, double mu)
      : lambda_(lambda), mu_(mu), ln_lambda_(std::log(lambda)), ln_mu_(std::log(mu)) {}

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

  /// Riemannian area of a horizontal region of the given Euclidean area at height z.
  double horizontal_area(double euclidean_area, double z) const;

  /// Area of the vertical face swept by the segment (dx, dy) between heights
  /// z0 < z1, by adaptive Simpson to absolute tolerance 1e-9.
  double lateral_area(double dx, double dy, double z0, double z1) const;

  /// integral_{z0}^{z1} (lambda mu)^{-z} dz.
  double volume_weight(double z0, double z1) const;

 private:
  double lambda_;
  double mu_;
  double ln_lambda_;
  double ln_mu_;
};

struct CellAreaExtrema {
  double a = 0.0;       // smallest Riemannian area of a 2-cell
  double c_cell = 0.0;  // largest Riemannian area of a 2-cell
  double jacobian = 0.0;
  /// Riemannian areas (height 1) of the overlay pieces inside one D(Q) translate.
  std::vector<double> pieces_in_dq;
  /// Riemannian areas (height 1) of the overlay pieces inside one Q translate.
  std::vector<double> pieces_in_q;
  /// Level-1 side faces over the two edge vectors of Q.
  std::array<double, 2> vertical{};
};

struct ModelGeometry {
  exponents::IntMatrix2 matrix;
  exponents::EigenPair eigen;
  Mat2 b;      // B with B A B^{-1} = diag(lambda, mu), det B = 1
  Mat2 b_inv;  // columns are eigenvectors of A
  Vec2 gamma1;
  Vec2 gamma2;
  std::array<Vec2, 4> q;  // 0, gamma1, gamma1 + gamma2, gamma2
  double w = 0.0;
  double cell_volume = 0.0;
  CellAreaExtrema cells;

  double lambda() const { return eigen.lambda_value; }
  double mu() const { return eigen.mu_value; }
  double d() const { return static_cast<double>(eigen.det); }
  MetricFunctionals metric() const { return {lambda(), mu()}; }
  /// D^k = diag(lambda^k, mu^k).
  Mat2 d_power(int k) const { return Mat2::diag(std::pow(lambda(), k), std::pow(mu(), k)); }
  /// Maps lattice coordinates of the level-`level` grid to the plane.
  Mat2 level_frame(int level) const { return d_power(level - 1) * b; }
};

/// Diagonalizes A, builds the lattice, parallelogram, diameter, cell volume and
/// 2-cell area extrema. Errors from eigen_data propagate.
ModelGeometry build_geometry(const exponents::IntMatrix2& a);

/// Overlay of the Q-tiling with the D(Q)-tiling at one interface, side faces,
/// and the projection Jacobian lower bound. Throws DegenerateOverlay.
CellAreaExtrema cell_area_extrema(const ModelGeometry& geom);

/// Closed form (1 - 1/d) / ln d times the Euclidean area of Q.
double closed_form_cell_volume(const ModelGeometry& geom);

}  // namespace isospec::geometry
