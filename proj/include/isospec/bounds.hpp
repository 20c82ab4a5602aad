#pragma once

#include <string>
#include <vector>

#include "isospec/regions.hpp"

namespace isospec::bounds {

using geometry::ModelGeometry;

struct Tolerances {
  double closed_form = 1e-10;  // relative slack for closed-form inequalities
  double pipeline = 1e-6;      // relative slack for traced/measured inequalities
  double slope = 0.1;          // |fitted slope - alpha|

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

/// One inequality lhs <= rhs. Lower bounds are stored flipped.
struct Verdict {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

Verdict make_verdict(std::string name, double lhs, double rhs, double tolerance);

/// Throws VerdictFailure for the first failing verdict.
void enforce(const std::vector<Verdict>& verdicts);

struct BoundConstants {
  double kappa = 0.0;
  double C_lemma = 0.0;  // max(d^kappa, k / J)
  double D_lemma = 0.0;  // 2w(1/lambda + lambda/(mu(lambda - 1))) + 4w^2/ln lambda
  double E_const = 0.0;  // filled by certify_exponent
  double K_const = 0.0;  // filled by certify_exponent
  double upper_coeff_embedded = 0.0;  // (2 lambda (mu + 1) + 1) / ln d
  double upper_coeff_general = 0.0;   // (1 + lambda (mu + 1)) / ln d
  double delta2_coeff = 0.0;          // upper_coeff_general / cellV * C_cell^alpha
  /// x_n^upper <= ratio_numerator * lambda^n, with
  /// ratio_numerator = (2/a)(C lambda^kappa (1 + 2/ln lambda - 2/ln mu) + D).
  double ratio_numerator = 0.0;

  friend bool operator==(const BoundConstants&, const BoundConstants&) = default;
};

/// Everything that depends on the geometry alone (E and K are left at 0).
BoundConstants geometric_constants(const ModelGeometry& geom);

// Each evaluate_* returns the verdicts; each check_* enforces them.

/// top + vertical <= C * area(upper faces of R'_{n+kappa}); horizontal <= D lambda^n;
/// horizontal <= sum of the per-level annulus bounds, in both forms.
std::vector<Verdict> evaluate_slab_lemmas(const ModelGeometry& geom, const regions::Stack& stack,
                                          const Tolerances& tol = {});
void check_slab_lemmas(const ModelGeometry& geom, const regions::Stack& stack, const Tolerances& tol = {});

/// y_n <= (RArea(boundary) + 2 fold) / ln d.
std::vector<Verdict> evaluate_foldbound(const ModelGeometry& geom, const regions::Ball& ball,
                                        const Tolerances& tol = {});
void check_foldbound(const ModelGeometry& geom, const regions::Ball& ball, const Tolerances& tol = {});

/// Single stack, empty fold set: rvol <= full boundary area / ln d.
std::vector<Verdict> evaluate_foldbound(const ModelGeometry& geom, const regions::Stack& stack,
                                        const Tolerances& tol = {});
void check_foldbound(const ModelGeometry& geom, const regions::Stack& stack, const Tolerances& tol = {});

/// y_n <= upper_coeff_embedded * RArea(boundary)^alpha.
std::vector<Verdict> evaluate_embedded_upper(const ModelGeometry& geom, const regions::Ball& ball,
                                             const Tolerances& tol = {});
void check_embedded_upper(const ModelGeometry& geom, const regions::Ball& ball, const Tolerances& tol = {});

/// Closed-form volume lower bound and upper-face area bound for R_n.
std::vector<Verdict> evaluate_region_inequalities(const ModelGeometry& geom, const regions::RegionRn& r,
                                                  const Tolerances& tol = {});
std::vector<Verdict> evaluate_region_inequalities(const ModelGeometry& geom, int n, const Tolerances& tol = {});
void check_region_inequalities(const ModelGeometry& geom, int n, const Tolerances& tol = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square

  friend bool operator==(const LinearFit&, const LinearFit&) = default;
};

/// Least squares y = slope x + intercept. Throws RegressionIllConditioned
/// below three points or for constant x.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// log RVol(R_n) against log of the upper-face bound, no tracing.
LinearFit closed_form_regression(const ModelGeometry& geom, int n_min, int n_max);

struct ReportRow {
  int n = 0;
  double y_n = 0.0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double boundary_area = 0.0;
  double fold_area = 0.0;
  bool estimated = false;
  std::vector<Verdict> verdicts;

  bool pass() const;
  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct CertifiedReport {
  exponents::IntMatrix2 matrix;
  std::int64_t trace = 0;
  std::int64_t det = 0;
  double lambda = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
  // Geometry summary.
  double w = 0.0;
  int k = 0;
  double cell_volume = 0.0;
  double a = 0.0;
  double c_cell = 0.0;
  double jacobian = 0.0;
  BoundConstants constants;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  int n_min = 0;
  int n_max = 0;
  std::vector<ReportRow> rows;
  LinearFit fit;     // log y_n against log of the geometric midpoint of x_n
  LinearFit fit_lo;  // against log x_lo
  LinearFit fit_hi;  // against log x_hi
  double max_ratio = 0.0;    // max x_hi(n) / x_hi(n - 1)
  double ratio_bound = 0.0;  // ratio_numerator * lambda / K
  std::vector<Verdict> summary;  // slope, ratio, constant positivity
  bool pass = false;

  friend bool operator==(const CertifiedReport&, const CertifiedReport&) = default;
};

struct CertifyOptions {
  Tolerances tolerances;
  regions::SlabOptions slab;
  regions::MeasureOptions measure;
};

/// Builds B_n for n in [n_min, n_max], checks every inequality per n, fits the
/// slope and derives E, K and the ratio bound. Throws RegressionIllConditioned
/// for fewer than three heights.
CertifiedReport certify_exponent(const ModelGeometry& geom, int n_min, int n_max, const CertifyOptions& options = {});

/// The report for already-built balls (ordered by n).
CertifiedReport certify_balls(const ModelGeometry& geom, const std::vector<regions::Ball>& balls,
                              const CertifyOptions& options = {});

}  // namespace isospec::bounds
