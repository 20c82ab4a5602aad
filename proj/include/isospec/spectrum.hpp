#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isospec/rational.hpp"

namespace isospec::spectrum {

/// Exponent of the (i + 2)-dimensional filling function of the i-fold
/// suspension of the companion matrix A(t, d).
struct SpectrumPoint {
  int k = 2;  // dimension, k = i + 2
  double exponent = 0.0;
  std::int64_t t = 0;
  std::int64_t d = 0;
  int i = 0;

  friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

/// Every (t, d) with t_min <= t <= t_max and 2 <= d <= t - 2, at suspension
/// levels 0..i_max, ordered by (t, d, i). Equal exponents from different
/// sources are all kept. Throws PreconditionViolated unless
/// 4 <= t_min <= t_max and i_max >= 0.
std::vector<SpectrumPoint> enumerate_exponents(std::int64_t t_max, int i_max, std::int64_t t_min = 5);

/// (t, d) pairs where d -> exponent fails to increase strictly at fixed t and i.
std::vector<std::pair<std::int64_t, std::int64_t>> monotonicity_violations(std::span<const SpectrumPoint> points);

struct DensityReport {
  std::int64_t t = 0;
  double epsilon = 0.0;
  std::vector<double> values;  // log_t d for d = 2..t-4, increasing
  double left_gap = 0.0;       // distance from 0 to the first value
  double right_gap = 0.0;      // distance from the last value to 1
  double max_gap = 0.0;        // largest gap between consecutive values
  double covering_radius = 0.0;  // sup over (0,1) of the distance to the set
  double threshold = 0.0;        // e^{2/epsilon}
  bool threshold_met = false;    // t > threshold
  bool eps_dense = false;        // covering_radius <= epsilon
  bool pointwise_bound_holds = false;  // each step d -> d+1 is <= 1/(d ln t)
};

/// Throws PreconditionViolated for t < 6 or epsilon <= 0, and VerdictFail
/// if t clears the threshold but the set is not epsilon-dense.
DensityReport density_check(std::int64_t t, double epsilon);

struct FigureRow {
  int k = 2;
  Rational suspension_endpoint;  // k/(k-1): supremum of the exponents at this k (alpha -> 2)
  Rational euclidean_endpoint;   // 1 + 1/k, start of the previously known dense range
  std::string euclidean_source = "external claim";
  std::vector<SpectrumPoint> samples;  // lowest t first
};

struct FigureData {
  std::vector<FigureRow> rows;
};

/// Rows k = 2..k_max with up to `samples` points each. Throws
/// PreconditionViolated for k_max < 2.
FigureData spectra_figure_data(int k_max, std::size_t samples);

/// Number-line drawing of the rows. Throws EmptyDataset without rows.
std::string figure_svg(const FigureData& data);

/// One marker per point on a single number line. Throws EmptyDataset.
std::string points_svg(std::span<const SpectrumPoint> points);

}  // namespace isospec::spectrum
