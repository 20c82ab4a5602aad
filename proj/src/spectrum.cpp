#include "isospec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "isospec/error.hpp"
#include "isospec/exponents.hpp"
#include "isospec/parallel.hpp"

namespace isospec::spectrum {

namespace {

constexpr double kLeft = 60.0;
constexpr double kSpan = 700.0;
constexpr double kMin = 1.0;
constexpr double kMax = 2.05;

double px(double x) { return kLeft + (x - kMin) / (kMax - kMin) * kSpan; }

std::string fixed(double v) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << v;
  return o.str();
}

void svg_open(std::ostringstream& svg, double height) {
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"820\" height=\"" << fixed(height)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
}

void tick(std::ostringstream& svg, double x, double y, const std::string& label) {
  svg << "<line x1=\"" << fixed(px(x)) << "\" y1=\"" << fixed(y - 5) << "\" x2=\"" << fixed(px(x)) << "\" y2=\""
      << fixed(y + 5) << "\" stroke=\"#000000\"/>\n"
      << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(y + 18) << "\" text-anchor=\"middle\">" << label
      << "</text>\n";
}

void marker(std::ostringstream& svg, const SpectrumPoint& p, double y) {
  svg << "<circle cx=\"" << fixed(px(p.exponent)) << "\" cy=\"" << fixed(y) << "\" r=\"2\" fill=\"#d62728\">"
      << "<title>t=" << p.t << " d=" << p.d << " i=" << p.i << "</title></circle>\n";
}

}  // namespace

std::vector<SpectrumPoint> enumerate_exponents(std::int64_t t_max, int i_max, std::int64_t t_min) {
  if (t_min < 4 || t_max < t_min || i_max < 0) {
    throw Error(ErrorCode::PreconditionViolated, "need 4 <= t_min <= t_max and i_max >= 0");
  }
  const auto count = static_cast<std::size_t>(t_max - t_min + 1);
  std::vector<std::vector<SpectrumPoint>> per_t(count);
  parallel_for(count, [&](std::size_t j) {
    const std::int64_t t = t_min + static_cast<std::int64_t>(j);
    for (std::int64_t d = 2; d <= t - 2; ++d) {
      const double alpha = exponents::exponent_of(t, d);
      for (int i = 0; i <= i_max; ++i) per_t[j].push_back({i + 2, exponents::suspension_exponent(alpha, i), t, d, i});
    }
  });
  std::vector<SpectrumPoint> out;
  for (auto& v : per_t) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> monotonicity_violations(std::span<const SpectrumPoint> points) {
  std::vector<SpectrumPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const SpectrumPoint& a, const SpectrumPoint& b) {
    return std::tie(a.i, a.t, a.d) < std::tie(b.i, b.t, b.d);
  });
  std::vector<std::pair<std::int64_t, std::int64_t>> bad;
  for (std::size_t j = 1; j < sorted.size(); ++j) {
    const SpectrumPoint& a = sorted[j - 1];
    const SpectrumPoint& b = sorted[j];
    if (a.i == b.i && a.t == b.t && !(a.exponent < b.exponent)) bad.emplace_back(b.t, b.d);
  }
  return bad;
}

DensityReport density_check(std::int64_t t, double epsilon) {
  if (t < 6) throw Error(ErrorCode::PreconditionViolated, "density check needs t >= 6");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::PreconditionViolated, "epsilon must be positive");
  DensityReport r;
  r.t = t;
  r.epsilon = epsilon;
  const double ln_t = std::log(static_cast<double>(t));
  for (std::int64_t d = 2; d <= t - 4; ++d) r.values.push_back(std::log(static_cast<double>(d)) / ln_t);
  r.left_gap = r.values.front();
  r.right_gap = 1.0 - r.values.back();
  r.pointwise_bound_holds = true;
  for (std::size_t j = 1; j < r.values.size(); ++j) {
    const double gap = r.values[j] - r.values[j - 1];
    r.max_gap = std::max(r.max_gap, gap);
    const double d = static_cast<double>(j + 1);  // values[j - 1] = log_t d
    if (gap > 1.0 / (d * ln_t)) r.pointwise_bound_holds = false;
  }
  r.covering_radius = std::max({r.left_gap, r.right_gap, 0.5 * r.max_gap});
  r.threshold = std::exp(2.0 / epsilon);
  r.threshold_met = static_cast<double>(t) > r.threshold;
  r.eps_dense = r.covering_radius <= epsilon;
  if (r.threshold_met && !r.eps_dense) throw VerdictFailure("density", r.covering_radius, epsilon);
  return r;
}

FigureData spectra_figure_data(int k_max, std::size_t samples) {
  if (k_max < 2) throw Error(ErrorCode::PreconditionViolated, "k_max must be >= 2");
  FigureData data;
  for (int k = 2; k <= k_max; ++k) {
    FigureRow row;
    row.k = k;
    row.suspension_endpoint = exponents::suspension_exponent(Rational(2), k - 2);
    row.euclidean_endpoint = Rational(1) + Rational(1, k);
    for (std::int64_t t = 4; row.samples.size() < samples; ++t) {
      for (std::int64_t d = 2; d <= t - 2 && row.samples.size() < samples; ++d) {
        const double alpha = exponents::exponent_of(t, d);
        row.samples.push_back({k, exponents::suspension_exponent(alpha, k - 2), t, d, k - 2});
      }
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

std::string figure_svg(const FigureData& data) {
  if (data.rows.empty()) throw Error(ErrorCode::EmptyDataset, "figure has no rows");
  std::ostringstream svg;
  const double row_height = 60.0;
  svg_open(svg, 40.0 + row_height * static_cast<double>(data.rows.size()));
  for (std::size_t j = 0; j < data.rows.size(); ++j) {
    const FigureRow& row = data.rows[j];
    const double y = 40.0 + row_height * static_cast<double>(j);
    svg << "<g id=\"k-" << row.k << "\">\n"
        << "<text x=\"10\" y=\"" << fixed(y + 4) << "\">IP(" << row.k << ")</text>\n"
        << "<line x1=\"" << fixed(px(1.0)) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(px(kMax)) << "\" y2=\""
        << fixed(y) << "\" stroke=\"#000000\"/>\n";
    // Previously known dense range, drawn as in the reference layout.
    svg << "<line class=\"external\" x1=\"" << fixed(px(row.euclidean_endpoint.to_double())) << "\" y1=\""
        << fixed(y) << "\" x2=\"" << fixed(px(kMax)) << "\" y2=\"" << fixed(y)
        << "\" stroke=\"#1f77b4\" stroke-width=\"4\"><title>" << row.euclidean_source << "</title></line>\n";
    tick(svg, 1.0, y, "1");
    tick(svg, row.euclidean_endpoint.to_double(), y, row.euclidean_endpoint.str());
    if (row.suspension_endpoint.to_double() <= kMax) {
      tick(svg, row.suspension_endpoint.to_double(), y - 28, row.suspension_endpoint.str());
    }
    for (const SpectrumPoint& p : row.samples) marker(svg, p, y);
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string points_svg(std::span<const SpectrumPoint> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyDataset, "no points to draw");
  std::ostringstream svg;
  svg_open(svg, 80.0);
  const double y = 40.0;
  svg << "<line x1=\"" << fixed(px(1.0)) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(px(kMax)) << "\" y2=\""
      << fixed(y) << "\" stroke=\"#000000\"/>\n";
  tick(svg, 1.0, y, "1");
  tick(svg, 2.0, y, "2");
  for (const SpectrumPoint& p : points) marker(svg, p, y);
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace isospec::spectrum
