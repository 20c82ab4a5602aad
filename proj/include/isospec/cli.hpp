#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "isospec/bounds.hpp"
#include "isospec/exponents.hpp"
#include "isospec/spectrum.hpp"

namespace isospec::cli {

enum class Subcommand { Synthesize, Analyze, Regions, Certify, Spectrum };
enum class Format { Json, Csv };

struct RunConfig {
  Subcommand subcommand = Subcommand::Analyze;
  // Exactly one input source: a matrix literal or a target exponent.
  std::optional<exponents::IntMatrix2> matrix;
  std::optional<double> alpha;
  double epsilon = 0.01;
  exponents::DeterminantRange range = exponents::DeterminantRange::Guarded;
  int n = 2;  // regions
  int n_min = 3;
  int n_max = 8;
  std::int64_t t_min = 5;
  std::int64_t t_max = 20;
  int i_max = 3;
  std::optional<int> k_max;           // spectrum figure rows
  std::size_t samples = 20;           // spectrum figure points per row
  std::optional<std::int64_t> density_t;
  double density_epsilon = 0.5;
  bool polygons = false;  // regions: include lattice loops
  std::uint64_t seed = 0;
  std::size_t monte_carlo_samples = 1'000'000;
  Format format = Format::Json;
  std::optional<std::string> output_path;
  std::optional<std::string> svg_path;
  bounds::Tolerances tolerances;
};

/// Throws Error{Usage} when the input sources do not fit the subcommand.
void validate(const RunConfig& config);

/// Runs one configured command, writing the report to `out` (or the output
/// file). Returns 0 on pass and 2 when a verdict fails; library errors other
/// than VerdictFail propagate.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and runs. Exit codes: 0 pass (and --help), 2 verdict failure,
/// 1 usage or validation error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Sorted keys, shortest round-trip floats.
std::string emit_report(const bounds::CertifiedReport& report, Format format);
bounds::CertifiedReport parse_report(std::string_view json);

std::string emit_svg(const spectrum::FigureData& figure);
std::string emit_svg(std::span<const spectrum::SpectrumPoint> points);
std::string emit_svg(const geometry::ModelGeometry& geom, const regions::Stack& stack);

}  // namespace isospec::cli
