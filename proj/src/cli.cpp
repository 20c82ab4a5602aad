#include "isospec/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "isospec/error.hpp"
#include "isospec/lattice.hpp"

namespace isospec::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

json matrix_json(const exponents::IntMatrix2& m) { return json::array({{m.a11, m.a12}, {m.a21, m.a22}}); }

exponents::IntMatrix2 matrix_from(const json& j) {
  return {j.at(0).at(0).get<std::int64_t>(), j.at(0).at(1).get<std::int64_t>(), j.at(1).at(0).get<std::int64_t>(),
          j.at(1).at(1).get<std::int64_t>()};
}

json verdict_json(const bounds::Verdict& v) {
  return {{"name", v.name}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"tolerance", v.tolerance}, {"pass", v.pass}};
}

bounds::Verdict verdict_from(const json& j) {
  return {j.at("name").get<std::string>(), j.at("lhs").get<double>(), j.at("rhs").get<double>(),
          j.at("tolerance").get<double>(), j.at("pass").get<bool>()};
}

json verdicts_json(const std::vector<bounds::Verdict>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(verdict_json(v));
  return a;
}

std::vector<bounds::Verdict> verdicts_from(const json& j) {
  std::vector<bounds::Verdict> out;
  for (const auto& v : j) out.push_back(verdict_from(v));
  return out;
}

json fit_json(const bounds::LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}};
}

bounds::LinearFit fit_from(const json& j) {
  return {j.at("slope").get<double>(), j.at("intercept").get<double>(), j.at("residual").get<double>()};
}

json constants_json(const bounds::BoundConstants& c) {
  return {{"kappa", c.kappa},
          {"C_lemma", c.C_lemma},
          {"D_lemma", c.D_lemma},
          {"E_const", c.E_const},
          {"K_const", c.K_const},
          {"upper_coeff_embedded", c.upper_coeff_embedded},
          {"upper_coeff_general", c.upper_coeff_general},
          {"delta2_coeff", c.delta2_coeff},
          {"ratio_numerator", c.ratio_numerator}};
}

bounds::BoundConstants constants_from(const json& j) {
  bounds::BoundConstants c;
  c.kappa = j.at("kappa").get<double>();
  c.C_lemma = j.at("C_lemma").get<double>();
  c.D_lemma = j.at("D_lemma").get<double>();
  c.E_const = j.at("E_const").get<double>();
  c.K_const = j.at("K_const").get<double>();
  c.upper_coeff_embedded = j.at("upper_coeff_embedded").get<double>();
  c.upper_coeff_general = j.at("upper_coeff_general").get<double>();
  c.delta2_coeff = j.at("delta2_coeff").get<double>();
  c.ratio_numerator = j.at("ratio_numerator").get<double>();
  return c;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json point_json(const spectrum::SpectrumPoint& p) {
  return {{"k", p.k}, {"exponent", p.exponent}, {"t", p.t}, {"d", p.d}, {"i", p.i}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Usage, "cannot open " + path + " for writing");
  f << text;
}

void write_output(const RunConfig& config, std::ostream& out, const std::string& text) {
  if (config.output_path) {
    write_file(*config.output_path, text);
  } else {
    out << text;
  }
}

bool all_pass(const std::vector<bounds::Verdict>& vs) {
  return std::all_of(vs.begin(), vs.end(), [](const bounds::Verdict& v) { return v.pass; });
}

// ---- subcommands ----------------------------------------------------------

int run_synthesize(const RunConfig& config, std::ostream& out) {
  const auto r = exponents::synthesize_matrix(*config.alpha, config.epsilon, config.range);
  const auto& c = r.certificate;
  std::string text;
  if (config.format == Format::Json) {
    json chain = json::array();
    for (const auto& link : c.chain) {
      chain.push_back({{"relation", link.relation}, {"lhs", link.lhs}, {"rhs", link.rhs}, {"holds", link.holds}});
    }
    text = dump({{"matrix", matrix_json(r.matrix)},
                 {"t", c.t},
                 {"d", c.d},
                 {"alpha_target", c.alpha_target},
                 {"epsilon", c.epsilon},
                 {"alpha_achieved", c.alpha_achieved},
                 {"error", c.error()},
                 {"guarded", c.guarded},
                 {"chain", chain},
                 {"chain_holds", c.chain_holds()}});
  } else {
    text = "t,d,alpha_target,epsilon,alpha_achieved,error,guarded,chain_holds\n" + std::to_string(c.t) + "," +
           std::to_string(c.d) + "," + num(c.alpha_target) + "," + num(c.epsilon) + "," + num(c.alpha_achieved) +
           "," + num(c.error()) + "," + (c.guarded ? "true" : "false") + "," + (c.chain_holds() ? "true" : "false") +
           "\n";
  }
  write_output(config, out, text);
  return 0;
}

int run_analyze(const RunConfig& config, std::ostream& out) {
  const auto geom = geometry::build_geometry(*config.matrix);
  const auto& e = geom.eigen;
  const double lam = geom.lambda();
  const double residual = std::abs((2.0 + std::log(geom.mu()) / std::log(lam)) - e.alpha);
  const QuadraticNumber sum = e.lambda + e.mu;
  const QuadraticNumber product = e.lambda * e.mu;
  const bool sum_exact = sum == QuadraticNumber(Rational(e.trace), Rational(0), e.discriminant);
  const bool product_exact = product == QuadraticNumber(Rational(e.det), Rational(0), e.discriminant);
  const bounds::BoundConstants c = bounds::geometric_constants(geom);
  json suspensions = json::array();
  for (int i = 0; i <= 4; ++i) suspensions.push_back(exponents::suspension_exponent(e.alpha, i));

  if (config.format == Format::Json) {
    json j = {{"matrix", matrix_json(geom.matrix)},
              {"trace", e.trace},
              {"det", e.det},
              {"discriminant", e.discriminant},
              {"lambda", {{"value", lam}, {"exact", e.lambda.str()}}},
              {"mu", {{"value", geom.mu()}, {"exact", e.mu.str()}}},
              {"alpha", e.alpha},
              {"alpha_identity_residual", residual},
              {"sum_exact", sum_exact},
              {"product_exact", product_exact},
              {"suspension_exponents", suspensions},
              {"geometry",
               {{"B", {{geom.b.m11, geom.b.m12}, {geom.b.m21, geom.b.m22}}},
                {"w", geom.w},
                {"k", lattice::backtracking_constant(geom)},
                {"cell_volume", geom.cell_volume},
                {"cell_volume_closed_form", geometry::closed_form_cell_volume(geom)},
                {"a", geom.cells.a},
                {"c_cell", geom.cells.c_cell},
                {"jacobian", geom.cells.jacobian},
                {"lateral_areas", {geom.cells.vertical[0], geom.cells.vertical[1]}},
                {"pieces_in_q", geom.cells.pieces_in_q},
                {"pieces_in_dq", geom.cells.pieces_in_dq}}},
              {"constants", constants_json(c)}};
    // E and K depend on the certified window.
    j["constants"].erase("E_const");
    j["constants"].erase("K_const");
    write_output(config, out, dump(j));
  } else {
    std::ostringstream csv;
    csv << "field,value\n"
        << "trace," << e.trace << "\ndet," << e.det << "\nlambda," << num(lam) << "\nmu," << num(geom.mu())
        << "\nalpha," << num(e.alpha) << "\nalpha_identity_residual," << num(residual) << "\nw," << num(geom.w)
        << "\nk," << lattice::backtracking_constant(geom) << "\ncell_volume," << num(geom.cell_volume) << "\na,"
        << num(geom.cells.a) << "\nc_cell," << num(geom.cells.c_cell) << "\njacobian," << num(geom.cells.jacobian)
        << "\nkappa," << num(c.kappa) << "\n";
    write_output(config, out, csv.str());
  }
  return sum_exact && product_exact ? 0 : 2;
}

json boundary_json(const regions::BoundaryMeasurement& m) {
  json levels = json::array();
  for (const auto& lv : m.levels) {
    levels.push_back({{"height", lv.height},
                      {"exact", lv.exact},
                      {"annulus_bound", lv.annulus_bound},
                      {"annulus_closed_form", lv.paper_annulus},
                      {"estimated", lv.estimated}});
  }
  return {{"top", m.top},           {"vertical", m.vertical},
          {"horizontal", m.horizontal}, {"total_upper", m.total_upper},
          {"bottom", m.bottom},     {"levels", levels},
          {"vertical_by_level", m.vertical_by_level}, {"estimated", m.estimated}};
}

json rect_json(const polygon::Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

int run_regions(const RunConfig& config, std::ostream& out) {
  const auto geom = geometry::build_geometry(*config.matrix);
  regions::MeasureOptions measure;
  measure.seed = config.seed;
  measure.monte_carlo_samples = config.monte_carlo_samples;
  const regions::Ball ball = regions::build_ball(geom, config.n, {}, measure);
  const regions::RegionRn rn = regions::measure_Rn(geom, config.n);

  std::vector<bounds::Verdict> verdicts;
  for (const regions::Stack* s : {&ball.stack0, &ball.stack1}) {
    const std::string p = s == &ball.stack0 ? "stack0." : "stack1.";
    verdicts.push_back(bounds::make_verdict(p + "containment_failures", s->containment_holds() ? 0.0 : 1.0, 0.0, 0.0));
    for (auto v : bounds::evaluate_slab_lemmas(geom, *s, config.tolerances)) {
      v.name = p + v.name;
      verdicts.push_back(v);
    }
  }
  for (auto v : bounds::evaluate_foldbound(geom, ball, config.tolerances)) verdicts.push_back(v);
  for (auto v : bounds::evaluate_embedded_upper(geom, ball, config.tolerances)) verdicts.push_back(v);

  if (config.format == Format::Json) {
    json stacks = json::array();
    for (const regions::Stack* s : {&ball.stack0, &ball.stack1}) {
      json slabs = json::array();
      for (std::size_t j = 0; j < s->slabs.size(); ++j) {
        const regions::Slab& slab = s->slabs[j];
        json certs = json::array();
        for (const auto& q : slab.quad) certs.push_back(q.multiplicity_certificate);
        json js = {{"i", slab.i},
                   {"euclidean_area", slab.euclidean_area},
                   {"twice_lattice_area", slab.twice_lattice_area},
                   {"loop_vertices", slab.loop.size()},
                   {"edge_counts", {slab.edge_counts[0], slab.edge_counts[1]}},
                   {"contains_rect", slab.contains_rect},
                   {"inside_w_in", slab.inside_w_in},
                   {"inside_r_prime", static_cast<bool>(s->inside_r_prime[j])},
                   {"w_in", rect_json(slab.w_in)},
                   {"certificates", certs}};
        if (config.polygons) {
          json loop = json::array();
          for (const auto& u : slab.loop) loop.push_back({u[0], u[1]});
          js["lattice_loop"] = loop;
        }
        slabs.push_back(js);
      }
      stacks.push_back({{"branch", s->branch.index},
                        {"branch_numerator", {s->branch.numerator[0], s->branch.numerator[1]}},
                        {"rvol", s->rvol},
                        {"containment", s->containment_holds()},
                        {"boundary", boundary_json(s->boundary)},
                        {"slabs", slabs}});
    }
    json j = {{"matrix", matrix_json(geom.matrix)},
              {"n", config.n},
              {"R_n",
               {{"rvol", rn.rvol},
                {"rvol_lower_bound", rn.rvol_lower_bound},
                {"area_top", rn.area_top},
                {"area_bottom", rn.area_bottom},
                {"area_sides_x", {rn.area_sides_x[0], rn.area_sides_x[1]}},
                {"area_sides_y", {rn.area_sides_y[0], rn.area_sides_y[1]}},
                {"area_upper_bound", rn.area_upper_bound}}},
              {"kappa", regions::kappa(geom)},
              {"r_prime", rect_json(regions::r_prime_footprint(geom, config.n))},
              {"ball",
               {{"fold_area", ball.fold_area},
                {"bottom_difference", ball.bottom_difference},
                {"boundary_area", ball.boundary_area},
                {"x_lo", ball.x_lo},
                {"x_hi", ball.x_hi},
                {"y_n", ball.y_n}}},
              {"stacks", stacks},
              {"verdicts", verdicts_json(verdicts)}};
    write_output(config, out, dump(j));
  } else {
    std::ostringstream csv;
    csv << std::boolalpha << "stack,i,euclidean_area,loop_vertices,contains_rect,inside_w_in,inside_r_prime,vertical,"
           "horizontal_exact,annulus_bound\n";
    for (const regions::Stack* s : {&ball.stack0, &ball.stack1}) {
      for (std::size_t j = 0; j < s->slabs.size(); ++j) {
        const regions::Slab& slab = s->slabs[j];
        const auto& lv = s->boundary.levels[j];
        csv << s->branch.index << ',' << slab.i << ',' << num(slab.euclidean_area) << ',' << slab.loop.size() << ','
            << slab.contains_rect << ',' << slab.inside_w_in << ',' << static_cast<bool>(s->inside_r_prime[j]) << ','
            << num(s->boundary.vertical_by_level[j]) << ',' << num(lv.exact) << ',' << num(lv.annulus_bound) << '\n';
      }
    }
    write_output(config, out, csv.str());
  }
  if (config.svg_path) write_file(*config.svg_path, emit_svg(geom, ball.stack0));
  return all_pass(verdicts) ? 0 : 2;
}

int run_certify(const RunConfig& config, std::ostream& out) {
  const auto geom = geometry::build_geometry(*config.matrix);
  bounds::CertifyOptions options;
  options.tolerances = config.tolerances;
  options.measure.seed = config.seed;
  options.measure.monte_carlo_samples = config.monte_carlo_samples;
  const bounds::CertifiedReport report = bounds::certify_exponent(geom, config.n_min, config.n_max, options);
  write_output(config, out, emit_report(report, config.format));
  return report.pass ? 0 : 2;
}

int run_spectrum(const RunConfig& config, std::ostream& out) {
  const auto points = spectrum::enumerate_exponents(config.t_max, config.i_max, config.t_min);
  const auto violations = spectrum::monotonicity_violations(points);
  std::optional<spectrum::FigureData> figure;
  if (config.k_max) figure = spectrum::spectra_figure_data(*config.k_max, config.samples);
  std::optional<spectrum::DensityReport> density;
  int status = 0;
  if (config.density_t) {
    try {
      density = spectrum::density_check(*config.density_t, config.density_epsilon);
    } catch (const VerdictFailure&) {
      status = 2;
    }
  }

  if (config.format == Format::Json) {
    json pts = json::array();
    for (const auto& p : points) pts.push_back(point_json(p));
    json bad = json::array();
    for (const auto& [t, d] : violations) bad.push_back({t, d});
    json j = {{"t_min", config.t_min},
              {"t_max", config.t_max},
              {"i_max", config.i_max},
              {"points", pts},
              {"monotonicity_violations", bad}};
    if (figure) {
      json rows = json::array();
      for (const auto& row : figure->rows) {
        json samples = json::array();
        for (const auto& p : row.samples) samples.push_back(point_json(p));
        rows.push_back({{"k", row.k},
                        {"suspension_endpoint", row.suspension_endpoint.str()},
                        {"euclidean_endpoint", row.euclidean_endpoint.str()},
                        {"euclidean_source", row.euclidean_source},
                        {"samples", samples}});
      }
      j["figure"] = rows;
    }
    if (density) {
      j["density"] = {{"t", density->t},
                      {"epsilon", density->epsilon},
                      {"left_gap", density->left_gap},
                      {"right_gap", density->right_gap},
                      {"max_gap", density->max_gap},
                      {"covering_radius", density->covering_radius},
                      {"threshold", density->threshold},
                      {"threshold_met", density->threshold_met},
                      {"eps_dense", density->eps_dense},
                      {"pointwise_bound_holds", density->pointwise_bound_holds}};
    }
    write_output(config, out, dump(j));
  } else {
    std::ostringstream csv;
    csv << "k,exponent,t,d,i\n";
    for (const auto& p : points) csv << p.k << ',' << num(p.exponent) << ',' << p.t << ',' << p.d << ',' << p.i << '\n';
    write_output(config, out, csv.str());
  }
  if (config.svg_path) write_file(*config.svg_path, figure ? emit_svg(*figure) : emit_svg(points));
  return status;
}

}  // namespace

void validate(const RunConfig& config) {
  if (config.matrix && config.alpha) throw Error(ErrorCode::Usage, "give either a matrix or a target exponent");
  const bool needs_matrix = config.subcommand != Subcommand::Synthesize && config.subcommand != Subcommand::Spectrum;
  if (config.subcommand == Subcommand::Synthesize && !config.alpha) {
    throw Error(ErrorCode::Usage, "synthesize needs --alpha");
  }
  if (needs_matrix && !config.matrix) throw Error(ErrorCode::Usage, "this subcommand needs --matrix");
  if (config.subcommand == Subcommand::Spectrum && (config.matrix || config.alpha)) {
    throw Error(ErrorCode::Usage, "spectrum takes no matrix or target");
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  (void)err;
  validate(config);
  switch (config.subcommand) {
    case Subcommand::Synthesize: return run_synthesize(config, out);
    case Subcommand::Analyze: return run_analyze(config, out);
    case Subcommand::Regions: return run_regions(config, out);
    case Subcommand::Certify: return run_certify(config, out);
    case Subcommand::Spectrum: return run_spectrum(config, out);
  }
  return 1;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Filling exponents of ascending HNN extensions of Z^2", "isospec"};
  app.require_subcommand(1);
  RunConfig config;
  std::string matrix_text;
  std::string format = "json";
  std::string range = "guarded";
  std::string output;
  std::string svg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", config.seed, "seed for every random choice");
    sub->add_option("-o,--output", output, "write the report here instead of stdout");
  };
  auto with_matrix = [&](CLI::App* sub) {
    sub->add_option("--matrix", matrix_text, "matrix literal \"a,b;c,d\"")->required();
  };
  auto tolerances = [&](CLI::App* sub) {
    sub->add_option("--tol-closed", config.tolerances.closed_form, "relative slack, closed forms");
    sub->add_option("--tol-pipeline", config.tolerances.pipeline, "relative slack, traced quantities");
    sub->add_option("--tol-slope", config.tolerances.slope, "allowed |slope - alpha|");
    sub->add_option("--mc-samples", config.monte_carlo_samples, "Monte Carlo fallback samples");
  };

  CLI::App* synth = app.add_subcommand("synthesize", "find a matrix with exponent near a target");
  double alpha = 0.0;
  synth->add_option("--alpha", alpha, "target exponent in (1, 2)")->required();
  synth->add_option("--eps", config.epsilon, "tolerance");
  synth->add_option("--range", range, "determinant range: guarded (d <= t-4) or admissible (d <= t-2)")
      ->check(CLI::IsMember({"guarded", "admissible"}));
  common(synth);

  CLI::App* analyze = app.add_subcommand("analyze", "spectrum, exponent and cell geometry of a matrix");
  with_matrix(analyze);
  common(analyze);

  CLI::App* regions_cmd = app.add_subcommand("regions", "build and measure the doubled stack at one height");
  with_matrix(regions_cmd);
  regions_cmd->add_option("--n", config.n, "height")->check(CLI::PositiveNumber);
  regions_cmd->add_flag("--polygons", config.polygons, "include lattice loops");
  regions_cmd->add_option("--svg", svg, "write a cross-section drawing");
  tolerances(regions_cmd);
  common(regions_cmd);

  CLI::App* certify = app.add_subcommand("certify", "check every inequality and fit the exponent");
  with_matrix(certify);
  certify->add_option("--n-min", config.n_min, "first height")->check(CLI::PositiveNumber);
  certify->add_option("--n-max", config.n_max, "last height")->check(CLI::PositiveNumber);
  tolerances(certify);
  common(certify);

  CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "enumerate achievable exponents");
  spectrum_cmd->add_option("--t-min", config.t_min, "smallest trace");
  spectrum_cmd->add_option("--t-max", config.t_max, "largest trace");
  spectrum_cmd->add_option("--i-max", config.i_max, "largest suspension level");
  std::optional<int> k_max;
  spectrum_cmd->add_option("--k-max", k_max, "emit figure rows for k = 2..k_max");
  spectrum_cmd->add_option("--samples", config.samples, "figure points per row");
  std::optional<std::int64_t> density_t;
  spectrum_cmd->add_option("--density-t", density_t, "run the density diagnostic at this trace");
  spectrum_cmd->add_option("--density-eps", config.density_epsilon, "density epsilon");
  spectrum_cmd->add_option("--svg", svg, "write a number-line drawing");
  common(spectrum_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (synth->parsed()) {
      config.subcommand = Subcommand::Synthesize;
      config.alpha = alpha;
      config.range = range == "admissible" ? exponents::DeterminantRange::Admissible
                                           : exponents::DeterminantRange::Guarded;
    } else if (analyze->parsed()) {
      config.subcommand = Subcommand::Analyze;
    } else if (regions_cmd->parsed()) {
      config.subcommand = Subcommand::Regions;
    } else if (certify->parsed()) {
      config.subcommand = Subcommand::Certify;
    } else {
      config.subcommand = Subcommand::Spectrum;
      config.k_max = k_max;
      config.density_t = density_t;
    }
    if (!matrix_text.empty()) {
      config.matrix = exponents::parse_matrix(matrix_text);
      if (!config.matrix) throw Error(ErrorCode::Usage, "cannot parse matrix \"" + matrix_text + "\"");
    }
    config.format = format == "csv" ? Format::Csv : Format::Json;
    if (!output.empty()) config.output_path = output;
    if (!svg.empty()) config.svg_path = svg;
    return run(config, out, err);
  } catch (const VerdictFailure& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

std::string emit_report(const bounds::CertifiedReport& r, Format format) {
  if (format == Format::Csv) {
    std::ostringstream csv;
    csv << "n,y_n,x_lo,x_hi,boundary_area,fold_area,estimated,pass,failed\n";
    for (const auto& row : r.rows) {
      std::string failed;
      for (const auto& v : row.verdicts) {
        if (!v.pass) failed += (failed.empty() ? "" : ";") + v.name;
      }
      csv << row.n << ',' << num(row.y_n) << ',' << num(row.x_lo) << ',' << num(row.x_hi) << ','
          << num(row.boundary_area) << ',' << num(row.fold_area) << ',' << (row.estimated ? "true" : "false") << ','
          << (row.pass() ? "true" : "false") << ',' << failed << '\n';
    }
    return csv.str();
  }
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"y_n", row.y_n},
                    {"x_lo", row.x_lo},
                    {"x_hi", row.x_hi},
                    {"boundary_area", row.boundary_area},
                    {"fold_area", row.fold_area},
                    {"estimated", row.estimated},
                    {"pass", row.pass()},
                    {"verdicts", verdicts_json(row.verdicts)}});
  }
  json j = {{"matrix", matrix_json(r.matrix)},
            {"eigen", {{"trace", r.trace}, {"det", r.det}, {"lambda", r.lambda}, {"mu", r.mu}, {"alpha", r.alpha}}},
            {"geometry",
             {{"w", r.w},
              {"k", r.k},
              {"cell_volume", r.cell_volume},
              {"a", r.a},
              {"c_cell", r.c_cell},
              {"jacobian", r.jacobian}}},
            {"constants", constants_json(r.constants)},
            {"tolerances",
             {{"closed_form", r.tolerances.closed_form},
              {"pipeline", r.tolerances.pipeline},
              {"slope", r.tolerances.slope}}},
            {"seed", r.seed},
            {"window", {{"n_min", r.n_min}, {"n_max", r.n_max}}},
            {"rows", rows},
            {"slope", {{"midpoint", fit_json(r.fit)}, {"lower", fit_json(r.fit_lo)}, {"upper", fit_json(r.fit_hi)}}},
            {"ratio", {{"max", r.max_ratio}, {"bound", r.ratio_bound}}},
            {"summary", verdicts_json(r.summary)},
            {"status", r.pass ? "pass" : "fail"}};
  return dump(j);
}

bounds::CertifiedReport parse_report(std::string_view text) {
  const json j = json::parse(text);
  bounds::CertifiedReport r;
  r.matrix = matrix_from(j.at("matrix"));
  const json& e = j.at("eigen");
  r.trace = e.at("trace").get<std::int64_t>();
  r.det = e.at("det").get<std::int64_t>();
  r.lambda = e.at("lambda").get<double>();
  r.mu = e.at("mu").get<double>();
  r.alpha = e.at("alpha").get<double>();
  const json& g = j.at("geometry");
  r.w = g.at("w").get<double>();
  r.k = g.at("k").get<int>();
  r.cell_volume = g.at("cell_volume").get<double>();
  r.a = g.at("a").get<double>();
  r.c_cell = g.at("c_cell").get<double>();
  r.jacobian = g.at("jacobian").get<double>();
  r.constants = constants_from(j.at("constants"));
  const json& t = j.at("tolerances");
  r.tolerances = {t.at("closed_form").get<double>(), t.at("pipeline").get<double>(), t.at("slope").get<double>()};
  r.seed = j.at("seed").get<std::uint64_t>();
  r.n_min = j.at("window").at("n_min").get<int>();
  r.n_max = j.at("window").at("n_max").get<int>();
  for (const json& row : j.at("rows")) {
    bounds::ReportRow out;
    out.n = row.at("n").get<int>();
    out.y_n = row.at("y_n").get<double>();
    out.x_lo = row.at("x_lo").get<double>();
    out.x_hi = row.at("x_hi").get<double>();
    out.boundary_area = row.at("boundary_area").get<double>();
    out.fold_area = row.at("fold_area").get<double>();
    out.estimated = row.at("estimated").get<bool>();
    out.verdicts = verdicts_from(row.at("verdicts"));
    r.rows.push_back(std::move(out));
  }
  r.fit = fit_from(j.at("slope").at("midpoint"));
  r.fit_lo = fit_from(j.at("slope").at("lower"));
  r.fit_hi = fit_from(j.at("slope").at("upper"));
  r.max_ratio = j.at("ratio").at("max").get<double>();
  r.ratio_bound = j.at("ratio").at("bound").get<double>();
  r.summary = verdicts_from(j.at("summary"));
  r.pass = j.at("status").get<std::string>() == "pass";
  return r;
}

std::string emit_svg(const spectrum::FigureData& figure) { return spectrum::figure_svg(figure); }

std::string emit_svg(std::span<const spectrum::SpectrumPoint> points) { return spectrum::points_svg(points); }

std::string emit_svg(const geometry::ModelGeometry& geom, const regions::Stack& stack) {
  return regions::stack_svg(geom, stack);
}

}  // namespace isospec::cli
