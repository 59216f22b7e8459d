#include "mindlen/cli.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <ostream>
#include <sstream>

namespace mindlen::cli {

namespace {

struct Common {
  std::string f;
  std::string preset;
  std::vector<std::string> params;
  std::optional<double> domain;
  std::string assume = "none";
  bool verify = false;
  int grid = 8192;
  std::string format;
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("-f,--f,--function", c.f, "deformation function f(p), e.g. \"1+b*p^2\"");
  cmd->add_option("--preset", c.preset, "built-in family: gauss, power-plus, power-minus");
  cmd->add_option("-P,--param", c.params, "parameter binding name=value (repeatable)");
  cmd->add_option("--domain", c.domain, "momentum half-width a (overrides detection)");
  cmd->add_option("--assume", c.assume, "classification override: none, finite, divergent")
      ->check(CLI::IsMember({"none", "finite", "divergent"}));
  cmd->add_flag("--verify", c.verify, "cross-check l0 with the spectral solver");
  cmd->add_option("--grid", c.grid, "spectral grid intervals (power of two >= 64)");
  cmd->add_option("--format", c.format, "output format: json, csv, table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
}

double parse_real(const std::string& s, const std::string& what) {
  double v = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw CLI::ValidationError(what, "not a number: '" + s + "'");
  return v;
}

AnalysisRequest to_request(const Common& c) {
  AnalysisRequest r;
  r.f_source = c.f;
  r.preset = c.preset;
  for (const auto& binding : c.params) {
    const auto eq = binding.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("-P", "expected name=value, got '" + binding + "'");
    r.params[binding.substr(0, eq)] = parse_real(binding.substr(eq + 1), "-P");
  }
  r.domain = c.domain;
  r.assume = c.assume == "finite"      ? Assumption::Finite
             : c.assume == "divergent" ? Assumption::Divergent
                                       : Assumption::None;
  r.verify = c.verify;
  r.grid = c.grid;
  r.format = c.format == "csv" ? Format::Csv : c.format == "table" ? Format::Table : Format::Json;
  return r;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mindlen: minimal length of the deformed Heisenberg algebra [X,P] = i f(P)",
               "mindlen"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 1 input error, 2 ambiguous classification, "
      "3 verification mismatch.\nMINDLEN_THREADS caps the sweep worker pool.");

  Common analyze_c, sweep_c, map_c, plot_c;
  auto* analyze = app.add_subcommand("analyze", "classify, compute l0, bound and verify");
  add_common(analyze, analyze_c, "json");

  auto* sweep = app.add_subcommand("sweep", "tabulate l0 over values of one parameter");
  add_common(sweep, sweep_c, "table");
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  sweep->add_option("--sweep-param,--over", sweep_param, "parameter to vary")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');

  auto* map = app.add_subcommand("map", "sample the momentum map q = h(p)");
  add_common(map, map_c, "csv");
  int map_points = 101;
  std::optional<double> map_pmax;
  map->add_option("--points", map_points, "number of interior sample points");
  map->add_option("--p-max", map_pmax, "sample range (-p_max, p_max)");

  auto* plot = app.add_subcommand("plot", "CSV data for external plotting");
  add_common(plot, plot_c, "csv");
  std::string plot_what = "eigenvector";
  int plot_points = 201;
  std::optional<double> plot_pmax;
  plot->add_option("--what", plot_what, "eigenvector, map or integrand")
      ->check(CLI::IsMember({"eigenvector", "map", "integrand"}));
  plot->add_option("--points", plot_points, "approximate number of rows");
  plot->add_option("--p-max", plot_pmax, "sample range (-p_max, p_max)");

  try {
    app.parse(argc, argv);
    if (analyze->parsed()) return cmd_analyze(to_request(analyze_c), out, err);
    if (sweep->parsed()) {
      SweepRequest r;
      r.base = to_request(sweep_c);
      r.param = sweep_param;
      for (const auto& v : sweep_values) r.values.push_back(parse_real(v, "--values"));
      return cmd_sweep(r, out, err);
    }
    if (map->parsed()) {
      MapRequest r;
      r.base = to_request(map_c);
      r.points = map_points;
      r.p_max = map_pmax;
      return cmd_map(r, out, err);
    }
    PlotRequest r;
    r.base = to_request(plot_c);
    r.what = plot_what;
    r.points = plot_points;
    r.p_max = plot_pmax;
    return cmd_plot(r, out, err);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace mindlen::cli
