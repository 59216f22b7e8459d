#include "mindlen/algebra.hpp"
#include "mindlen/cli.hpp"
#include "mindlen/gup.hpp"
#include "mindlen/spectral.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>
#include <variant>

namespace mindlen::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "mindlen/1";

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json real(double v) {
  if (!std::isfinite(v)) return format_real(v, kJsonDigits);
  if (v == 0) return 0.0;  // no negative zero in reports
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", kJsonDigits, v);
  return std::strtod(buf, nullptr);
}

Json real(const std::optional<double>& v) { return v ? real(*v) : Json(nullptr); }

std::string_view to_string(Assumption a) {
  switch (a) {
    case Assumption::None: return "none";
    case Assumption::Finite: return "finite";
    case Assumption::Divergent: return "divergent";
  }
  return "?";
}

// ---- request resolution ------------------------------------------------------

struct Resolved {
  std::string source;
  expr::ParameterMap params;
  std::optional<double> domain;
  const Preset* preset = nullptr;
};

Resolved resolve(const AnalysisRequest& req) {
  Resolved r;
  if (!req.preset.empty()) {
    if (!req.f_source.empty()) throw InputError("give either --f or --preset, not both");
    r.preset = find_preset(req.preset);
    if (!r.preset) throw InputError("unknown preset '" + req.preset + "'");
    r.source = r.preset->expression;
    r.params = r.preset->defaults;
  } else {
    if (req.f_source.empty()) throw InputError("no deformation function: give --f or --preset");
    r.source = req.f_source;
  }
  for (const auto& [k, v] : req.params) r.params[k] = v;
  const auto expression = expr::Expression::parse(r.source);
  for (const auto& [k, v] : r.params) {
    if (!expression.parameters().count(k))
      throw InputError("parameter '" + k + "' does not occur in f");
    if (!std::isfinite(v)) throw InputError("parameter '" + k + "' must be finite");
  }
  for (const auto& name : expression.parameters())
    if (!r.params.count(name)) throw InputError("unbound parameter '" + name + "' (use -P " + name + "=value)");
  r.domain = req.domain;
  if (!r.domain && r.preset) r.domain = r.preset->domain(r.params);
  if (r.domain && !(*r.domain > 0)) throw InputError("--domain must be positive");
  if (req.grid < 64 || (req.grid & (req.grid - 1)) != 0)
    throw InputError("--grid must be a power of two >= 64");
  return r;
}

DeformationFunction make_function(const Resolved& r) {
  DomainOptions opt;
  opt.half_width = r.domain;
  auto f = DeformationFunction::create(r.source, r.params, opt);
  require_valid(f);
  return f;
}

Json metadata(const AnalysisRequest& req, const Resolved& r) {
  Json m;
  m["f"] = r.source;
  m["preset"] = r.preset ? Json(r.preset->name) : Json(nullptr);
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = real(v);
  m["params"] = params;
  m["domain"] = real(r.domain);
  m["assume"] = to_string(req.assume);
  m["verify"] = req.verify;
  m["grid"] = req.grid;
  m["format"] = to_string(req.format);
  return m;
}

// Runs `body`, mapping failures onto exit codes and stderr diagnostics.
template <class Body>
int guarded(const std::string& source, std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const expr::ParseError& e) {
    err << "error: " << e.what() << "\n  " << source << "\n  " << std::string(e.offset(), ' ')
        << "^\n";
  } catch (const AmbiguousClassification& e) {
    err << "error: " << e.what() << "\n";
    return kAmbiguous;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kInputError;
}

// ---- tabular output ------------------------------------------------------------

using Cell = std::variant<std::monostate, double, std::string, bool>;

struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c, int digits) {
  if (std::holds_alternative<double>(c)) return format_real(std::get<double>(c), digits);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "true" : "false";
  return {};
}

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_csv(const Table& t, std::ostream& out) {
  for (const auto& c : t.comments) out << "# " << c << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_field(t.columns[i]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_field(cell_text(row[i], kJsonDigits));
    out << "\n";
  }
}

void write_aligned(const Table& t, std::ostream& out) {
  for (const auto& c : t.comments) out << c << "\n";
  std::vector<std::vector<std::string>> text;
  std::vector<std::size_t> width(t.columns.size());
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& row : t.rows) {
    auto& line = text.emplace_back();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string s = cell_text(row[i], kTableDigits);
      if (s.empty()) s = "-";
      width[i] = std::max(width[i], s.size());
      line.push_back(std::move(s));
    }
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += "  ";
      line += cells[i] + std::string(width[i] - cells[i].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << "\n";
  };
  emit(t.columns);
  for (const auto& line : text) emit(line);
}

Json cell_json(const Cell& c) {
  if (std::holds_alternative<double>(c)) return real(std::get<double>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<bool>(c)) return std::get<bool>(c);
  return nullptr;
}

Json rows_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json o;
    for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = cell_json(row[i]);
    rows.push_back(o);
  }
  return rows;
}

// Leaves of a JSON document as dotted key paths (arrays skipped).
void flatten(const Json& j, const std::string& prefix,
             std::vector<std::pair<std::string, Cell>>& out) {
  std::size_t index = 0;
  for (auto it = j.begin(); it != j.end(); ++it, ++index) {
    const std::string name = j.is_array() ? std::to_string(index) : it.key();
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    const Json& v = it.value();
    if ((v.is_object() || v.is_array()) && !v.empty()) {
      flatten(v, key, out);
    } else if (v.is_object() || v.is_array()) {
      out.emplace_back(key, std::monostate{});
    } else if (v.is_number()) {
      out.emplace_back(key, v.get<double>());
    } else if (v.is_boolean()) {
      out.emplace_back(key, v.get<bool>());
    } else if (v.is_string()) {
      out.emplace_back(key, v.get<std::string>());
    } else {
      out.emplace_back(key, std::monostate{});
    }
  }
}

void write_document(const Json& doc, Format format, std::ostream& out) {
  if (format == Format::Json) {
    out << doc.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, Cell>> leaves;
  flatten(doc, "", leaves);
  Table t;
  if (format == Format::Csv) {
    t.rows.emplace_back();
    for (auto& [k, v] : leaves) {
      t.columns.push_back(k);
      t.rows.back().push_back(v);
    }
    write_csv(t, out);
    return;
  }
  t.columns = {"key", "value"};
  for (auto& [k, v] : leaves) t.rows.push_back({k, v});
  write_aligned(t, out);
}

void write_table(const Json& head, const std::string& rows_key, const Table& t, Format format,
                 std::ostream& out) {
  if (format == Format::Json) {
    Json doc = head;
    doc[rows_key] = rows_json(t);
    out << doc.dump(2) << "\n";
  } else if (format == Format::Csv) {
    write_csv(t, out);
  } else {
    write_aligned(t, out);
  }
}

// ---- report sections -------------------------------------------------------------

Json verdict_json(const std::optional<Classification>& c) {
  return c ? Json(std::string(to_string(*c))) : Json(nullptr);
}

Json diagnostics_json(const EndpointDiagnostics& d) {
  Json j;
  j["endpoint"] = d.at_infinity ? "infinity" : "finite";
  j["method"] = d.method;
  j["exponent"] = real(d.exponent);
  j["exponent_spread"] = real(d.exponent_spread);
  j["exponent_verdict"] = verdict_json(d.exponent_verdict);
  j["window_log_ratio"] = real(d.window_log_ratio);
  j["window_spread"] = real(d.window_spread);
  j["log_exponent"] = real(d.log_exponent);
  j["window_verdict"] = verdict_json(d.window_verdict);
  j["verdict"] = verdict_json(d.verdict);
  j["summary"] = d.summary();
  return j;
}

Json deformation_json(const DeformationFunction& f) {
  Json j;
  j["expression"] = f.expression().to_string();
  j["half_width"] = real(f.half_width());
  j["user_domain"] = f.user_domain();
  j["scale"] = real(f.scale());
  const auto report = validate(f);
  j["validation"] = {{"samples", report.samples}, {"violations", report.violation_count}};
  return j;
}

Json convergence_json(const ConvergenceReport& c) {
  Json j;
  j["classification"] = to_string(c.classification);
  j["value"] = real(c.value);
  j["abs_error_estimate"] = c.value ? real(c.abs_error_estimate) : Json(nullptr);
  j["assumed"] = c.assumed;
  j["diagnostics"] = diagnostics_json(c.endpoint_diagnostics);
  return j;
}

Json minimal_length_json(const MinimalLengthResult& m) {
  Json j;
  j["l0"] = real(m.l0);
  j["case"] = to_string(m.map_case);
  j["beta"] = real(m.beta);
  j["integral"] = real(m.integral.value);
  j["target_g"] = m.map_case == MapCase::MappedToFlat
                      ? std::string("1")
                      : "1 + " + format_real(*m.beta, 17) + "*q^2";
  return j;
}

Json gup_json(const gup::GupBound& b, const MinimalLengthResult& m) {
  Json j;
  j["convex"] = b.convexity_verified;
  j["gup_bound"] = b.convexity_verified ? real(b.bound) : Json(nullptr);
  j["minimizer_s"] = b.convexity_verified ? real(b.minimizer_s) : Json(nullptr);
  j["minimizer"] = b.convexity_verified ? Json(std::string(gup::to_string(b.minimizer)))
                                        : Json(nullptr);
  j["ratio_to_l0"] = b.convexity_verified && m.l0 > 0 ? real(b.bound / m.l0) : Json(nullptr);
  j["convexity"] = {{"samples", b.convexity.samples},
                    {"s_min", real(b.convexity.s_min)},
                    {"s_max", real(b.convexity.s_max)},
                    {"worst_defect", real(b.convexity.worst_defect)},
                    {"worst_at", real(b.convexity.worst_at)},
                    {"tolerance", real(b.convexity.tolerance)}};
  return j;
}

Json spectral_json(const spectral::VerificationReport& v, double tolerance) {
  Json j;
  j["passed"] = v.passed;
  j["flat"] = v.flat;
  if (v.fine) {
    const auto& g = v.fine->grid;
    j["stretch"] = to_string(g.stretch);
    j["intervals"] = {g.intervals / 2, g.intervals};
    j["p_max"] = real(g.p_max);
    j["boundary_gap"] = real(g.boundary_gap);
  }
  j["l0"] = real(v.l0);
  if (!v.flat) {
    j["lambda_coarse"] = real(v.lambda_coarse);
    j["lambda_fine"] = real(v.lambda_fine);
    j["lambda_extrapolated"] = real(v.lambda_extrapolated);
    j["sqrt_lambda"] = real(v.sqrt_lambda);
    j["relative_error"] = real(v.relative_error);
    j["tolerance"] = real(tolerance);
  } else {
    Json levels = Json::array();
    for (std::size_t i = 0; i < v.flat_lambda.size(); ++i)
      levels.push_back({{"truncation", real(v.flat_p_max[i])}, {"lambda_min", real(v.flat_lambda[i])}});
    j["truncation_levels"] = levels;
  }
  j["even"] = v.even;
  j["nodeless"] = v.nodeless;
  if (v.fine) {
    const auto& g = v.fine->grid;
    const auto u = spectral::uncertainty_relation(g, spectral::build_x_squared(g), v.fine->eigenvector);
    j["uncertainty"] = {{"dispersion_x", real(u.dispersion_x)},
                        {"dispersion_p", real(u.dispersion_p)},
                        {"mean_f", real(u.mean_f)},
                        {"slack", real(u.slack)}};
  }
  j["detail"] = v.detail;
  return j;
}

// p samples p_j = P (2j/(N+1) - 1), j = 1..N, strictly inside (-P, P).
std::vector<double> sample_points(const DeformationFunction& f, int n, std::optional<double> p_max) {
  if (n < 1) throw InputError("--points must be positive");
  double P = p_max ? *p_max : f.bounded() ? f.half_width() : 4 * f.scale();
  if (!(P > 0)) throw InputError("--p-max must be positive");
  if (f.bounded() && P > f.half_width()) throw InputError("--p-max exceeds the domain half-width");
  std::vector<double> p(n);
  for (int j = 1; j <= n; ++j) {
    const int k = 2 * j - (n + 1);  // odd-symmetric integer numerator
    p[j - 1] = P * k / (n + 1);
  }
  return p;
}

MinimalLengthResult compute_minimal_length(const DeformationFunction& f, Assumption assume) {
  IntegrationOptions opt;
  opt.assume = assume;
  return minimal_length(f, opt);
}

}  // namespace

std::string_view to_string(Format f) {
  switch (f) {
    case Format::Json: return "json";
    case Format::Csv: return "csv";
    case Format::Table: return "table";
  }
  return "?";
}

std::string format_real(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

unsigned thread_count() {
  const char* env = std::getenv("MINDLEN_THREADS");
  if (env && *env) {
    unsigned n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec != std::errc() || ptr != end || n == 0)
      throw std::invalid_argument(std::string("MINDLEN_THREADS must be a positive integer, got '") +
                                  env + "'");
    return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---- analyze ---------------------------------------------------------------------

int cmd_analyze(const AnalysisRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(req.f_source.empty() ? req.preset : req.f_source, err, [&] {
    const Resolved r = resolve(req);
    const DeformationFunction f = make_function(r);

    Json doc;
    doc["schema"] = kSchema;
    doc["command"] = "analyze";
    doc["metadata"] = metadata(req, r);
    doc["deformation"] = deformation_json(f);

    MinimalLengthResult ml;
    try {
      ml = compute_minimal_length(f, req.assume);
    } catch (const AmbiguousClassification& e) {
      doc["convergence"] = {{"classification", "ambiguous"},
                            {"diagnostics", diagnostics_json(e.evidence())}};
      doc["status"] = "ambiguous";
      write_document(doc, req.format, out);
      err << "error: " << e.what() << "\n";
      return int(kAmbiguous);
    }
    doc["convergence"] = convergence_json(ml.integral);
    doc["minimal_length"] = minimal_length_json(ml);
    doc["gup"] = gup_json(gup::gup_bound(f), ml);

    int code = kOk;
    if (req.verify) {
      spectral::VerificationOptions vopt;
      vopt.intervals = req.grid;
      try {
        const auto v = spectral::verify_minimal_length(f, ml.l0, ml.integral.value, vopt);
        doc["spectral"] = spectral_json(v, vopt.rel_tol);
        if (!v.passed) code = kVerificationMismatch;
      } catch (const spectral::EigenError& e) {
        doc["spectral"] = {{"passed", false}, {"detail", e.what()}};
        code = kVerificationMismatch;
      }
    } else {
      doc["spectral"] = nullptr;
    }
    if (r.preset) {
      const double closed = r.preset->l0(r.params);
      doc["closed_form"] = {{"l0", real(closed)}, {"abs_diff", real(std::fabs(ml.l0 - closed))}};
    } else {
      doc["closed_form"] = nullptr;
    }
    doc["status"] = code == kOk ? "ok" : "verification_mismatch";
    write_document(doc, req.format, out);
    if (code != kOk) err << "error: spectral verification did not confirm l0\n";
    return code;
  });
}

// ---- sweep -----------------------------------------------------------------------

namespace {

struct Row {
  double value = 0.0;
  std::string classification;
  std::optional<double> l0, closed, abs_diff, sqrt_lambda;
  std::optional<bool> verified;
  std::string error;
};

Row sweep_row(const SweepRequest& req, const Resolved& base, double value) {
  Row row;
  row.value = value;
  Resolved r = base;
  r.params[req.param] = value;
  if (r.preset && !req.base.domain) r.domain = r.preset->domain(r.params);
  try {
    const DeformationFunction f = make_function(r);
    const auto ml = compute_minimal_length(f, req.base.assume);
    row.classification = to_string(ml.integral.classification);
    row.l0 = ml.l0;
    if (r.preset) {
      row.closed = r.preset->l0(r.params);
      row.abs_diff = std::fabs(ml.l0 - *row.closed);
    }
    if (req.base.verify) {
      spectral::VerificationOptions vopt;
      vopt.intervals = req.base.grid;
      const auto v = spectral::verify_minimal_length(f, ml.l0, ml.integral.value, vopt);
      if (!v.flat) row.sqrt_lambda = v.sqrt_lambda;
      row.verified = v.passed;
    }
  } catch (const AmbiguousClassification& e) {
    row.classification = "ambiguous";
    row.error = e.evidence().summary();
  } catch (const std::exception& e) {
    row.classification = "error";
    row.error = e.what();
  }
  return row;
}

}  // namespace

int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(req.base.f_source.empty() ? req.base.preset : req.base.f_source, err, [&] {
    if (req.param.empty()) throw InputError("--param is required");
    if (req.values.empty()) throw InputError("--values must not be empty");
    for (double v : req.values)
      if (!std::isfinite(v)) throw InputError("sweep values must be finite");
    AnalysisRequest probe = req.base;
    probe.params[req.param] = req.values.front();
    const Resolved base = resolve(probe);

    std::vector<Row> rows(req.values.size());
    const unsigned workers =
        std::min<unsigned>(thread_count(), static_cast<unsigned>(rows.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < rows.size();)
        rows[i] = sweep_row(req, base, req.values[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    Table t;
    t.columns = {req.param, "classification", "l0", "gamma_closed_form", "abs_diff"};
    if (req.base.verify) {
      t.columns.push_back("sqrt_lambda_min");
      t.columns.push_back("verified");
    }
    t.columns.push_back("error");
    auto opt = [](const std::optional<double>& v) -> Cell {
      return v ? Cell(*v) : Cell(std::monostate{});
    };
    bool all_verified = true;
    for (const auto& row : rows) {
      std::vector<Cell> cells{row.value, row.classification, opt(row.l0), opt(row.closed),
                              opt(row.abs_diff)};
      if (req.base.verify) {
        cells.push_back(opt(row.sqrt_lambda));
        cells.push_back(row.verified ? Cell(*row.verified) : Cell(std::monostate{}));
        if (row.verified && !*row.verified) all_verified = false;
      }
      cells.push_back(row.error.empty() ? Cell(std::monostate{}) : Cell(row.error));
      t.rows.push_back(std::move(cells));
    }

    Json head;
    head["schema"] = kSchema;
    head["command"] = "sweep";
    Json meta = metadata(req.base, base);
    meta["params"].erase(req.param);
    meta["sweep"] = {{"param", req.param}, {"count", req.values.size()}};
    head["metadata"] = meta;
    write_table(head, "rows", t, req.base.format, out);
    if (!all_verified) {
      err << "error: spectral verification failed on at least one row\n";
      return int(kVerificationMismatch);
    }
    return int(kOk);
  });
}

// ---- map -------------------------------------------------------------------------

int cmd_map(const MapRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(req.base.f_source.empty() ? req.base.preset : req.base.f_source, err, [&] {
    const Resolved r = resolve(req.base);
    const DeformationFunction f = make_function(r);
    const auto ml = compute_minimal_length(f, req.base.assume);
    const auto map = MomentumMap::build(f, ml);
    const auto ps = sample_points(f, req.points, req.p_max);

    Table t;
    t.comments = {"case: " + std::string(to_string(ml.map_case)),
                  "target_g: " + map.target_g(),
                  "beta: " + (ml.beta ? format_real(*ml.beta, kJsonDigits) : std::string("none")),
                  "target_half_width: inf"};
    t.columns = {"p", "q"};
    for (double p : ps) t.rows.push_back({p, map.forward(p)});

    Json head;
    head["schema"] = kSchema;
    head["command"] = "map";
    head["metadata"] = metadata(req.base, r);
    head["metadata"]["points"] = req.points;
    head["metadata"]["p_max"] = real(req.p_max);
    head["target"] = {{"case", to_string(ml.map_case)},
                      {"g", map.target_g()},
                      {"beta", real(ml.beta)},
                      {"half_width", real(map.target_half_width())},
                      {"l0", real(ml.l0)}};
    write_table(head, "points", t, req.base.format, out);
    return int(kOk);
  });
}

// ---- plot ------------------------------------------------------------------------

int cmd_plot(const PlotRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(req.base.f_source.empty() ? req.base.preset : req.base.f_source, err, [&] {
    const Resolved r = resolve(req.base);
    const DeformationFunction f = make_function(r);
    const auto ml = compute_minimal_length(f, req.base.assume);
    Table t;
    Json head;
    head["schema"] = kSchema;
    head["command"] = "plot";
    head["metadata"] = metadata(req.base, r);
    head["metadata"]["what"] = req.what;

    if (req.what == "eigenvector") {
      spectral::GridSpec spec;
      if (ml.map_case == MapCase::MappedToKempf) {
        spec = spectral::default_grid(f, req.base.grid, ml.integral.value);
      } else if (!f.bounded()) {
        spec.stretch = spectral::Stretch::Sinh;
        spec.intervals = req.base.grid;
        spec.p_max = req.p_max ? *req.p_max : 8 * f.scale();
      } else {
        spec = spectral::default_grid(f, req.base.grid, std::nullopt);
      }
      const auto s = spectral::solve(f, spec);
      const auto& g = s.grid;
      const std::size_t n = g.size();
      const std::size_t stride =
          std::max<std::size_t>(1, n / static_cast<std::size_t>(std::max(req.points, 1)));
      t.comments = {"lambda_min: " + format_real(s.lambda_min, kJsonDigits),
                    "stretch: " + std::string(to_string(g.stretch))};
      t.columns = {"p", "phi", "f"};
      // keep the centre node so the samples stay symmetric
      const std::size_t mid = n / 2;
      for (std::size_t i = mid % stride; i < n; i += stride)
        t.rows.push_back({g.points[i], s.eigenvector[i], g.f_nodes[i]});
      head["lambda_min"] = real(s.lambda_min);
    } else if (req.what == "map" || req.what == "integrand") {
      const auto map = MomentumMap::build(f, ml);
      const auto ps = sample_points(f, req.points, req.p_max);
      if (req.what == "map") {
        t.columns = {"p", "q", "F"};
        for (double p : ps) t.rows.push_back({p, map.forward(p), map.cumulative(p)});
      } else {
        t.columns = {"p", "inv_f", "F"};
        for (double p : ps) t.rows.push_back({p, 1.0 / f(p), map.cumulative(p)});
      }
    } else {
      throw InputError("--what must be eigenvector, map or integrand");
    }
    write_table(head, "rows", t, req.base.format, out);
    return int(kOk);
  });
}

}  // namespace mindlen::cli
