#include "doctest.h"

#include "json.hpp"
#include "mindlen/cli.hpp"
#include "oracles/gamma.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using Json = nlohmann::ordered_json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mindlen");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mindlen::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      csv.comments.push_back(line.substr(2));
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

std::size_t column(const Csv& csv, const std::string& name) {
  for (std::size_t i = 0; i < csv.header.size(); ++i)
    if (csv.header[i] == name) return i;
  FAIL("no column " << name);
  return 0;
}

// Structural equality with numbers compared to 1e-9 relative; free-text
// fields that embed formatted numbers only need to be present.
void compare_json(const Json& expected, const Json& actual, const std::string& path) {
  INFO("at ", path);
  REQUIRE(expected.type_name() == std::string(actual.type_name()));
  if (expected.is_object()) {
    std::vector<std::string> ek, ak;
    for (auto it = expected.begin(); it != expected.end(); ++it) ek.push_back(it.key());
    for (auto it = actual.begin(); it != actual.end(); ++it) ak.push_back(it.key());
    CHECK(ek == ak);
    for (auto it = expected.begin(); it != expected.end(); ++it)
      if (actual.contains(it.key())) compare_json(it.value(), actual[it.key()], path + "." + it.key());
  } else if (expected.is_array()) {
    REQUIRE(expected.size() == actual.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
      compare_json(expected[i], actual[i], path + "[" + std::to_string(i) + "]");
  } else if (expected.is_number()) {
    const double e = expected.get<double>(), a = actual.get<double>();
    CHECK(std::fabs(e - a) <= 1e-9 * std::max(std::fabs(e), std::fabs(a)) + 1e-300);
  } else if (path.size() >= 8 && (path.substr(path.size() - 8) == ".summary" ||
                                  path.substr(path.size() - 7) == ".detail")) {
    CHECK_FALSE(actual.get<std::string>().empty());
  } else {
    CHECK(expected == actual);
  }
}

struct Fixture {
  const char* name;
  std::vector<std::string> args;
  int code;
};

const std::vector<Fixture>& fixtures() {
  static const std::vector<Fixture> all{
      {"analyze_gauss_verify", {"analyze", "--preset", "gauss", "--verify"}, 0},
      {"analyze_exp_l_verify", {"analyze", "--f", "exp(l^2*p^2)", "-P", "l=1", "--verify"}, 0},
      {"analyze_flat", {"analyze", "--f", "1"}, 0},
      {"analyze_kempf_b4_verify", {"analyze", "--f", "1+b*p^2", "-P", "b=4", "--verify"}, 0},
      {"analyze_power_plus_075_verify",
       {"analyze", "--preset", "power-plus", "-P", "alpha=0.75", "--verify"}, 0},
      {"analyze_power_minus_025_verify",
       {"analyze", "--preset", "power-minus", "-P", "alpha=0.25", "--verify"}, 0},
      {"analyze_half_power", {"analyze", "--f", "(1+p^2)^0.5"}, 0},
      {"analyze_log_critical", {"analyze", "--f", "(1+p^2)^0.5*ln(2+p^2)"}, 2},
      {"analyze_coarse_mismatch", {"analyze", "--f", "(1+p^2)^0.75", "--verify", "--grid", "64"}, 3},
      {"sweep_power_plus",
       {"sweep", "--preset", "power-plus", "--over", "alpha", "--values",
        "0.3,0.6,0.75,1,1.25,1.5,2", "--format", "json"},
       0},
      {"sweep_power_minus_verify",
       {"sweep", "--preset", "power-minus", "--over", "alpha", "--values", "-1,-0.5,0,0.25,0.5,0.75,1,1.5",
        "--verify", "--grid", "1024", "--format", "json"},
       0},
      {"map_gauss", {"map", "--preset", "gauss", "--points", "11", "--format", "json"}, 0},
  };
  return all;
}

}  // namespace

TEST_CASE("exit codes for input errors") {
  const auto parse = run({"analyze", "--f", "1 + * p"});
  CHECK(parse.code == mindlen::cli::kInputError);
  CHECK(parse.err.find("1 + * p") != std::string::npos);
  CHECK(parse.err.find("    ^") != std::string::npos);
  CHECK(run({"analyze", "--f", "1+b*p^2"}).code == 1);                        // unbound parameter
  CHECK(run({"analyze", "--f", "1+p^2", "-P", "b=1"}).code == 1);             // unused parameter
  CHECK(run({"analyze", "--f", "1+p^3"}).code == 1);                          // not even
  CHECK(run({"analyze", "--f", "1+p^2", "--preset", "gauss"}).code == 1);     // both sources
  CHECK(run({"analyze", "--preset", "nope"}).code == 1);
  CHECK(run({"analyze", "--f", "1+p^2", "--grid", "100"}).code == 1);
  CHECK(run({"analyze", "--f", "1+p^2", "--grid", "32"}).code == 1);
  CHECK(run({"analyze", "--f", "1+p^2", "-P", "x"}).code == 1);
  CHECK(run({"analyze", "--f", "1+b*p^2", "-P", "b=abc"}).code == 1);
  CHECK(run({"analyze", "--f", "1+p^2", "--domain", "-1"}).code == 1);
  CHECK(run({"analyze", "--f", "1+p^2", "--format", "xml"}).code == 1);
  CHECK(run({"analyze", "--bogus"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"sweep", "--f", "1+b*p^2", "--over", "b"}).code == 1);  // no values
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("exit codes for ambiguity and verification mismatch") {
  const auto amb = run({"analyze", "--f", "(1+p^2)^0.5*ln(2+p^2)"});
  CHECK(amb.code == mindlen::cli::kAmbiguous);
  CHECK(Json::parse(amb.out)["status"] == "ambiguous");
  CHECK(amb.err.find("--assume") != std::string::npos);
  CHECK(run({"analyze", "--f", "(1+p^2)^0.5*ln(2+p^2)", "--assume", "divergent"}).code == 0);
  CHECK(run({"map", "--f", "(1+p^2)^0.5*ln(2+p^2)"}).code == 2);

  const auto bad = run({"analyze", "--f", "(1+p^2)^0.75", "--verify", "--grid", "64"});
  CHECK(bad.code == mindlen::cli::kVerificationMismatch);
  const auto doc = Json::parse(bad.out);
  CHECK(doc["status"] == "verification_mismatch");
  CHECK(doc["spectral"]["passed"] == false);
}

TEST_CASE("analyze reports the documented values") {
  const auto r = run({"analyze", "--f", "exp(l^2*p^2)", "-P", "l=1", "--verify"});
  REQUIRE(r.code == 0);
  const auto doc = Json::parse(r.out);
  CHECK(doc["schema"] == "mindlen/1");
  const double l0 = doc["minimal_length"]["l0"].get<double>();
  CHECK(std::fabs(l0 - std::sqrt(M_PI)) <= 1e-12 * l0);
  CHECK(doc["spectral"]["passed"] == true);
  CHECK(std::fabs(doc["spectral"]["sqrt_lambda"].get<double>() - l0) <= 1e-4 * l0);
  CHECK(std::fabs(doc["gup"]["gup_bound"].get<double>() - std::sqrt(M_E / 2)) <= 1e-12);

  const auto flat = Json::parse(run({"analyze", "--f", "1"}).out);
  CHECK(flat["minimal_length"]["l0"].get<double>() == 0);
  CHECK(flat["minimal_length"]["case"] == "flat");
}

TEST_CASE("JSON reals carry 15 significant digits") {
  const auto r = run({"analyze", "--preset", "gauss"});
  CHECK(r.out.find("\"l0\": 1.77245385090552,") != std::string::npos);
  const auto t = run({"analyze", "--preset", "gauss", "--format", "table"});
  CHECK(t.out.find("1.7724539") != std::string::npos);
  CHECK(t.out.find("1.77245385090552") == std::string::npos);
}

TEST_CASE("golden outputs") {
  const bool update = std::getenv("MINDLEN_UPDATE_GOLDEN") != nullptr;
  for (const auto& fx : fixtures()) {
    INFO(std::string(fx.name));
    const auto r = run(fx.args);
    CHECK(r.code == fx.code);
    const std::string path = std::string(MINDLEN_GOLDEN_DIR) + "/" + fx.name + ".json";
    if (update) {
      std::ofstream(path) << r.out;
      continue;
    }
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing golden file " << path);
    const Json expected = Json::parse(in);
    compare_json(expected, Json::parse(r.out), "");
  }
}

TEST_CASE("reruns are bit-identical, independent of the worker count") {
  for (const auto& fx : fixtures()) {
    INFO(std::string(fx.name));
    CHECK(run(fx.args).out == run(fx.args).out);
  }
  const std::vector<std::string> sweep{"sweep", "--preset", "power-plus", "--over", "alpha",
                                       "--values", "0.6,0.75,1,1.25,1.5,2", "--format", "csv"};
  setenv("MINDLEN_THREADS", "1", 1);
  const auto one = run(sweep);
  setenv("MINDLEN_THREADS", "4", 1);
  const auto four = run(sweep);
  CHECK(one.code == 0);
  CHECK(one.out == four.out);
  setenv("MINDLEN_THREADS", "zero", 1);
  CHECK(run(sweep).code == 1);
  unsetenv("MINDLEN_THREADS");
}

TEST_CASE("sweep rows match the closed forms") {
  const auto plus = parse_csv(run({"sweep", "--preset", "power-plus", "--over", "alpha", "--values",
                                   "0.1,0.2,0.3,0.4,0.5,0.6,0.75,1,1.25,1.5,2", "--format", "csv"})
                                  .out);
  REQUIRE(plus.rows.size() == 11);
  const auto ia = column(plus, "alpha"), ic = column(plus, "classification"), il = column(plus, "l0");
  for (const auto& row : plus.rows) {
    const double alpha = std::stod(row[ia]);
    INFO("alpha ", alpha);
    if (alpha <= 0.5) {
      CHECK(row[ic] == "divergent");
      CHECK(std::stod(row[il]) == 0);
    } else {
      CHECK(row[ic] == "finite");
      const double expected = oracle::power_plus_l0(alpha);
      CHECK(std::fabs(std::stod(row[il]) - expected) <= 1e-8 * expected);
    }
  }

  const auto minus = parse_csv(run({"sweep", "--preset", "power-minus", "--over", "alpha", "--values",
                                    "-1,-0.5,0,0.25,0.5,0.75,1,1.5,2", "--format", "csv"})
                                   .out);
  REQUIRE(minus.rows.size() == 9);
  for (const auto& row : minus.rows) {
    const double alpha = std::stod(row[column(minus, "alpha")]);
    const double l0 = std::stod(row[column(minus, "l0")]);
    INFO("alpha ", alpha);
    if (alpha >= 1) {
      CHECK(row[column(minus, "classification")] == "divergent");
      CHECK(l0 == 0);
    } else {
      const double expected = oracle::power_minus_l0(alpha);
      CHECK(std::fabs(l0 - expected) <= 1e-8 * expected);
      CHECK(std::fabs(std::stod(row[column(minus, "abs_diff")])) <= 1e-8 * expected);
    }
  }
}

TEST_CASE("sweep records per-row errors and keeps going") {
  const auto r = run({"sweep", "--f", "b+p^2", "--over", "b", "--values", "1,-1,4", "--format", "csv"});
  CHECK(r.code == 0);
  const auto csv = parse_csv(r.out);
  REQUIRE(csv.rows.size() == 3);
  CHECK(csv.rows[0][column(csv, "error")].empty());
  CHECK_FALSE(csv.rows[1][column(csv, "error")].empty());
  CHECK(std::stod(csv.rows[2][column(csv, "l0")]) == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("map output") {
  const auto kempf = parse_csv(run({"map", "--f", "1+p^2", "--points", "41"}).out);
  REQUIRE(kempf.header == std::vector<std::string>{"p", "q"});
  REQUIRE(kempf.rows.size() == 41);
  for (const auto& row : kempf.rows)
    CHECK(std::fabs(std::stod(row[0]) - std::stod(row[1])) <= 1e-9 * std::max(1.0, std::fabs(std::stod(row[0]))));

  const auto gauss = parse_csv(run({"map", "--preset", "gauss", "--points", "51"}).out);
  REQUIRE(gauss.rows.size() == 51);
  bool saw_zero = false;
  double previous = -HUGE_VAL;
  for (const auto& row : gauss.rows) {
    const double p = std::stod(row[0]), q = std::stod(row[1]);
    if (p == 0) {
      saw_zero = true;
      CHECK(q == 0);
    }
    CHECK(q > previous);
    previous = q;
  }
  CHECK(saw_zero);
  bool has_case = false;
  for (const auto& c : gauss.comments) has_case |= c == "case: kempf";
  CHECK(has_case);
}

TEST_CASE("CSV outputs start with a header row") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"analyze", "--preset", "gauss", "--format", "csv"},
        std::vector<std::string>{"map", "--preset", "power-minus"},
        std::vector<std::string>{"plot", "--preset", "gauss", "--what", "eigenvector"},
        std::vector<std::string>{"plot", "--preset", "gauss", "--what", "integrand"},
        std::vector<std::string>{"plot", "--preset", "gauss", "--what", "map"},
        std::vector<std::string>{"sweep", "--preset", "gauss", "--over", "l", "--values", "0.5,1,2",
                                 "--format", "csv"}}) {
    const auto r = run(args);
    INFO(args[0], " ", args.back());
    CHECK(r.code == 0);
    const auto csv = parse_csv(r.out);
    CHECK_FALSE(csv.header.empty());
    REQUIRE_FALSE(csv.rows.empty());
    for (const auto& row : csv.rows) CHECK(row.size() == csv.header.size());
    for (const auto& h : csv.header) CHECK_FALSE(h.empty());
  }
}

TEST_CASE("closed forms of the presets") {
  CHECK(mindlen::cli::gauss_l0(2.0, 1.0) == doctest::Approx(2 * std::sqrt(M_PI)).epsilon(1e-15));
  CHECK(mindlen::cli::gauss_l0(1.0, -1.0) == 0);
  for (double alpha : {0.6, 0.75, 1.0, 2.0, 3.5})
    CHECK(mindlen::cli::power_plus_l0(1.0, alpha) ==
          doctest::Approx(oracle::power_plus_l0(alpha)).epsilon(1e-13));
  for (double alpha : {-1.0, -0.5, 0.0, 0.25, 0.75})
    CHECK(mindlen::cli::power_minus_l0(1.0, alpha) ==
          doctest::Approx(oracle::power_minus_l0(alpha)).epsilon(1e-13));
  CHECK(mindlen::cli::find_preset("gauss") != nullptr);
  CHECK(mindlen::cli::find_preset("power-plus") != nullptr);
  CHECK(mindlen::cli::find_preset("power-minus") != nullptr);
  CHECK(mindlen::cli::find_preset("other") == nullptr);
}
