#pragma once

// Command-line front end: analyze, sweep, map and plot.

#include "mindlen/convergence.hpp"
#include "mindlen/expr.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mindlen::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kAmbiguous = 2,
  kVerificationMismatch = 3,
};

enum class Format { Json, Csv, Table };
std::string_view to_string(Format f);

constexpr int kJsonDigits = 15;
constexpr int kTableDigits = 8;

/// Named example family with its closed forms.
struct Preset {
  std::string name;
  std::string expression;
  expr::ParameterMap defaults;
  std::string description;
  /// Domain half-width implied by the parameters (finite families only).
  std::function<std::optional<double>(const expr::ParameterMap&)> domain;
  /// Closed-form l0 for the parameters.
  std::function<double(const expr::ParameterMap&)> l0;
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

struct AnalysisRequest {
  std::string f_source;
  std::string preset;  // empty: f_source is used
  expr::ParameterMap params;
  std::optional<double> domain;
  Assumption assume = Assumption::None;
  bool verify = false;
  int grid = 8192;
  Format format = Format::Json;
};

struct SweepRequest {
  AnalysisRequest base;
  std::string param;
  std::vector<double> values;
};

struct MapRequest {
  AnalysisRequest base;
  int points = 101;               // interior sample nodes
  std::optional<double> p_max;    // sampled range (-p_max, p_max)
};

struct PlotRequest {
  AnalysisRequest base;
  std::string what = "eigenvector";  // eigenvector | map | integrand
  int points = 201;
  std::optional<double> p_max;
};

int cmd_analyze(const AnalysisRequest& request, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepRequest& request, std::ostream& out, std::ostream& err);
int cmd_map(const MapRequest& request, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotRequest& request, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Sweep pool size: MINDLEN_THREADS when set (a positive integer), else the
/// hardware concurrency. Throws std::invalid_argument on a malformed value.
unsigned thread_count();

/// %.<digits>g with inf/nan spelled out.
std::string format_real(double v, int digits);

/// Closed-form l0 of the preset families; 0 where the integral diverges.
double power_plus_l0(double lambda, double alpha);
double power_minus_l0(double lambda, double alpha);
double gauss_l0(double lambda, double alpha);

}  // namespace mindlen::cli
