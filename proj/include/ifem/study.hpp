#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ifem/analysis.hpp"
#include "ifem/assembly.hpp"
#include "ifem/problems.hpp"

namespace ifem {

enum class Method { conforming1, conforming2, cr, mixed0, dg1, dg2 };

std::string method_name(Method m);
/// Throws ConfigError for unknown names.
Method parse_method(const std::string& name);
/// Polynomial degree entering osc_alpha for the method.
int method_degree(Method m);
bool is_dg(Method m);

enum class OutputFormat { csv, json };

struct StudyConfig {
  ProblemRequest problem;
  std::vector<Method> methods{Method::conforming1, Method::cr, Method::mixed0, Method::dg1};
  int levels = 4;
  int base_n = 8;                // cells per side on level 0
  std::optional<double> gamma;   // DG penalty; default per degree
  std::vector<double> jump_sweep;
  std::string output;            // empty writes to stdout
  OutputFormat format = OutputFormat::csv;
  std::uint64_t seed = 1;
  bool timings = false;          // solve_seconds is left empty otherwise, keeping output reproducible
  int threads = 0;               // 0: hardware concurrency, capped by INTERFACE_FEM_THREADS
  std::string plot_dir;          // gnuplot data files, optional
  // test-mode switches for negative controls
  FaceAverage test_penalty = FaceAverage::harmonic;
  FaceAverage test_weights = FaceAverage::harmonic;
  double test_weight_fault = 0.0;  // added to w^- in the weight invariants

  /// Throws ConfigError.
  void validate() const;
  DgParameters dg_parameters(int degree) const;
};

/// Reads flat key=value lines with optional [section] headers into `base`.
/// '#' and ';' start comments. Throws ConfigError on unknown keys or bad values.
StudyConfig parse_config(std::istream& in, StudyConfig base = {});
StudyConfig load_config(const std::string& path, StudyConfig base = {});

struct ElementError {
  Point centroid;
  double error;
};

/// Results of one method on one level.
struct LevelResult {
  int level = 0;
  double h_max = 0.0;
  int n_dofs = 0;
  std::optional<double> energy;
  std::optional<double> jump;
  std::optional<double> dg;
  std::optional<double> flux;
  std::optional<double> osc;
  std::optional<double> interpolant;    // same norm, applied to the canonical interpolant
  std::optional<double> conservation;   // mixed: max_K |div sigma_h - Q0 f|
  int iterations = 0;
  double solve_seconds = 0.0;
  std::vector<ElementError> element_errors;  // finest level, when plot files are requested

  /// Error in the method's own norm: energy, DG norm or flux.
  std::optional<double> principal(Method m) const;
  /// error / (interpolant + osc) for CR and DG, error / interpolant otherwise.
  std::optional<double> quasi_optimality(Method m) const;
};

struct MethodResult {
  Method method;
  std::vector<LevelResult> levels;
  std::optional<RateTable> rates;  // principal error

  std::optional<double> asymptotic_rate() const { return rates ? rates->asymptotic : std::nullopt; }
};

struct StudyResult {
  std::string problem;
  double jump = 1.0;
  bool reference_mode = false;  // errors against a refined P2 solution
  bool qma_satisfied = true;
  std::vector<MethodResult> methods;

  const MethodResult* find(Method m) const;
};

/// CR error / (conforming P1 error + osc) on each level, if both methods ran.
std::vector<double> comparison_ratios(const StudyResult& r);

/// Uniform refinement study. Throws SolverError if a solve does not converge and
/// ConfigError for unsupported combinations.
StudyResult run_convergence(const StudyConfig& cfg);

struct SweepResult {
  std::vector<StudyResult> runs;  // one per jump, in sweep order
};
SweepResult run_jump_sweep(const StudyConfig& cfg);

struct InvariantResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};
struct VerifyReport {
  std::vector<InvariantResult> invariants;
  bool passed() const;
};
/// Runs every registered invariant family with the config seed.
VerifyReport run_verify(const StudyConfig& cfg);
/// Names of the registered invariant families.
std::vector<std::string> invariant_names();

/// Flat table shared by the CSV and JSON writers.
using Cell = std::variant<std::monostate, long long, double, std::string>;
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};
Table convergence_table(const StudyResult& r, bool timings);
Table sweep_table(const SweepResult& r);
Table verify_table(const VerifyReport& r);

/// Doubles are printed as {:.12e}; empty cells stay empty.
std::string format_cell(const Cell& c);
std::string to_csv(const Table& t);
/// Numbers carry exactly the values printed in the CSV.
std::string to_json(const Table& t);
std::string render(const Table& t, OutputFormat format);

/// One whitespace-separated file per method (h and errors), plus per-element
/// errors of the finest level.
void write_plot_files(const StudyResult& r, const std::string& dir);

/// Worker count: cfg.threads (or hardware concurrency), capped by INTERFACE_FEM_THREADS.
int worker_count(const StudyConfig& cfg, int tasks);

}  // namespace ifem
