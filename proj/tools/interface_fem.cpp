#include <fstream>
#include <sstream>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "ifem/errors.hpp"
#include "ifem/study.hpp"

using namespace ifem;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, solver_failure = 3 };

void emit(const StudyConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) {
    throw ConfigError(fmt::format("cannot write '{}'", cfg.output));
  }
  out << text;
}

void summarize(const StudyResult& r) {
  std::cerr << fmt::format("{} (jump {:g}){}{}\n", r.problem, r.jump, r.reference_mode ? ", reference solution" : "",
                           r.qma_satisfied ? "" : ", QMA violated");
  for (const auto& mr : r.methods) {
    const auto rate = mr.asymptotic_rate();
    std::cerr << fmt::format("  {:<12} rate {}\n", method_name(mr.method), rate ? fmt::format("{:.3f}", *rate) : "-");
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Finite element convergence and robustness studies for diffusion with discontinuous coefficients"};
  std::string config_path;
  std::string problem, methods, format, out, pattern, sweep, plot_dir, penalty_avg, weight_avg;
  int levels = 0, base_n = 0, threads = 0;
  double gamma = 0.0, jump = 0.0, s = 0.0, weight_fault = 0.0;
  std::uint64_t seed = 1;
  bool verify = false, timings = false;

  app.add_option("--config", config_path, "key=value config file; flags override its values");
  app.add_option("--problem", problem, "smooth, interface1d, piecewise_linear, kellogg, nonqma, custom");
  app.add_option("--method", methods, "comma-separated subset of conforming1, conforming2, cr, mixed0, dg1, dg2");
  app.add_option("--levels", levels, "number of uniform levels (at least 3)");
  app.add_option("--base-n", base_n, "cells per side on the coarsest level");
  app.add_option("--gamma", gamma, "DG penalty parameter");
  app.add_option("--jump", jump, "coefficient jump of the problem");
  app.add_option("--s", s, "Kellogg singular exponent in (0, 1)");
  app.add_option("--pattern", pattern, "non-QMA layout: checkerboard4 or checkerboard8");
  app.add_option("--sweep", sweep, "comma-separated jumps; runs a robustness sweep");
  app.add_option("--out", out, "output file (stdout if absent)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "seed for sampled invariants");
  app.add_flag("--verify", verify, "run the invariant suite");
  app.add_flag("--timings", timings, "fill the solve_seconds column");
  app.add_option("--threads", threads, "worker threads (INTERFACE_FEM_THREADS caps this)");
  app.add_option("--plot-dir", plot_dir, "directory for gnuplot data files");
  app.add_option("--test-penalty", penalty_avg, "test mode: harmonic or arithmetic penalty average");
  app.add_option("--test-weights", weight_avg, "test mode: harmonic or arithmetic flux weights");
  app.add_option("--test-weight-fault", weight_fault, "test mode: offset added to w^- in the weight invariants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    StudyConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path, cfg);
    }
    // flags are applied as config lines so they share the file's validation
    std::string overrides;
    auto set = [&](const char* flag, const std::string& key, const std::string& value) {
      if (app.count(flag) > 0) {
        overrides += key + " = " + value + "\n";
      }
    };
    set("--problem", "problem.name", problem);
    set("--method", "study.methods", methods);
    set("--levels", "study.levels", std::to_string(levels));
    set("--base-n", "study.base_n", std::to_string(base_n));
    set("--gamma", "study.gamma", fmt::format("{:.17g}", gamma));
    set("--jump", "problem.jump", fmt::format("{:.17g}", jump));
    set("--s", "problem.s", fmt::format("{:.17g}", s));
    set("--pattern", "problem.pattern", pattern);
    set("--sweep", "study.sweep", sweep);
    set("--out", "output.path", out);
    set("--format", "output.format", format);
    set("--seed", "study.seed", std::to_string(seed));
    set("--threads", "study.threads", std::to_string(threads));
    set("--plot-dir", "output.plot_dir", plot_dir);
    set("--test-penalty", "test.penalty", penalty_avg);
    set("--test-weights", "test.weights", weight_avg);
    set("--test-weight-fault", "test.weight_fault", fmt::format("{:.17g}", weight_fault));
    if (timings) {
      overrides += "output.timings = true\n";
    }
    std::istringstream in(overrides);
    cfg = parse_config(in, cfg);

    if (verify) {
      const VerifyReport report = run_verify(cfg);
      for (const auto& inv : report.invariants) {
        std::cerr << fmt::format("{} {:<24} worst {:.3e} (threshold {:.3e}) {:.2f}s{}\n", inv.passed ? "PASS" : "FAIL",
                                 inv.name, inv.worst, inv.threshold, inv.seconds,
                                 inv.detail.empty() ? "" : "  " + inv.detail);
      }
      emit(cfg, render(verify_table(report), cfg.format));
      return report.passed() ? ok : failure;
    }
    if (!cfg.jump_sweep.empty()) {
      const SweepResult r = run_jump_sweep(cfg);
      for (const auto& run : r.runs) {
        summarize(run);
      }
      emit(cfg, render(sweep_table(r), cfg.format));
      return ok;
    }
    const StudyResult r = run_convergence(cfg);
    summarize(r);
    emit(cfg, render(convergence_table(r, cfg.timings), cfg.format));
    if (!cfg.plot_dir.empty()) {
      write_plot_files(r, cfg.plot_dir);
    }
    return ok;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return solver_failure;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const AlignmentError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const ParameterError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
