#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ifem/errors.hpp"
#include "ifem/study.hpp"

using namespace ifem;

namespace {

StudyConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

StudyConfig small(std::vector<Method> methods, const std::string& problem = "interface1d") {
  StudyConfig cfg;
  cfg.problem.name = problem;
  cfg.problem.jump = 100.0;
  cfg.methods = std::move(methods);
  cfg.levels = 3;
  cfg.base_n = 4;
  return cfg;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

}  // namespace

TEST_CASE("config sections, aliases and comments") {
  const auto cfg = parse(
      "# study\n"
      "[problem]\n"
      "name = kellogg\n"
      "s = 0.25   ; singular exponent\n"
      "[study]\n"
      "methods = cr, dg1\n"
      "levels = 5\n"
      "gamma = 12\n"
      "[output]\n"
      "format = json\n");
  CHECK(cfg.problem.name == "kellogg");
  CHECK(cfg.problem.s == 0.25);
  CHECK(cfg.methods == std::vector<Method>{Method::cr, Method::dg1});
  CHECK(cfg.levels == 5);
  CHECK(*cfg.gamma == 12.0);
  CHECK(cfg.format == OutputFormat::json);
  CHECK_NOTHROW(cfg.validate());

  const auto flat = parse("problem = smooth\nlevels = 3\nsweep = 1, 10\n");
  CHECK(flat.problem.name == "smooth");
  CHECK(flat.levels == 3);
  CHECK(flat.jump_sweep == std::vector<double>{1.0, 10.0});
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(parse("[study]\nlevles = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("[study\n"), ConfigError);
  CHECK_THROWS_AS(parse("levels 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("[study]\nlevels = four\n"), ConfigError);
  CHECK_THROWS_AS(parse("[study]\nmethods = p1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[output]\nformat = xml\n"), ConfigError);
  CHECK_THROWS_AS(parse("[problem]\nbox = 0, 0.5, 0, 1, 3\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/ifem.cfg"), ConfigError);

  CHECK_THROWS_AS(parse("[study]\nlevels = 2\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("[study]\ngamma = 1\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("[study]\nmethods = cr, cr\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("[problem]\nname = kellogg\ns = 1.5\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("[study]\nsweep = 1, -3\n").validate(), ConfigError);
  CHECK_THROWS_AS(parse("[problem]\nname = piecewise_linear\n[study]\nmethods = mixed0\n").validate(), ConfigError);
}

TEST_CASE("custom coefficient layout") {
  const auto cfg = parse(
      "[problem]\n"
      "name = custom\n"
      "background = 1\n"
      "box = 0, 0.5, 0, 0.5, 1000\n"
      "box = 0.5, 1, 0.5, 1, 1000\n"
      "[study]\n"
      "methods = conforming1, cr\n"
      "levels = 3\n"
      "base_n = 4\n");
  REQUIRE(cfg.problem.custom_layout.has_value());
  CHECK(cfg.problem.custom_layout->values == std::vector<double>{1.0, 1000.0, 1000.0});
  const auto r = run_convergence(cfg);
  CHECK(r.reference_mode);
  CHECK(r.methods.size() == 2);
  CHECK_FALSE(r.qma_satisfied);

  CHECK_THROWS_AS(parse("[problem]\nname = custom\nbackground = -1\n[study]\nmethods = cr\n").validate(),
                  DomainError);
}

TEST_CASE("convergence table schema") {
  const auto r = run_convergence(small({Method::mixed0, Method::dg1, Method::cr}));
  const Table t = convergence_table(r, false);
  CHECK(t.columns == std::vector<std::string>{"problem", "method", "level", "h_max", "n_dofs", "energy_err",
                                              "jump_seminorm", "dg_err", "flux_err", "osc", "rate_energy",
                                              "rate_flux", "solver_iters", "solve_seconds"});
  const std::string csv = to_csv(t);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  bool saw_mixed = false;
  bool saw_dg = false;
  while (std::getline(lines, line)) {
    const auto cells = split_csv_line(line);
    REQUIRE(cells.size() == t.columns.size());
    CHECK(cells[13].empty());
    if (cells[1] == "mixed0" && cells[2] != "fit") {
      saw_mixed = true;
      CHECK_FALSE(cells[8].empty());
      CHECK(cells[5].empty());
      CHECK(cells[6].empty());
      CHECK(cells[7].empty());
    }
    if (cells[1] == "dg1" && cells[2] != "fit") {
      saw_dg = true;
      CHECK_FALSE(cells[6].empty());
      CHECK_FALSE(cells[7].empty());
      CHECK(cells[8].empty());
    }
  }
  CHECK(saw_mixed);
  CHECK(saw_dg);
  for (const auto& mr : r.methods) {
    for (const auto& lr : mr.levels) {
      if (lr.conservation) {
        CHECK(*lr.conservation < 1e-8);
      }
    }
  }
}

TEST_CASE("output is deterministic and CSV matches JSON") {
  auto cfg = small({Method::conforming1, Method::cr, Method::dg2});
  const std::string a = to_csv(convergence_table(run_convergence(cfg), false));
  cfg.threads = 1;
  const std::string b = to_csv(convergence_table(run_convergence(cfg), false));
  CHECK(a == b);

  const Table t = convergence_table(run_convergence(cfg), false);
  const auto j = nlohmann::json::parse(to_json(t));
  REQUIRE(j["rows"].size() == t.rows.size());
  CHECK(j["columns"].size() == t.columns.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      const auto& v = j["rows"][r][t.columns[c]];
      const Cell& cell = t.rows[r][c];
      if (std::holds_alternative<std::monostate>(cell)) {
        CHECK(v.is_null());
      } else if (std::holds_alternative<double>(cell)) {
        CHECK(v.get<double>() == std::stod(format_cell(cell)));
      } else if (std::holds_alternative<long long>(cell)) {
        CHECK(v.get<long long>() == std::get<long long>(cell));
      } else {
        CHECK(v.get<std::string>() == std::get<std::string>(cell));
      }
    }
  }
}

TEST_CASE("csv escaping and cell formatting") {
  Table t{{"a", "b"}, {{std::string("x,y"), 1.5}, {std::string("q\"r"), std::monostate{}}}};
  CHECK(to_csv(t) == "a,b\n\"x,y\",1.500000000000e+00\n\"q\"\"r\",\n");
  CHECK(format_cell(Cell{42LL}) == "42");
  CHECK(format_cell(Cell{}).empty());
}

TEST_CASE("jump sweep") {
  auto cfg = small({Method::conforming1, Method::cr});
  cfg.jump_sweep = {1e3};
  const auto one = run_jump_sweep(cfg);
  REQUIRE(one.runs.size() == 1);
  CHECK(one.runs[0].jump == 1e3);

  cfg.jump_sweep = {1.0, 1e4};
  const auto two = run_jump_sweep(cfg);
  REQUIRE(two.runs.size() == 2);
  const Table t = sweep_table(two);
  CHECK(t.rows.size() == 4);
  const auto ratios = comparison_ratios(two.runs[1]);
  CHECK(ratios.size() == 3);

  cfg.jump_sweep.clear();
  CHECK_THROWS_AS(run_jump_sweep(cfg), ConfigError);
  cfg.jump_sweep = {10.0};
  cfg.problem.name = "smooth";
  CHECK_THROWS_AS(run_jump_sweep(cfg), ConfigError);
}

TEST_CASE("verify report") {
  StudyConfig cfg;
  const auto report = run_verify(cfg);
  CHECK(report.passed());
  CHECK(report.invariants.size() >= 8);
  CHECK(invariant_names().size() == report.invariants.size());
  for (const auto& inv : report.invariants) {
    INFO(inv.name << ": " << inv.detail);
    CHECK(inv.passed);
  }

  cfg.test_weight_fault = 0.01;
  const auto faulty = run_verify(cfg);
  CHECK_FALSE(faulty.passed());
  for (const auto& inv : faulty.invariants) {
    if (inv.name == "weight_normalization") {
      CHECK_FALSE(inv.passed);
    }
  }
  CHECK(verify_table(faulty).rows.size() == faulty.invariants.size());
}

TEST_CASE("thread cap from the environment") {
  StudyConfig cfg;
  cfg.threads = 8;
  ::setenv("INTERFACE_FEM_THREADS", "2", 1);
  CHECK(worker_count(cfg, 100) == 2);
  CHECK(worker_count(cfg, 1) == 1);
  ::setenv("INTERFACE_FEM_THREADS", "0", 1);
  CHECK_THROWS_AS(worker_count(cfg, 10), ConfigError);
  ::unsetenv("INTERFACE_FEM_THREADS");
  CHECK(worker_count(cfg, 100) == 8);
}

TEST_CASE("plot files") {
  auto cfg = small({Method::cr});
  const auto dir = std::filesystem::temp_directory_path() / "ifem_plot_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  cfg.plot_dir = dir.string();
  write_plot_files(run_convergence(cfg), cfg.plot_dir);
  CHECK(std::filesystem::exists(dir / "interface1d_cr.dat"));
  CHECK(std::filesystem::exists(dir / "interface1d_cr_elements.dat"));
  std::filesystem::remove_all(dir);
}
