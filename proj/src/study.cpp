#include "ifem/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "ifem/errors.hpp"
#include "ifem/solvers.hpp"
#include "json.hpp"

namespace ifem {

namespace {

constexpr std::array<Method, 6> kAllMethods{Method::conforming1, Method::conforming2, Method::cr,
                                            Method::mixed0,      Method::dg1,         Method::dg2};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("'{}' expects a number, got '{}'", key, value));
  }
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw ConfigError(fmt::format("'{}' expects an integer, got '{}'", key, value));
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") {
    return true;
  }
  if (value == "false" || value == "0" || value == "no" || value == "off") {
    return false;
  }
  throw ConfigError(fmt::format("'{}' expects true or false, got '{}'", key, value));
}

std::vector<double> parse_reals(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) {
    out.push_back(parse_real(key, item));
  }
  return out;
}

Rectangle parse_rectangle(const std::string& key, const std::vector<double>& v) {
  if (v.size() < 4 || !(v[1] > v[0]) || !(v[3] > v[2])) {
    throw ConfigError(fmt::format("'{}' expects x0, x1, y0, y1 with x0 < x1 and y0 < y1", key));
  }
  return {v[0], v[1], v[2], v[3]};
}

FaceAverage parse_average(const std::string& key, const std::string& value) {
  if (value == "harmonic") {
    return FaceAverage::harmonic;
  }
  if (value == "arithmetic") {
    return FaceAverage::arithmetic;
  }
  throw ConfigError(fmt::format("'{}' expects harmonic or arithmetic, got '{}'", key, value));
}

const std::map<std::string, std::string>& key_aliases() {
  static const std::map<std::string, std::string> aliases{
      {"problem", "problem.name"},   {"jump", "problem.jump"},         {"s", "problem.s"},
      {"pattern", "problem.pattern"}, {"method", "study.methods"},     {"methods", "study.methods"},
      {"study.method", "study.methods"}, {"levels", "study.levels"},   {"base_n", "study.base_n"},
      {"gamma", "study.gamma"},      {"sweep", "study.sweep"},         {"seed", "study.seed"},
      {"threads", "study.threads"},  {"out", "output.path"},           {"format", "output.format"},
      {"timings", "output.timings"}, {"plot_dir", "output.plot_dir"},
  };
  return aliases;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// Runs fn(i) for i in [0, n) on `workers` threads; rethrows the first failure by index.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  for (const auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

SolveResult checked_solve(const SparseSystem& sys, Method m, int level) {
  SolveResult r = solve(sys);
  if (!r.report.converged) {
    throw SolverError(fmt::format("{} on level {}: no convergence after {} iterations (relative residual {:.3e})",
                                  method_name(m), level, r.report.iterations, r.report.final_residual));
  }
  return r;
}

struct LevelData {
  const Mesh* mesh;
  const CoefficientField* alpha;
  FaceCoefficients faces;
};

struct Reference {
  std::unique_ptr<Mesh> mesh;
  CoefficientField alpha;
  std::unique_ptr<FeFunction> u;
  int finest_level;  // refinements from the finest study level
};

LevelResult run_level(Method m, const ProblemSpec& p, const StudyConfig& cfg, const LevelData& d, int level,
                      const Reference* ref, int levels_to_ref, bool element_errors) {
  const Mesh& mesh = *d.mesh;
  const CoefficientField& alpha = *d.alpha;
  const ErrorQuadrature quad = p.error_quadrature();
  LevelResult out;
  out.level = level;
  out.h_max = mesh.max_diameter();
  out.osc = oscillation(mesh, alpha, p.f, method_degree(m));

  auto finish_solve = [&](const SolveResult& r, const Timer& t) {
    out.iterations = r.report.iterations;
    out.solve_seconds = t.seconds();
  };

  if (m == Method::mixed0) {
    const MixedSystem sys = assemble_mixed(mesh, alpha, p.f);
    out.n_dofs = sys.system.size();
    const Timer t;
    const SolveResult r = checked_solve(sys.system, m, level);
    finish_solve(r, t);
    const auto [sigma, u] = sys.split(r.x);
    double defect = 0.0;
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      const double area = mesh.triangle(k).area;
      defect = std::max(defect, std::abs(sigma.divergence(k) - sys.system.rhs[sys.system.n_flux + k] / area));
    }
    out.conservation = defect;
    if (ref) {
      out.flux = nested_flux_difference(sigma, *ref->u, ref->alpha, levels_to_ref);
    } else {
      const VectorField s = p.sigma_exact();
      out.flux = flux_error(mesh, alpha, s, sigma, quad);
      out.interpolant = flux_error(mesh, alpha, s, interpolate_rt0(s, sys.flux_space), quad);
    }
    return out;
  }

  std::optional<FeFunction> uh;
  if (is_dg(m)) {
    const int k = method_degree(m);
    const DgSystem sys = assemble_dg(mesh, alpha, p.f, k, cfg.dg_parameters(k), p.dirichlet);
    out.n_dofs = sys.system.size();
    const Timer t;
    const SolveResult r = checked_solve(sys.system, m, level);
    finish_solve(r, t);
    uh = sys.expand(r.x);
    if (ref) {
      out.energy = nested_energy_difference(*uh, *ref->u, ref->alpha, levels_to_ref);
      out.jump = jump_seminorm(mesh, d.faces, *uh);
      out.dg = std::hypot(*out.energy, *out.jump);
    } else {
      const DgError e = dg_norm_error(mesh, alpha, d.faces, p.u_exact, p.grad_exact, *uh, quad);
      out.energy = e.energy;
      out.jump = e.jump_seminorm;
      out.dg = e.dg;
      const auto interp = interpolate_nodal(p.u_exact, uh->space_ptr());
      out.interpolant = dg_norm_error(mesh, alpha, d.faces, p.u_exact, p.grad_exact, interp, quad).dg;
    }
  } else {
    const ConstrainedSystem sys = m == Method::cr ? assemble_cr(mesh, alpha, p.f, p.dirichlet)
                                                  : assemble_conforming(mesh, alpha, p.f, method_degree(m), p.dirichlet);
    out.n_dofs = sys.space->n_dofs();
    const Timer t;
    const SolveResult r = checked_solve(sys.system, m, level);
    finish_solve(r, t);
    uh = sys.expand(r.x);
    if (ref) {
      out.energy = nested_energy_difference(*uh, *ref->u, ref->alpha, levels_to_ref);
    } else {
      out.energy = energy_error(mesh, alpha, p.grad_exact, *uh, quad);
      const auto interp = m == Method::cr ? interpolate_cr(p.u_exact, sys.space) : interpolate_nodal(p.u_exact, sys.space);
      out.interpolant = energy_error(mesh, alpha, p.grad_exact, interp, quad);
    }
  }
  if (element_errors && !ref) {
    const auto local = element_energy_errors(mesh, alpha, p.grad_exact, *uh, quad);
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      out.element_errors.push_back({mesh.centroid(k), local[k]});
    }
  }
  return out;
}

Reference build_reference(const ProblemSpec& p, const Mesh& finest) {
  Reference ref;
  ref.finest_level = 2;
  ref.mesh = std::make_unique<Mesh>(refine_uniform(refine_uniform(finest)));
  ref.alpha = p.coefficients(*ref.mesh);
  const ConstrainedSystem sys = assemble_conforming(*ref.mesh, ref.alpha, p.f, 2, p.dirichlet);
  SolveResult r = solve(sys.system);
  if (!r.report.converged) {
    throw SolverError(fmt::format("reference solution: no convergence after {} iterations (relative residual {:.3e})",
                                  r.report.iterations, r.report.final_residual));
  }
  ref.u = std::make_unique<FeFunction>(sys.expand(r.x));
  return ref;
}

bool supports_jump(const std::string& name) {
  return name == "interface1d" || name == "piecewise_linear" || name == "nonqma";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    out += c == '"' ? std::string("\"\"") : std::string(1, c);
  }
  return out + "\"";
}

Cell opt(const std::optional<double>& v) { return v ? Cell(*v) : Cell(); }

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::conforming1: return "conforming1";
    case Method::conforming2: return "conforming2";
    case Method::cr: return "cr";
    case Method::mixed0: return "mixed0";
    case Method::dg1: return "dg1";
    case Method::dg2: return "dg2";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) {
      return m;
    }
  }
  throw ConfigError(fmt::format("unknown method '{}' (expected conforming1, conforming2, cr, mixed0, dg1, dg2)", name));
}

int method_degree(Method m) { return (m == Method::conforming2 || m == Method::dg2) ? 2 : 1; }

bool is_dg(Method m) { return m == Method::dg1 || m == Method::dg2; }

void StudyConfig::validate() const {
  if (levels < 3) {
    throw ConfigError(fmt::format("levels must be at least 3 for rate fitting, got {}", levels));
  }
  if (levels > 8) {
    throw ConfigError(fmt::format("levels must be at most 8, got {}", levels));
  }
  if (base_n < 1) {
    throw ConfigError(fmt::format("base_n must be positive, got {}", base_n));
  }
  if (methods.empty()) {
    throw ConfigError("at least one method is required");
  }
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (methods[i] == methods[j]) {
        throw ConfigError(fmt::format("method '{}' listed twice", method_name(methods[i])));
      }
    }
  }
  if (gamma && !(*gamma >= DgParameters::gamma_min)) {
    throw ConfigError(fmt::format("gamma must be at least {}, got {}", DgParameters::gamma_min, *gamma));
  }
  for (double j : jump_sweep) {
    if (!(j > 0.0)) {
      throw ConfigError(fmt::format("sweep jumps must be positive, got {}", j));
    }
  }
  if (!(problem.jump > 0.0)) {
    throw ConfigError(fmt::format("jump must be positive, got {}", problem.jump));
  }
  if (!(problem.s > 0.0 && problem.s < 1.0)) {
    throw ConfigError(fmt::format("s must lie in (0, 1), got {}", problem.s));
  }
  if (threads < 0) {
    throw ConfigError(fmt::format("threads must be non-negative, got {}", threads));
  }
  if (!std::isfinite(test_weight_fault)) {
    throw ConfigError("weight fault must be finite");
  }
  const ProblemSpec p = make_problem(problem);
  if (p.dirichlet && std::find(methods.begin(), methods.end(), Method::mixed0) != methods.end()) {
    throw ConfigError(fmt::format("mixed0 supports only homogeneous boundary data; problem '{}' has nonzero data",
                                  p.name));
  }
}

DgParameters StudyConfig::dg_parameters(int degree) const {
  DgParameters params = DgParameters::for_degree(degree);
  if (gamma) {
    params.gamma = *gamma;
  }
  params.penalty = test_penalty;
  params.weights = test_weights;
  return params;
}

StudyConfig parse_config(std::istream& in, StudyConfig base) {
  StudyConfig cfg = std::move(base);
  std::string section;
  std::string line;
  int line_no = 0;
  std::optional<Rectangle> domain;
  std::optional<double> background;
  std::vector<Rectangle> boxes;
  std::vector<double> box_values;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(fmt::format("line {}: malformed section header '{}'", line_no, line));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected key = value, got '{}'", line_no, line));
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!section.empty()) {
      key = section + "." + key;
    }
    if (const auto a = key_aliases().find(key); a != key_aliases().end()) {
      key = a->second;
    }

    if (key == "problem.name") {
      cfg.problem.name = value;
    } else if (key == "problem.jump") {
      cfg.problem.jump = parse_real(key, value);
    } else if (key == "problem.s") {
      cfg.problem.s = parse_real(key, value);
    } else if (key == "problem.pattern") {
      cfg.problem.pattern = value;
    } else if (key == "problem.source") {
      builtin_source(value);
      cfg.problem.source = value;
    } else if (key == "problem.domain") {
      domain = parse_rectangle(key, parse_reals(key, value));
    } else if (key == "problem.background") {
      background = parse_real(key, value);
    } else if (key == "problem.box") {
      const auto v = parse_reals(key, value);
      if (v.size() != 5) {
        throw ConfigError(fmt::format("line {}: box expects x0, x1, y0, y1, alpha", line_no));
      }
      boxes.push_back(parse_rectangle(key, v));
      box_values.push_back(v[4]);
    } else if (key == "study.methods") {
      cfg.methods.clear();
      for (const auto& name : split_list(value)) {
        cfg.methods.push_back(parse_method(name));
      }
    } else if (key == "study.levels") {
      cfg.levels = static_cast<int>(parse_integer(key, value));
    } else if (key == "study.base_n") {
      cfg.base_n = static_cast<int>(parse_integer(key, value));
    } else if (key == "study.gamma") {
      cfg.gamma = parse_real(key, value);
    } else if (key == "study.sweep") {
      cfg.jump_sweep = parse_reals(key, value);
    } else if (key == "study.seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "study.threads") {
      cfg.threads = static_cast<int>(parse_integer(key, value));
    } else if (key == "output.path") {
      cfg.output = value;
    } else if (key == "output.format") {
      if (value == "csv") {
        cfg.format = OutputFormat::csv;
      } else if (value == "json") {
        cfg.format = OutputFormat::json;
      } else {
        throw ConfigError(fmt::format("line {}: format must be csv or json, got '{}'", line_no, value));
      }
    } else if (key == "output.timings") {
      cfg.timings = parse_bool(key, value);
    } else if (key == "output.plot_dir") {
      cfg.plot_dir = value;
    } else if (key == "test.penalty") {
      cfg.test_penalty = parse_average(key, value);
    } else if (key == "test.weights") {
      cfg.test_weights = parse_average(key, value);
    } else if (key == "test.weight_fault") {
      cfg.test_weight_fault = parse_real(key, value);
    } else {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }

  if (domain || background || !boxes.empty()) {
    if (cfg.problem.name != "custom") {
      throw ConfigError("domain, background and box keys need problem name = custom");
    }
    CoefficientLayout layout;
    layout.geometry.domain = domain.value_or(Rectangle{});
    layout.values.push_back(background.value_or(1.0));
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      layout.geometry.boxes.push_back({boxes[i], static_cast<int>(i) + 1});
      layout.values.push_back(box_values[i]);
    }
    cfg.problem.custom_layout = std::move(layout);
  }
  return cfg;
}

StudyConfig load_config(const std::string& path, StudyConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open config file '{}'", path));
  }
  return parse_config(in, std::move(base));
}

std::optional<double> LevelResult::principal(Method m) const {
  if (m == Method::mixed0) {
    return flux;
  }
  return is_dg(m) ? dg : energy;
}

std::optional<double> LevelResult::quasi_optimality(Method m) const {
  const auto e = principal(m);
  if (!e || !interpolant) {
    return std::nullopt;
  }
  if (m == Method::cr || is_dg(m)) {
    return *e / (*interpolant + osc.value_or(0.0));
  }
  return *e / *interpolant;
}

const MethodResult* StudyResult::find(Method m) const {
  for (const auto& r : methods) {
    if (r.method == m) {
      return &r;
    }
  }
  return nullptr;
}

std::vector<double> comparison_ratios(const StudyResult& r) {
  const MethodResult* cr = r.find(Method::cr);
  const MethodResult* c1 = r.find(Method::conforming1);
  std::vector<double> out;
  if (!cr || !c1) {
    return out;
  }
  for (std::size_t l = 0; l < cr->levels.size() && l < c1->levels.size(); ++l) {
    const auto& a = cr->levels[l];
    const auto& b = c1->levels[l];
    if (a.energy && b.energy) {
      out.push_back(*a.energy / (*b.energy + b.osc.value_or(0.0)));
    }
  }
  return out;
}

int worker_count(const StudyConfig& cfg, int tasks) {
  int n = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  if (const char* env = std::getenv("INTERFACE_FEM_THREADS"); env && *env) {
    const long long cap = parse_integer("INTERFACE_FEM_THREADS", trim(env));
    if (cap < 1) {
      throw ConfigError(fmt::format("INTERFACE_FEM_THREADS must be positive, got {}", cap));
    }
    n = std::min<long long>(n, cap);
  }
  return std::max(1, std::min(n, tasks));
}

StudyResult run_convergence(const StudyConfig& cfg) {
  cfg.validate();
  const ProblemSpec p = make_problem(cfg.problem);
  std::vector<std::unique_ptr<Mesh>> meshes;
  meshes.push_back(std::make_unique<Mesh>(p.mesh(cfg.base_n)));
  for (int l = 1; l < cfg.levels; ++l) {
    meshes.push_back(std::make_unique<Mesh>(refine_uniform(*meshes.back())));
  }
  std::vector<CoefficientField> alphas;
  std::vector<LevelData> data;
  alphas.reserve(meshes.size());
  for (const auto& m : meshes) {
    alphas.push_back(p.coefficients(*m));
  }
  for (std::size_t l = 0; l < meshes.size(); ++l) {
    data.push_back({meshes[l].get(), &alphas[l], face_coefficients(*meshes[l], alphas[l])});
  }

  StudyResult result;
  result.problem = p.name;
  result.jump = cfg.problem.jump;
  result.qma_satisfied = check_qma(*meshes[0], alphas[0]).satisfied;
  std::optional<Reference> ref;
  if (!p.has_exact()) {
    ref = build_reference(p, *meshes.back());
    result.reference_mode = true;
  }

  const int nm = static_cast<int>(cfg.methods.size());
  const int nl = cfg.levels;
  std::vector<LevelResult> cells(static_cast<std::size_t>(nm * nl));
  const bool element_errors = !cfg.plot_dir.empty();
  parallel_for(nm * nl, worker_count(cfg, nm * nl), [&](int task) {
    const int mi = task / nl, l = task % nl;
    const int to_ref = ref ? (nl - 1 - l) + ref->finest_level : 0;
    cells[task] = run_level(cfg.methods[mi], p, cfg, data[l], l, ref ? &*ref : nullptr, to_ref,
                            element_errors && l == nl - 1);
  });

  for (int mi = 0; mi < nm; ++mi) {
    MethodResult mr{cfg.methods[mi], {}, std::nullopt};
    std::vector<double> h, e;
    for (int l = 0; l < nl; ++l) {
      mr.levels.push_back(std::move(cells[mi * nl + l]));
      const auto err = mr.levels.back().principal(mr.method);
      if (err) {
        h.push_back(mr.levels.back().h_max);
        e.push_back(*err);
      }
    }
    if (static_cast<int>(e.size()) == nl) {
      mr.rates = fit_rates(e, h);
    }
    result.methods.push_back(std::move(mr));
  }
  return result;
}

SweepResult run_jump_sweep(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.jump_sweep.empty()) {
    throw ConfigError("jump sweep needs at least one jump value");
  }
  if (!supports_jump(cfg.problem.name)) {
    throw ConfigError(fmt::format("problem '{}' has no jump parameter", cfg.problem.name));
  }
  SweepResult out;
  for (double jump : cfg.jump_sweep) {
    StudyConfig c = cfg;
    c.problem.jump = jump;
    out.runs.push_back(run_convergence(c));
  }
  return out;
}

bool VerifyReport::passed() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const InvariantResult& r) { return r.passed; });
}

Table convergence_table(const StudyResult& r, bool timings) {
  Table t;
  t.columns = {"problem", "method", "level", "h_max", "n_dofs", "energy_err", "jump_seminorm",
               "dg_err", "flux_err", "osc", "rate_energy", "rate_flux", "solver_iters", "solve_seconds"};
  for (const auto& mr : r.methods) {
    const bool mixed = mr.method == Method::mixed0;
    for (std::size_t l = 0; l < mr.levels.size(); ++l) {
      const LevelResult& lr = mr.levels[l];
      std::optional<double> rate;
      if (mr.rates && l < mr.rates->pairwise.size()) {
        rate = mr.rates->pairwise[l];
      }
      t.rows.push_back({r.problem, method_name(mr.method), static_cast<long long>(lr.level), lr.h_max,
                        static_cast<long long>(lr.n_dofs), opt(lr.energy), opt(lr.jump), opt(lr.dg), opt(lr.flux),
                        opt(lr.osc), mixed ? Cell() : opt(rate), mixed ? opt(rate) : Cell(),
                        static_cast<long long>(lr.iterations), timings ? Cell(lr.solve_seconds) : Cell()});
    }
    const auto fit = mr.asymptotic_rate();
    t.rows.push_back({r.problem, method_name(mr.method), std::string("fit"), Cell(), Cell(), Cell(), Cell(), Cell(),
                      Cell(), Cell(), mixed ? Cell() : opt(fit), mixed ? opt(fit) : Cell(), Cell(), Cell()});
  }
  return t;
}

Table sweep_table(const SweepResult& r) {
  Table t;
  t.columns = {"problem", "method", "jump", "level", "h_max", "n_dofs", "error", "interp_err", "osc",
               "quasi_opt_ratio", "cr_conf_ratio", "rate", "solver_iters"};
  if (r.runs.empty()) {
    return t;
  }
  for (std::size_t mi = 0; mi < r.runs.front().methods.size(); ++mi) {
    for (const auto& run : r.runs) {
      const MethodResult& mr = run.methods[mi];
      const LevelResult& lr = mr.levels.back();
      Cell comparison;
      if (mr.method == Method::cr) {
        const auto ratios = comparison_ratios(run);
        if (!ratios.empty()) {
          comparison = ratios.back();
        }
      }
      t.rows.push_back({run.problem, method_name(mr.method), run.jump, static_cast<long long>(lr.level), lr.h_max,
                        static_cast<long long>(lr.n_dofs), opt(lr.principal(mr.method)), opt(lr.interpolant),
                        opt(lr.osc), opt(lr.quasi_optimality(mr.method)), comparison, opt(mr.asymptotic_rate()),
                        static_cast<long long>(lr.iterations)});
    }
  }
  return t;
}

Table verify_table(const VerifyReport& r) {
  Table t;
  t.columns = {"invariant", "passed", "worst", "threshold", "detail"};
  for (const auto& inv : r.invariants) {
    t.rows.push_back({inv.name, static_cast<long long>(inv.passed), inv.worst, inv.threshold, inv.detail});
  }
  return t;
}

std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(long long v) const { return fmt::format("{}", v); }
    std::string operator()(double v) const { return fmt::format("{:.12e}", v); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, c);
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out += (i ? "," : "") + t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += (i ? "," : "") + csv_escape(format_cell(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      auto& slot = obj[t.columns[i]];
      if (std::holds_alternative<long long>(c)) {
        slot = std::get<long long>(c);
      } else if (std::holds_alternative<double>(c)) {
        const double v = std::strtod(format_cell(c).c_str(), nullptr);
        slot = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
      } else if (std::holds_alternative<std::string>(c)) {
        slot = std::get<std::string>(c);
      } else {
        slot = nullptr;
      }
    }
    rows.push_back(std::move(obj));
  }
  nlohmann::ordered_json doc;
  doc["columns"] = t.columns;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string render(const Table& t, OutputFormat format) { return format == OutputFormat::json ? to_json(t) : to_csv(t); }

void write_plot_files(const StudyResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto value = [](const std::optional<double>& v) { return v ? fmt::format("{:.12e}", *v) : std::string("NaN"); };
  for (const auto& mr : r.methods) {
    const std::string stem = fmt::format("{}/{}_{}", dir, r.problem, method_name(mr.method));
    std::ofstream out(stem + ".dat");
    if (!out) {
      throw ConfigError(fmt::format("cannot write '{}.dat'", stem));
    }
    out << "# h_max n_dofs energy_err jump_seminorm dg_err flux_err osc\n";
    for (const auto& lr : mr.levels) {
      out << fmt::format("{:.12e} {} {} {} {} {} {}\n", lr.h_max, lr.n_dofs, value(lr.energy), value(lr.jump),
                         value(lr.dg), value(lr.flux), value(lr.osc));
    }
    const LevelResult& finest = mr.levels.back();
    if (!finest.element_errors.empty()) {
      std::ofstream el(stem + "_elements.dat");
      el << "# centroid_x centroid_y local_energy_err (finest level)\n";
      for (const auto& e : finest.element_errors) {
        el << fmt::format("{:.12e} {:.12e} {:.12e}\n", e.centroid.x(), e.centroid.y(), e.error);
      }
    }
  }
}

}  // namespace ifem
