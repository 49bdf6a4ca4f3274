// Command-line front end: homogenized densities of block assemblies with
// cohesive interfaces.
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cohom/cache.hpp"
#include "cohom/density.hpp"
#include "cohom/harness.hpp"
#include "cohom/macroeval.hpp"
#include "cohom/parallel.hpp"

using nlohmann::json;
using namespace cohom;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

// Options are collected as strings and overlaid on the optional JSON config,
// so one resolved config object drives the run and is echoed into outputs.
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON config; command-line flags override its entries");
  }

  void add(const std::string& flag, const std::string& key, const std::string& help) {
    auto* opt = app_->add_option(flag, raw_[key], help);
    bound_.emplace_back(opt, key);
  }

  json resolve() const {
    json cfg = json::object();
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw InputError("cannot read config " + config_path_);
      try {
        cfg = json::parse(in);
      } catch (const json::parse_error& e) {
        throw InputError("config " + config_path_ + ": " + e.what());
      }
      if (!cfg.is_object()) throw InputError("config must be a JSON object");
    }
    for (const auto& [opt, key] : bound_)
      if (opt->count() > 0) cfg[key] = raw_.at(key);
    cfg["subcommand"] = app_->get_name();
    return cfg;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> raw_;
  std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

std::string get_string(const json& cfg, const std::string& key, const std::string& fallback) {
  if (!cfg.contains(key)) return fallback;
  const auto& v = cfg[key];
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("invalid number '" + s + "' for " + what);
  }
}

double get_double(const json& cfg, const std::string& key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (cfg[key].is_number()) return cfg[key].get<double>();
  return parse_double(cfg[key].get<std::string>(), key);
}

int get_int(const json& cfg, const std::string& key, int fallback) {
  const double v = get_double(cfg, key, fallback);
  if (v != std::floor(v)) throw InputError(key + " must be an integer");
  return static_cast<int>(v);
}

bool get_bool(const json& cfg, const std::string& key, bool fallback) {
  if (!cfg.contains(key)) return fallback;
  if (cfg[key].is_boolean()) return cfg[key].get<bool>();
  const std::string s = get_string(cfg, key, "");
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InputError(key + " must be true or false");
}

std::vector<double> split_numbers(const std::string& s, char sep, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(parse_double(item, what));
  return out;
}

std::vector<double> get_numbers(const json& cfg, const std::string& key, std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  if (cfg[key].is_array()) return cfg[key].get<std::vector<double>>();
  if (cfg[key].is_number()) return {cfg[key].get<double>()};
  return split_numbers(cfg[key].get<std::string>(), ',', key);
}

// "a:step:b" inclusive grid.
std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split_numbers(spec, ':', "grid");
  if (parts.size() != 3 || !(parts[1] > 0) || parts[2] < parts[0])
    throw InputError("grid must read START:STEP:STOP with STEP > 0");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (int i = 0; i <= n; ++i) out.push_back(parts[0] + i * parts[1]);
  return out;
}

SymTensord tensor_from_list(const std::vector<double>& v, int dim) {
  const SymTensord t = tensor_from_entries(json(v));
  if (t.dim() != dim) throw InputError("strain has " + std::to_string(v.size()) + " entries for a " +
                                       std::to_string(dim) + "D geometry");
  return t;
}

ElasticityOperatord make_elasticity(const json& cfg, int dim) {
  if (cfg.contains("A") && cfg["A"].is_array()) {
    const auto rows = cfg["A"].get<std::vector<std::vector<double>>>();
    const int m = sym_components(dim);
    if (int(rows.size()) != m) throw InputError("A must be a " + std::to_string(m) + "x" + std::to_string(m) + " matrix");
    Mat a(m, m);
    for (int r = 0; r < m; ++r) {
      if (int(rows[r].size()) != m) throw InputError("A must be square");
      for (int c = 0; c < m; ++c) a(r, c) = rows[r][c];
    }
    return ElasticityOperatord(dim, a);
  }
  if (cfg.contains("A") && cfg["A"].is_object())
    return ElasticityOperatord::isotropic(dim, cfg["A"].at("lambda").get<double>(), cfg["A"].at("mu").get<double>());
  const std::string spec = get_string(cfg, "A", "identity");
  if (spec == "identity") return ElasticityOperatord::identity(dim);
  if (spec.rfind("isotropic:", 0) == 0) {
    const auto p = split_numbers(spec.substr(10), ':', "isotropic moduli");
    if (p.size() != 2) throw InputError("isotropic elasticity reads isotropic:LAMBDA:MU");
    return ElasticityOperatord::isotropic(dim, p[0], p[1]);
  }
  throw InputError("unknown elasticity '" + spec + "' (identity, isotropic:LAMBDA:MU or a matrix)");
}

JumpCone make_cone(const json& cfg, int dim) {
  if (cfg.contains("cone") && cfg["cone"].is_object()) {
    const auto& c = cfg["cone"];
    const auto kind = jump_cone_kind(c.value("kind", std::string("generic")));
    if (kind != JumpCone::Kind::Generic) return JumpCone(kind, dim);
    return JumpCone::generic(c.get<ConeSpec>());
  }
  const auto kind = jump_cone_kind(get_string(cfg, "cone", "opening"));
  if (kind == JumpCone::Kind::Generic) throw InputError("a generic cone needs its generators in the config");
  return JumpCone(kind, dim);
}

SolverParams make_params(const json& cfg) {
  SolverParams p;
  if (cfg.contains("solver")) p = cfg["solver"].get<SolverParams>();
  p.max_iter = get_int(cfg, "max-iter", p.max_iter);
  p.tol_primal = get_double(cfg, "tol", p.tol_primal);
  p.tol_dual = get_double(cfg, "tol", p.tol_dual);
  return p;
}

std::shared_ptr<SolveCache> make_cache(const json& cfg) {
  const std::string dir = get_string(cfg, "cache-dir", "");
  if (!dir.empty()) return std::make_shared<SolveCache>(dir);
  return default_cache();
}

struct Setup {
  UnitCellMesh mesh;
  ElasticityOperatord A;
  JumpCone cone;
  int refinement = 0;
  SolverParams params;
  int jobs = 1;
};

Setup make_setup(const json& cfg, const std::string& default_geometry) {
  Setup s;
  s.mesh = build_from_string(get_string(cfg, "geometry", default_geometry));
  s.A = make_elasticity(cfg, s.mesh.dim);
  s.cone = make_cone(cfg, s.mesh.dim);
  s.refinement = get_int(cfg, "refinement", 0);
  if (s.refinement < 0 || s.refinement > 4) throw InputError("refinement must lie in 0..4");
  s.params = make_params(cfg);
  s.jobs = get_int(cfg, "jobs", 1);
  if (s.jobs < 1) throw InputError("jobs must be positive");
  return s;
}

void emit(const json& cfg, const std::string& content) {
  const std::string out = get_string(cfg, "out", "");
  if (out.empty() || out == "-")
    std::cout << content;
  else
    write_atomic(out, content);
}

std::string csv_header(const json& cfg, const std::string& columns) {
  return "# format_version=1\n# config=" + cfg.dump() + "\n" + columns + "\n";
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

json wrap(const json& cfg, const json& result) {
  return {{"format_version", 1}, {"config", cfg}, {"result", result}};
}

std::string entries_csv(const SymTensord& t) {
  std::string out;
  for (const auto& v : tensor_entries(t)) out += number(v.get<double>()) + ",";
  return out;
}

std::string entry_columns(int dim) { return dim == 1 ? "xi," : "xi11,xi22,xi12,"; }

// ---------------------------------------------------------------------------

int run_oned(const json& cfg) {
  const auto grid = parse_grid(get_string(cfg, "xi-grid", "-3:0.1:3"));
  json local = cfg;
  local["geometry"] = "chain";
  const Setup s = make_setup(local, "chain");
  CellSolver solver(s.mesh, s.A, s.cone, s.refinement, s.params);
  std::vector<CellSolution> sols(grid.size());
  parallel_for(grid.size(), s.jobs, [&](std::size_t i) { sols[i] = solver.solve(SymTensord::make(grid[i])); });
  std::string out = csv_header(cfg, "xi,f_analytic,f_solver,abs_err");
  bool converged = true;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double exact = analytic_1d(grid[i]).f;
    out += number(grid[i]) + "," + number(exact) + "," + number(sols[i].value) + "," +
           number(std::abs(sols[i].value - exact)) + "\n";
    converged = converged && sols[i].converged;
  }
  emit(cfg, out);
  return converged ? kExitOk : kExitSolver;
}

int run_cell(const json& cfg) {
  const Setup s = make_setup(cfg, "chain");
  const auto xi = tensor_from_list(get_numbers(cfg, "xi", {}), s.mesh.dim);
  const bool dry = get_bool(cfg, "dry", false);
  const DensityModel model(s.mesh, s.A, s.cone, s.refinement, s.params, make_cache(cfg));
  const CellSolution sol = model.solve(xi, !dry);
  emit(cfg, wrap(cfg, sol).dump(2) + "\n");
  return sol.converged ? kExitOk : kExitSolver;
}

DensityOptions density_options(const json& cfg, int jobs) {
  DensityOptions o;
  o.ladder = get_numbers(cfg, "ladder", o.ladder);
  o.tol_zero = get_double(cfg, "tol-zero", o.tol_zero);
  o.growth_factor = get_double(cfg, "growth-factor", o.growth_factor);
  o.tol_rec = get_double(cfg, "tol-rec", o.tol_rec);
  o.with_recession = get_bool(cfg, "recession", true);
  o.jobs = jobs;
  return o;
}

std::vector<SymTensord> density_strains(const json& cfg, int dim) {
  std::vector<SymTensord> out;
  if (cfg.contains("xis")) {
    for (const auto& x : cfg["xis"]) out.push_back(tensor_from_list(x.get<std::vector<double>>(), dim));
    return out;
  }
  const int count = get_int(cfg, "directions", 64);
  const int seed = get_int(cfg, "seed", 0);
  if (seed < 0) throw InputError("seed must be nonnegative");
  const auto scales = get_numbers(cfg, "magnitudes", {1.0});
  for (double m : scales)
    for (const auto& d : sample_directions(dim, count, static_cast<std::uint64_t>(seed))) out.push_back(d * m);
  return out;
}

int run_density(const json& cfg) {
  const Setup s = make_setup(cfg, "stack:2x2");
  DensityModel model(s.mesh, s.A, s.cone, s.refinement, s.params, make_cache(cfg));
  const auto opts = density_options(cfg, s.jobs);
  const auto samples = sweep(model, density_strains(cfg, s.mesh.dim), opts);

  std::string csv = csv_header(cfg, entry_columns(s.mesh.dim) + "f,g,recession,recession_status,class,converged");
  bool converged = true;
  for (const auto& smp : samples) {
    csv += entries_csv(smp.xi) + number(smp.f_value) + "," + number(smp.g_value) + "," +
           (smp.recession.status == RecessionStatus::NotComputed ? std::string() : number(smp.recession.value)) +
           "," + to_string(smp.recession.status) + "," + to_string(smp.classification) + "," +
           (smp.converged ? "1" : "0") + "\n";
    converged = converged && smp.converged;
  }
  emit(cfg, csv);

  const ConeSpec k0 = s.cone.matrix_cone(s.mesh.normals());
  const GrowthAudit audit = audit_growth(samples, s.A, &k0);
  const std::string audit_path = get_string(cfg, "audit", "");
  if (!audit_path.empty()) write_atomic(audit_path, wrap(cfg, audit).dump(2) + "\n");
  if (!audit.passed) std::cerr << "growth audit failed: " << audit.violations.size() << " violation(s)\n";
  return converged ? kExitOk : kExitSolver;
}

int run_cone(const json& cfg) {
  const Setup s = make_setup(cfg, "stack:2x2");
  DensityModel model(s.mesh, s.A, s.cone, s.refinement, s.params, make_cache(cfg));
  const auto opts = density_options(cfg, s.jobs);
  const int seed = get_int(cfg, "seed", 0);
  const auto dirs = sample_directions(s.mesh.dim, get_int(cfg, "directions", 64), static_cast<std::uint64_t>(seed));
  const ConeDetection det = detect_cones(model, dirs, opts);
  json mism = json::array();
  for (int i : det.mismatches) mism.push_back(tensor_entries(dirs[i]));
  bool converged = true;
  for (const auto& smp : det.samples) converged = converged && smp.converged;
  json result = {{"H_hom", det.H},
                 {"K_hom", det.K},
                 {"directions", dirs.size()},
                 {"mismatches", mism},
                 {"K0", s.cone.matrix_cone(s.mesh.normals())}};
  emit(cfg, wrap(cfg, result).dump(2) + "\n");
  return converged ? kExitOk : kExitSolver;
}

int run_macro(const json& cfg) {
  const std::string field_path = get_string(cfg, "field", "");
  if (field_path.empty()) throw InputError("macro needs --field");
  std::ifstream in(field_path);
  if (!in) throw InputError("cannot read field " + field_path);
  MacroField field;
  try {
    field = json::parse(in).get<MacroField>();
  } catch (const json::exception& e) {
    throw InputError("field " + field_path + ": " + e.what());
  }
  const std::string source_kind = get_string(cfg, "density", field.dim == 1 ? "analytic" : "cell");
  std::shared_ptr<const DensitySource> source;
  if (source_kind == "analytic") {
    if (field.dim != 1) throw InputError("the analytic density exists only in 1D");
    source = std::make_shared<Analytic1DSource>();
  } else if (source_kind == "cell" || source_kind == "table") {
    const Setup s = make_setup(cfg, field.dim == 1 ? "chain" : "stack:2x2");
    auto model = std::make_shared<const DensityModel>(s.mesh, s.A, s.cone, s.refinement, s.params, make_cache(cfg));
    const auto opts = density_options(cfg, s.jobs);
    ConeSpec k_hom;
    if (cfg.contains("K_hom")) {
      k_hom = cfg["K_hom"].get<ConeSpec>();
    } else {
      k_hom = detect_cones(*model, sample_directions(field.dim, get_int(cfg, "directions", 64)), opts).H;
    }
    auto exact = std::make_shared<const CellDensitySource>(model, k_hom, opts);
    if (source_kind == "cell") {
      source = exact;
    } else {
      const double radius = get_double(cfg, "table-radius", 2.0);
      const int nodes = get_int(cfg, "table-nodes", 9);
      const double trust = get_double(cfg, "trust-radius", radius / (nodes - 1));
      source = std::make_shared<TabulatedDensitySource>(exact, radius, nodes, trust, s.jobs);
    }
  } else {
    throw InputError("unknown density source '" + source_kind + "' (analytic, cell or table)");
  }
  const MacroEnergy energy = evaluate(field, *source, get_int(cfg, "jobs", 1));
  emit(cfg, wrap(cfg, energy).dump(2) + "\n");
  return kExitOk;
}

int run_gamma(const json& cfg) {
  const Setup s = make_setup(cfg, "stack:1x1");
  EpsilonExperiment exp;
  exp.cell = s.mesh;
  exp.A = s.A;
  exp.cone = s.cone;
  exp.xi = tensor_from_list(get_numbers(cfg, "xi", {}), s.mesh.dim);
  exp.refinement = s.refinement;
  exp.params = s.params;
  exp.jobs = s.jobs;
  exp.boundary = boundary_mode(get_string(cfg, "boundary", "sliding"));
  std::vector<int> ladder;
  for (double n : get_numbers(cfg, "n-ladder", {1, 2, 4, 8})) {
    if (n != std::floor(n)) throw InputError("N ladder entries must be integers");
    ladder.push_back(static_cast<int>(n));
  }
  exp.ladder = ladder;
  const HarnessResult res = run_sweep(exp);
  std::string csv = csv_header(cfg, "N,epsilon,energy,gap,iterations,converged");
  bool converged = res.f_hom_converged;
  for (const auto& row : res.rows) {
    csv += std::to_string(row.n) + "," + number(row.epsilon) + "," + number(row.energy) + "," + number(row.gap) +
           "," + std::to_string(row.iterations) + "," + (row.converged ? "1" : "0") + "\n";
    converged = converged && row.converged;
  }
  emit(cfg, csv);
  return converged ? kExitOk : kExitSolver;
}

int run_geometry(const json& cfg) {
  const UnitCellMesh mesh = build_from_string(get_string(cfg, "geometry", "chain"));
  const int n = get_int(cfg, "assembly", 0);
  json out = n > 0 ? json(build_assembly(mesh, n)) : json(mesh);
  emit(cfg, wrap(cfg, out).dump(2) + "\n");
  return kExitOk;
}

void add_setup_options(Options& o) {
  o.add("--geometry", "geometry", "chain | stack:NXxNY | running:NXxNY:OFFSET");
  o.add("--cone", "cone", "opening | noninterpenetration (generic cones via --config)");
  o.add("-A,--elasticity", "A", "identity | isotropic:LAMBDA:MU (matrices via --config)");
  o.add("--refinement", "refinement", "0: affine blocks, r >= 1: P1 on a 2^r grid per block");
  o.add("--max-iter", "max-iter", "ADMM iteration cap");
  o.add("--tol", "tol", "absolute ADMM residual tolerance");
  o.add("--jobs", "jobs", "worker threads");
  o.add("--cache-dir", "cache-dir", "solve cache directory (default: $COHOM_CACHE_DIR)");
}

void add_density_options(Options& o) {
  o.add("--directions", "directions", "number of sampled directions");
  o.add("--seed", "seed", "direction grid offset seed");
  o.add("--ladder", "ladder", "recession ladder, comma separated");
  o.add("--tol-zero", "tol-zero", "kernel threshold for g");
  o.add("--growth-factor", "growth-factor", "ratio growth classifying +inf recession");
  o.add("--tol-rec", "tol-rec", "stabilization tolerance of recession ratios");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenized densities of block assemblies with cohesive interfaces"};
  app.require_subcommand(1);

  std::vector<std::pair<CLI::App*, std::unique_ptr<Options>>> commands;
  auto command = [&](const std::string& name, const std::string& help) -> Options& {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, std::make_unique<Options>(sub));
    auto& o = *commands.back().second;
    o.add("-o,--out", "out", "output file (default stdout)");
    return o;
  };

  auto& oned = command("oned", "1D chain: solver against the closed form");
  oned.add("--xi-grid", "xi-grid", "START:STEP:STOP");
  oned.add("--refinement", "refinement", "discretization level");
  oned.add("--jobs", "jobs", "worker threads");

  auto& cell = command("cell", "solve one cell problem");
  add_setup_options(cell);
  cell.add("--xi", "xi", "macroscopic strain entries: x or x11,x22,x12");
  cell.add("--dry", "dry", "drop the surface term (g_hom)");

  auto& density = command("density", "density sweep with growth audit");
  add_setup_options(density);
  add_density_options(density);
  density.add("--magnitudes", "magnitudes", "comma separated scalings of the directions");
  density.add("--recession", "recession", "estimate recession values (true/false)");
  density.add("--audit", "audit", "audit JSON output path");

  auto& cone = command("cone", "detect H_hom and K_hom");
  add_setup_options(cone);
  add_density_options(cone);

  auto& macro = command("macro", "evaluate the homogenized functional on a field");
  add_setup_options(macro);
  add_density_options(macro);
  macro.add("--field", "field", "field JSON");
  macro.add("--density", "density", "analytic | cell | table");
  macro.add("--table-radius", "table-radius", "half-width of the tabulated strain box");
  macro.add("--table-nodes", "table-nodes", "table nodes per strain component");
  macro.add("--trust-radius", "trust-radius", "largest distance to a node served from the table");

  auto& gamma = command("gamma", "epsilon sweep on finite assemblies");
  add_setup_options(gamma);
  gamma.add("--xi", "xi", "affine boundary strain entries");
  gamma.add("--n-ladder", "n-ladder", "comma separated copies per direction");
  gamma.add("--boundary", "boundary", "sliding | clamped");

  auto& geometry = command("geometry", "print a cell or assembly mesh");
  geometry.add("--geometry", "geometry", "chain | stack:NXxNY | running:NXxNY:OFFSET");
  geometry.add("--assembly", "assembly", "N > 0 prints the N x N assembly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return kExitConfig;
  }

  static const std::map<std::string, int (*)(const json&)> handlers = {
      {"oned", run_oned},   {"cell", run_cell},   {"density", run_density},   {"cone", run_cone},
      {"macro", run_macro}, {"gamma", run_gamma}, {"geometry", run_geometry},
  };
  for (const auto& [sub, opts] : commands) {
    if (!sub->parsed()) continue;
    try {
      const int code = handlers.at(sub->get_name())(opts->resolve());
      if (code == kExitSolver) std::cerr << "warning: some cell solves did not converge\n";
      return code;
    } catch (const InputError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const json::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const SolverError& e) {
      std::cerr << "solver error after " << e.iterations() << " iterations: " << e.what() << "\n";
      return kExitSolver;
    } catch (const GeometryError& e) {
      std::cerr << "geometry error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
      std::cerr << "i/o error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  return kExitConfig;
}
