#include "surfpde/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "surfpde/analysis.hpp"
#include "surfpde/error.hpp"
#include "surfpde/geometry.hpp"
#include "surfpde/moving.hpp"
#include "surfpde/operators.hpp"
#include "surfpde/parallel.hpp"
#include "surfpde/problems.hpp"

namespace surfpde {

namespace fs = std::filesystem;

namespace {

enum class KeyType { integer, unsigned_integer, real, text, choice, list };

struct KeySpec {
  std::string name;
  KeyType type;
  std::vector<std::string> choices;
  std::string help;
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"surface", KeyType::choice, {"sphere", "torus", "tooth", "dziuk", "rose", "bumpy", "file"}, "surface to sample"},
      {"input", KeyType::text, {}, "point cloud file (surface = file)"},
      {"format", KeyType::choice, {"csv", "ply"}, "point cloud format"},
      {"n", KeyType::unsigned_integer, {}, "node count"},
      {"h", KeyType::real, {}, "target node spacing"},
      {"dx", KeyType::real, {}, "resampling spacing (moving)"},
      {"r0", KeyType::real, {}, "rose curve offset"},
      {"k", KeyType::integer, {}, "rose curve petal parameter"},
      {"gamma", KeyType::real, {}, "bumpy sphere amplitude"},
      {"bumps", KeyType::integer, {}, "bumpy sphere frequency"},
      {"m", KeyType::integer, {}, "PHS exponent (odd)"},
      {"l", KeyType::integer, {}, "polynomial degree"},
      {"n_s", KeyType::unsigned_integer, {}, "stencil size"},
      {"n_perp", KeyType::unsigned_integer, {}, "off-surface points per stencil"},
      {"eps_normal", KeyType::real, {}, "off-surface spacing factor"},
      {"epsilon_hyper", KeyType::real, {}, "hyperviscosity scale"},
      {"operator", KeyType::choice, {"laplacian", "identity", "grad_x", "grad_y", "grad_z"}, "operator"},
      {"node", KeyType::unsigned_integer, {}, "node index (weights)"},
      {"mode", KeyType::choice, {"dense", "extremal"}, "spectrum mode"},
      {"count", KeyType::unsigned_integer, {}, "eigenvalues reported in extremal mode"},
      {"shift", KeyType::real, {}, "shift for extremal mode"},
      {"test", KeyType::choice, {"u1", "u2"}, "Poisson test function"},
      {"init", KeyType::choice, {"cosine", "gaussian"}, "advection initial condition"},
      {"pattern", KeyType::choice, {"spots", "stripes"}, "Turing parameter preset"},
      {"seed", KeyType::unsigned_integer, {}, "random seed"},
      {"dt", KeyType::real, {}, "time step"},
      {"t_final", KeyType::real, {}, "final time"},
      {"levels", KeyType::list, {}, "comma-separated resolutions for converge"},
      {"solver", KeyType::choice, {"auto", "direct", "bicgstab"}, "linear solver"},
      {"out", KeyType::text, {}, "output file"},
      {"threads", KeyType::unsigned_integer, {}, "worker threads"},
  };
  return keys;
}

const KeySpec& spec_for(const std::string& key) {
  for (const auto& k : schema())
    if (k.name == key) return k;
  throw InputError("unknown configuration key '" + key + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_number(trim(item), v)) throw InputError(key + ": expected a comma-separated list of numbers, got '" + value + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError(key + ": empty list");
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& k : schema()) v.push_back(k.name);
    return v;
  }();
  return names;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const KeySpec& spec = spec_for(key);
  const std::string value = trim(raw);
  switch (spec.type) {
    case KeyType::integer: {
      long v;
      if (!parse_number(value, v)) throw InputError(key + ": expected an integer, got '" + value + "'");
      break;
    }
    case KeyType::unsigned_integer: {
      long v;
      if (!parse_number(value, v) || v < 0)
        throw InputError(key + ": expected a nonnegative integer, got '" + value + "'");
      break;
    }
    case KeyType::real: {
      double v;
      if (!parse_number(value, v) || !std::isfinite(v))
        throw InputError(key + ": expected a number, got '" + value + "'");
      break;
    }
    case KeyType::choice:
      if (std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
        std::string all;
        for (const auto& c : spec.choices) all += (all.empty() ? "" : ", ") + c;
        throw InputError(key + ": '" + value + "' is not one of {" + all + "}");
      }
      break;
    case KeyType::list:
      parse_list(key, value);
      break;
    case KeyType::text:
      if (value.empty()) throw InputError(key + ": empty value");
      break;
  }
  values_[key] = value;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::optional<double> RunConfig::maybe_real(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  double v = 0;
  parse_number(it->second, v);
  return v;
}

std::optional<long> RunConfig::maybe_integer(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  long v = 0;
  parse_number(it->second, v);
  return v;
}

double RunConfig::real(const std::string& key, double fallback) const { return maybe_real(key).value_or(fallback); }
long RunConfig::integer(const std::string& key, long fallback) const { return maybe_integer(key).value_or(fallback); }

std::vector<double> RunConfig::list(const std::string& key, const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : parse_list(key, it->second);
}

void RunConfig::validate() const {
  if (auto m = maybe_integer("m"); m && (*m < 3 || *m % 2 == 0)) throw InputError("m: PHS exponent must be odd and >= 3");
  if (auto l = maybe_integer("l"); l && (*l < 0 || *l > 12)) throw InputError("l: polynomial degree must lie in [0, 12]");
  if (auto m = maybe_integer("m"), l = maybe_integer("l"); m && l && (*m - 1) / 2 > *l)
    throw InputError("m: PHS order (m-1)/2 must not exceed l");
  if (auto np = maybe_integer("n_perp")) {
    const long l = integer("l", 2);
    if (!admissible_n_perp(static_cast<std::size_t>(*np), static_cast<int>(l)))
      throw InputError("n_perp: " + std::to_string(*np) + " violates the off-surface layout rule for l = " +
                       std::to_string(l) + " (n_perp must be even, >= l+1 for odd l and > l+1 for even l)");
  }
  if (auto e = maybe_real("eps_normal"); e && !(*e > 0.0 && *e < 1.0)) throw InputError("eps_normal: must lie in (0, 1)");
  for (const char* key : {"h", "dx", "dt", "t_final", "r0"})
    if (auto v = maybe_real(key); v && !(*v > 0.0)) throw InputError(std::string(key) + ": must be positive");
  if (auto e = maybe_real("epsilon_hyper"); e && *e < 0.0) throw InputError("epsilon_hyper: must be nonnegative");
  if (auto n = maybe_integer("n"); n && *n < 4) throw InputError("n: at least 4 nodes required");
  if (auto t = maybe_integer("threads"); t && *t < 1) throw InputError("threads: must be >= 1");
  if (has("levels"))
    for (double v : list("levels", {}))
      if (!(v > 0.0)) throw InputError("levels: entries must be positive");
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string());
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

struct Context {
  std::string command;
  std::string target;  // converge sub-problem
  RunConfig cfg;
};

std::size_t as_size(long v) { return static_cast<std::size_t>(std::max(0L, v)); }

SurfaceNodeSet make_nodes(const RunConfig& c, const std::string& default_surface, std::size_t default_n) {
  const std::string s = c.str("surface", default_surface);
  if (s == "sphere") {
    if (c.has("h") && !c.has("n")) return sphere_nodes_for_spacing(c.real("h", 0.1));
    return fibonacci_sphere_nodes(as_size(c.integer("n", static_cast<long>(default_n))));
  }
  if (s == "torus") return torus_nodes(as_size(c.integer("n", static_cast<long>(default_n))), 1.0, 1.0 / 3.0);
  if (s == "tooth") return implicit_surface_nodes(surfaces::tooth(), c.real("h", 0.1), as_size(c.integer("seed", 1)));
  if (s == "dziuk") return implicit_surface_nodes(surfaces::dziuk(), c.real("h", 0.1), as_size(c.integer("seed", 1)));
  if (s == "rose") return rose_curve_nodes(c.real("r0", 5.0), static_cast<int>(c.integer("k", 25)), c.real("h", 0.05));
  if (s == "bumpy")
    return bumpy_sphere_nodes(c.real("gamma", 0.1), static_cast<int>(c.integer("bumps", 21)),
                              as_size(c.integer("n", static_cast<long>(default_n))));
  if (!c.has("input")) throw InputError("input: required when surface = file");
  const fs::path in = c.str("input", "");
  std::string fmt = c.str("format", in.extension() == ".ply" ? "ply" : "csv");
  return load_point_cloud(in, fmt == "ply" ? PointCloudFormat::ply : PointCloudFormat::xyz_csv);
}

PhsPolyConfig make_phs(const RunConfig& c, int dim, int default_l, double default_eps) {
  PhsPolyConfig p;
  p.dim = dim;
  p.l = static_cast<int>(c.integer("l", default_l));
  p.m = static_cast<int>(c.integer("m", 5));
  p.n_s = as_size(c.integer("n_s", static_cast<long>(2 * binomial(p.l + dim, dim))));
  p.n_perp = as_size(c.integer("n_perp", static_cast<long>(default_n_perp(p.l))));
  p.eps_normal = c.real("eps_normal", default_eps);
  p.validate();
  return p;
}

LinearOperatorSpec make_operator(const RunConfig& c) {
  const std::string op = c.str("operator", "laplacian");
  if (op == "identity") return LinearOperatorSpec::identity();
  if (op == "grad_x") return LinearOperatorSpec::gradient_component(0);
  if (op == "grad_y") return LinearOperatorSpec::gradient_component(1);
  if (op == "grad_z") return LinearOperatorSpec::gradient_component(2);
  return LinearOperatorSpec::laplacian();
}

void write_manifest(const Context& ctx, const fs::path& out) {
  const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  std::ofstream f(dir / "manifest");
  if (!f) throw InputError("cannot write manifest in " + dir.string());
  f << "command = " << ctx.command << "\n";
  if (!ctx.target.empty()) f << "problem = " << ctx.target << "\n";
  for (const auto& [k, v] : ctx.cfg.values()) f << k << " = " << v << "\n";
}

fs::path prepare_out(const Context& ctx, const std::string& fallback) {
  fs::path out = ctx.cfg.str("out", fallback);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_manifest(ctx, out);
  return out;
}

PoissonOptions poisson_options(const RunConfig& c, double h) {
  PoissonOptions o;
  o.surface = c.str("surface", "sphere") == "tooth" ? PoissonSurface::tooth : PoissonSurface::sphere;
  if (const auto s = c.str("surface", "sphere"); s != "sphere" && s != "tooth")
    throw InputError("surface: poisson supports sphere and tooth");
  o.test = c.str("test", "u1") == "u2" ? PoissonTest::u2 : PoissonTest::u1;
  o.l = static_cast<int>(c.integer("l", 2));
  o.m = static_cast<int>(c.integer("m", 5));
  if (c.has("n_s")) o.n_s = as_size(c.integer("n_s", 0));
  o.n_perp = as_size(c.integer("n_perp", 10));
  o.eps_normal = c.real("eps_normal", 0.05);
  o.h = h;
  return o;
}

DiffusionOptions diffusion_options(const RunConfig& c, std::size_t n) {
  DiffusionOptions o;
  o.l = static_cast<int>(c.integer("l", 4));
  o.m = static_cast<int>(c.integer("m", 5));
  o.n = n;
  if (c.has("n_s")) o.n_s = as_size(c.integer("n_s", 0));
  o.n_perp = as_size(c.integer("n_perp", 14));
  o.eps_normal = c.real("eps_normal", 0.2);
  o.t_final = c.maybe_real("t_final");
  return o;
}

AdvectionOptions advection_options(const RunConfig& c, std::size_t n) {
  AdvectionOptions o;
  const std::string s = c.str("surface", "sphere");
  if (s != "sphere" && s != "torus") throw InputError("surface: advect supports sphere and torus");
  o.surface = s == "torus" ? AdvectionSurface::torus : AdvectionSurface::sphere;
  o.init = c.str("init", "gaussian") == "cosine" ? AdvectionInit::cosine_bell : AdvectionInit::gaussian_bell;
  o.l = static_cast<int>(c.integer("l", 4));
  o.m = static_cast<int>(c.integer("m", 3));
  o.n = n;
  if (c.has("n_s")) o.n_s = as_size(c.integer("n_s", 0));
  o.n_perp = as_size(c.integer("n_perp", 14));
  o.eps_normal = c.maybe_real("eps_normal");
  o.epsilon_hyper = c.maybe_real("epsilon_hyper");
  return o;
}

ExpandingSphereOptions moving_options(const RunConfig& c, double dx) {
  ExpandingSphereOptions o;
  o.dx = dx;
  o.l = static_cast<int>(c.integer("l", 4));
  o.m = static_cast<int>(c.integer("m", 5));
  if (c.has("n_s")) o.n_s = as_size(c.integer("n_s", 0));
  o.n_perp = as_size(c.integer("n_perp", 14));
  o.eps_normal = c.real("eps_normal", 0.2);
  o.t_final = c.real("t_final", 0.5);
  return o;
}

ProblemRun run_heat(const RunConfig& c, std::size_t n) {
  const std::string s = c.str("surface", "sphere");
  if (s != "sphere" && s != "torus") throw InputError("surface: heat supports sphere and torus");
  return s == "torus" ? forced_heat_torus(diffusion_options(c, n)) : heat_sphere(diffusion_options(c, n));
}

int cmd_nodes(const Context& ctx) {
  const SurfaceNodeSet nodes = make_nodes(ctx.cfg, "sphere", 2000);
  const fs::path out = prepare_out(ctx, "nodes.ply");
  if (out.extension() == ".csv")
    write_xyz_csv(out, nodes);
  else
    write_ply(out, nodes);
  std::printf("nodes: N=%zu h=%.6g out=%s\n", nodes.size(), nodes.h(), out.string().c_str());
  return 0;
}

int cmd_weights(const Context& ctx) {
  const SurfaceNodeSet nodes = make_nodes(ctx.cfg, "sphere", 2000);
  const PhsPolyConfig p = make_phs(ctx.cfg, nodes.dim(), 2, 0.1);
  const auto i = as_size(ctx.cfg.integer("node", 0));
  if (i >= nodes.size()) throw InputError("node: index out of range");
  const CollapsedWeights w = surface_operator_weights(nodes, i, p, make_operator(ctx.cfg));
  const fs::path out = prepare_out(ctx, "weights.csv");
  std::FILE* fp = std::fopen(out.string().c_str(), "w");
  if (!fp) throw InputError("cannot write " + out.string());
  std::fprintf(fp, "index,weight\n");
  double sum = 0;
  for (std::size_t k = 0; k < w.indices.size(); ++k) {
    std::fprintf(fp, "%zu,%.17g\n", w.indices[k], w.values[k]);
    sum += w.values[k];
  }
  std::fclose(fp);
  std::printf("weights: node=%zu n_s=%zu sum=%.6e out=%s\n", i, w.indices.size(), sum, out.string().c_str());
  return 0;
}

int cmd_assemble(const Context& ctx) {
  const SurfaceNodeSet nodes = make_nodes(ctx.cfg, "sphere", 2000);
  const PhsPolyConfig p = make_phs(ctx.cfg, nodes.dim(), 2, 0.1);
  const OperatorMatrix M = assemble(nodes, p, make_operator(ctx.cfg));
  const fs::path out = prepare_out(ctx, "operator.mtx");
  write_matrix_market(out, M);
  std::printf("assemble: N=%zu nnz=%ld out=%s\n", nodes.size(), static_cast<long>(M.nonZeros()), out.string().c_str());
  return 0;
}

int cmd_spectrum(const Context& ctx) {
  const SurfaceNodeSet nodes = make_nodes(ctx.cfg, "sphere", 2000);
  const PhsPolyConfig p = make_phs(ctx.cfg, nodes.dim(), 2, 0.1);
  const OperatorMatrix M = assemble(nodes, p, make_operator(ctx.cfg));
  const std::string mode = ctx.cfg.str("mode", nodes.size() <= 6000 ? "dense" : "extremal");
  ExtremalOptions eo;
  eo.count = static_cast<int>(ctx.cfg.integer("count", 6));
  eo.shift = ctx.cfg.real("shift", 1.0);
  const SpectrumReport rep = spectrum(M, mode == "dense" ? SpectrumMode::dense_full : SpectrumMode::extremal, eo);
  const fs::path out = prepare_out(ctx, "spectrum.csv");
  write_spectrum_csv(out, rep);
  double min_re = 0;
  for (const auto& z : rep.eigenvalues) min_re = std::min(min_re, z.real());
  std::printf("spectrum: N=%zu mode=%s max_re=%.6e min_re=%.6e out=%s\n", nodes.size(), rep.method.c_str(), rep.max_real,
              min_re, out.string().c_str());
  return 0;
}

void print_run(const char* label, const ProblemRun& r, const fs::path& out) {
  std::printf("%s: N=%zu h=%.6g error=%.6e out=%s\n", label, r.nodes.size(), r.nodes.h(), r.error, out.string().c_str());
}

int cmd_poisson(const Context& ctx) {
  PoissonOptions o = poisson_options(ctx.cfg, ctx.cfg.real("h", 0.1));
  if (ctx.cfg.has("n")) o.n = as_size(ctx.cfg.integer("n", 0));
  const ProblemRun r = poisson_bvp(o);
  const fs::path out = prepare_out(ctx, "poisson.ply");
  write_run_ply(out, r);
  print_run("poisson", r, out);
  return 0;
}

int cmd_heat(const Context& ctx) {
  const ProblemRun r = run_heat(ctx.cfg, as_size(ctx.cfg.integer("n", 2000)));
  const fs::path out = prepare_out(ctx, "heat.ply");
  write_run_ply(out, r);
  print_run("heat", r, out);
  return 0;
}

int cmd_advect(const Context& ctx) {
  const ProblemRun r = advect(advection_options(ctx.cfg, as_size(ctx.cfg.integer("n", 2000))));
  const fs::path out = prepare_out(ctx, "advect.ply");
  write_run_ply(out, r);
  print_run("advect", r, out);
  return 0;
}

int cmd_turing(const Context& ctx) {
  const SurfaceNodeSet nodes = make_nodes(ctx.cfg, "torus", 4000);
  TuringOptions o;
  o.params = ctx.cfg.str("pattern", "spots") == "stripes" ? TuringParams::stripes() : TuringParams::spots();
  o.seed = static_cast<std::uint64_t>(ctx.cfg.integer("seed", 1));
  o.dt = ctx.cfg.real("dt", 0.02);
  o.l = static_cast<int>(ctx.cfg.integer("l", 6));
  o.m = static_cast<int>(ctx.cfg.integer("m", 5));
  if (ctx.cfg.has("n_s")) o.n_s = as_size(ctx.cfg.integer("n_s", 0));
  o.n_perp = as_size(ctx.cfg.integer("n_perp", 10));
  o.eps_normal = ctx.cfg.real("eps_normal", 0.1);
  o.final_time = ctx.cfg.maybe_real("t_final");
  const std::string solver = ctx.cfg.str("solver", "auto");
  o.method = solver == "direct" ? SolveMethod::direct
             : solver == "bicgstab" ? SolveMethod::bicgstab_ilu0
                                    : SolveMethod::automatic;
  const ProblemRun r = turing_static(nodes, o);
  const fs::path out = prepare_out(ctx, "turing.ply");
  write_run_ply(out, r);
  std::printf("turing: N=%zu steps=%zu u_min=%.6g u_max=%.6g u_std=%.6g out=%s\n", nodes.size(), r.steps,
              r.stat("u_min"), r.stat("u_max"), r.stat("u_std"), out.string().c_str());
  return 0;
}

int cmd_moving(const Context& ctx) {
  std::vector<TimeSample> history;
  const ProblemRun r = expanding_sphere_conservation(moving_options(ctx.cfg, ctx.cfg.real("dx", 0.2)), &history);
  const fs::path out = prepare_out(ctx, "moving.csv");
  write_time_series_csv(out, history);
  std::printf("moving: N0=%.0f N_final=%.0f steps=%zu error=%.6e out=%s\n", r.stat("n0"), r.stat("n_final"), r.steps,
              r.error, out.string().c_str());
  return 0;
}

int cmd_converge(const Context& ctx) {
  const std::string& problem = ctx.target;
  std::vector<ProblemRun> runs;
  if (problem == "poisson") {
    for (double h : ctx.cfg.list("levels", {0.2, 0.1})) runs.push_back(poisson_bvp(poisson_options(ctx.cfg, h)));
  } else if (problem == "heat") {
    for (double n : ctx.cfg.list("levels", {1000, 2000})) runs.push_back(run_heat(ctx.cfg, static_cast<std::size_t>(n)));
  } else if (problem == "advect") {
    for (double n : ctx.cfg.list("levels", {1000, 2000}))
      runs.push_back(advect(advection_options(ctx.cfg, static_cast<std::size_t>(n))));
  } else if (problem == "moving") {
    for (double dx : ctx.cfg.list("levels", {0.4, 0.2}))
      runs.push_back(expanding_sphere_conservation(moving_options(ctx.cfg, dx)));
  } else {
    throw InputError("converge: problem must be one of {poisson, heat, advect, moving}");
  }
  const auto rows = convergence_table(runs);
  const fs::path out = prepare_out(ctx, "converge.csv");
  write_convergence_csv(out, rows);
  fs::path timing = out;
  timing.replace_filename(out.stem().string() + "_timing.csv");
  write_timing_csv(timing, rows);
  std::printf("converge %s: levels=%zu error=%.6e", problem.c_str(), rows.size(), rows.back().error);
  if (rows.size() >= 2) std::printf(" eoc=%.3f", rows.back().eoc);
  std::printf(" out=%s\n", out.string().c_str());
  return 0;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"nodes",   "weights", "assemble", "spectrum", "poisson",
                                             "heat",    "advect",  "turing",   "moving",   "converge"};
  return c;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Surface PDE solver: PHS+poly RBF-FD with constant-along-normal stencils"};
  app.name("surfpde");
  app.set_help_flag("--help", "print this help");
  std::string command, target, config_path;
  std::string command_list;
  for (const auto& c : commands()) command_list += (command_list.empty() ? "" : ", ") + c;
  app.add_option("command", command, "one of: " + command_list)->required();
  app.add_option("problem", target, "converge: poisson, heat, advect or moving");
  app.add_option("--config", config_path, "key = value configuration file");
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  for (const auto& k : schema()) flag_options[k.name] = app.add_option("--" + k.name, flag_values[k.name], k.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return 1;
  }

  try {
    if (std::find(commands().begin(), commands().end(), command) == commands().end())
      throw InputError("unknown command '" + command + "'");
    if (!target.empty() && command != "converge") throw InputError("unexpected argument '" + target + "'");
    Context ctx;
    ctx.command = command;
    ctx.target = target;
    if (command == "converge" && target.empty()) throw InputError("converge: missing problem name");
    if (!config_path.empty()) ctx.cfg = load_config(config_path);
    for (const auto& [name, opt] : flag_options)
      if (opt->count() > 0) ctx.cfg.set(name, flag_values[name]);
    ctx.cfg.validate();
    if (ctx.cfg.has("threads")) set_thread_count(static_cast<int>(ctx.cfg.integer("threads", 1)));

    if (command == "nodes") return cmd_nodes(ctx);
    if (command == "weights") return cmd_weights(ctx);
    if (command == "assemble") return cmd_assemble(ctx);
    if (command == "spectrum") return cmd_spectrum(ctx);
    if (command == "poisson") return cmd_poisson(ctx);
    if (command == "heat") return cmd_heat(ctx);
    if (command == "advect") return cmd_advect(ctx);
    if (command == "turing") return cmd_turing(ctx);
    if (command == "moving") return cmd_moving(ctx);
    return cmd_converge(ctx);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), app.help().c_str());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 2;
  }
}

}  // namespace surfpde
