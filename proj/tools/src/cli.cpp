#include "conesv_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace conesv::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Input problems the user can fix: bad files, flags, dimensions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Matrix load(const std::string& path) {
  try {
    return read_matrix_file(path);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

double angle_over_pi(double lambda) {
  return std::acos(std::clamp(lambda, -1.0, 1.0)) / std::numbers::pi;
}

std::string format_pi(double x) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << x;
  return os.str();
}

json to_json(const Vector& x) {
  json a = json::array();
  for (int i = 0; i < x.size(); ++i) a.push_back(x(i));
  return a;
}

SrplParams preset_params(const std::string& name) {
  if (name.empty()) return {};
  static const std::map<std::string, SrplPreset> names{
      {"schur-orthant", SrplPreset::SchurOrthant},
      {"schur-schur", SrplPreset::SchurSchur},
      {"circulant", SrplPreset::CirculantPsv},
      {"matrix-cone", SrplPreset::MatrixCone},
  };
  auto it = names.find(name);
  if (it == names.end()) throw InputError("unknown preset '" + name + "'");
  return srpl_preset(it->second);
}

Solution run_eao(const SVInstance& inst, const RunConfig& cfg) {
  MultistartConfig ms;
  ms.restarts = cfg.restarts;
  ms.time_budget = cfg.time_limit;
  ms.seed = cfg.seed;
  ms.threads = cfg.threads;
  ms.params.delta = cfg.tol;
  return solve_eao(inst, ms);
}

Solution run_srpl(const SVInstance& inst, const RunConfig& cfg) {
  SrplMultistartConfig ms;
  ms.restarts = cfg.restarts;
  ms.time_budget = cfg.time_limit;
  ms.seed = cfg.seed;
  ms.threads = cfg.threads;
  ms.params = preset_params(cfg.preset);
  ms.params.delta = cfg.tol;
  return solve_srpl(inst, ms);
}

Solution run_bfas(const SVInstance& inst, const RunConfig& cfg) {
  BfasConfig bc;
  bc.time_limit = cfg.time_limit;
  bc.threads = cfg.threads;
  return solve_bfas(inst, bc);
}

Solution run_bnb(const SVInstance& inst, const RunConfig& cfg,
                 std::optional<std::pair<Vector, Vector>> warm = std::nullopt) {
  BnbConfig bc;
  bc.gap_tol = cfg.tol;
  bc.time_limit = cfg.time_limit;
  bc.seed = cfg.seed;
  bc.record_log = false;
  bc.warm_start = std::move(warm);
  return solve_bnb(inst, bc);
}

void print_indices(std::ostream& os, const std::vector<int>& idx) {
  for (size_t k = 0; k < idx.size(); ++k) os << (k ? " " : "") << idx[k];
}

void print_vector(std::ostream& os, const Vector& x) {
  for (int i = 0; i < x.size(); ++i) os << (i ? " " : "") << x(i);
}

json report_json(const std::string& command, const RunConfig& cfg, const SVInstance& inst,
                 const PipelineResult& res) {
  const Solution& s = res.solution;
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  j["algo"] = cfg.algo;
  j["answered_by"] = res.answered_by;
  j["dims"] = {{"m", inst.m()},
               {"n", inst.n()},
               {"p", inst.P().num_generators()},
               {"q", inst.Q().num_generators()}};
  j["status"] = to_string(s.status);
  j["lambda"] = s.lambda;
  j["lower"] = s.lower;
  j["upper"] = s.upper;
  j["angle"] = std::acos(std::clamp(s.lambda, -1.0, 1.0));
  j["angle_over_pi"] = angle_over_pi(s.lambda);
  j["kkt_residual"] = s.kkt_residual;
  j["support_I"] = s.support_I;
  j["support_J"] = s.support_J;
  j["u"] = to_json(s.u);
  j["v"] = to_json(s.v);
  j["work"] = s.work;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  if (!cfg.omit_timing) j["wall_time"] = s.wall_time;
  return j;
}

void report_text(std::ostream& os, const RunConfig& cfg, const PipelineResult& res) {
  const Solution& s = res.solution;
  os << std::setprecision(17);
  os << "status        " << to_string(s.status) << '\n';
  os << "answered_by   " << res.answered_by << '\n';
  os << "lambda        " << s.lambda << '\n';
  if (s.status == Status::BoundPair) os << "bounds        [" << s.lower << ", " << s.upper << "]\n";
  os << "angle         " << format_pi(angle_over_pi(s.lambda)) << " pi\n";
  os << std::setprecision(3) << "kkt_residual  " << s.kkt_residual << '\n' << std::setprecision(17);
  os << "support_I     ";
  print_indices(os, s.support_I);
  os << "\nsupport_J     ";
  print_indices(os, s.support_J);
  os << "\nu             ";
  print_vector(os, s.u);
  os << "\nv             ";
  print_vector(os, s.v);
  os << '\n';
  if (!cfg.omit_timing) os << std::setprecision(3) << "wall_time     " << s.wall_time << " s\n";
}

int emit_report(std::ostream& out, const std::string& command, const RunConfig& cfg,
                const SVInstance& inst, const PipelineResult& res) {
  if (cfg.output == "json") {
    out << report_json(command, cfg, inst, res).dump(2) << '\n';
  } else {
    report_text(out, cfg, res);
  }
  return res.solution.status == Status::BoundPair ? kExitBoundOnly : kExitSolved;
}

int default_threads() {
  if (const char* env = std::getenv("CONESV_THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && t >= 1) return static_cast<int>(t);
  }
  return 1;
}

// ---- gen ----------------------------------------------------------------

struct GenOptions {
  std::string kind;
  int n = 5;
  int m = 10;
  int k = 3;
  int l = 3;
  double density = 0.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

// Best known optima for the circulant family.
std::optional<double> circulant_reference(int n) {
  static const std::map<int, double> table{{13, 0.762950}, {15, 0.757765}, {17, 0.764971},
                                           {19, 0.768062}, {21, 0.768769}, {23, 0.766370}};
  auto it = table.find(n);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

void write_instance(const fs::path& dir, const SVInstance& inst) {
  write_matrix_file((dir / "A.txt").string(), inst.A());
  write_matrix_file((dir / "G.txt").string(), inst.P().generators());
  write_matrix_file((dir / "H.txt").string(), inst.Q().generators());
}

int cmd_gen(const GenOptions& g, std::ostream& out) {
  const fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + g.out_dir + ": " + ec.message());
  json man;
  man["schema"] = "cone-sv-gen/1";
  man["kind"] = g.kind;
  man["files"] = {{"A", "A.txt"}, {"G", "G.txt"}, {"H", "H.txt"}};
  if (g.kind == "schur-orthant" || g.kind == "schur-schur") {
    GeneratedInstance gi = g.kind == "schur-orthant" ? gen_schur_orthant(g.n) : gen_schur_schur(g.n);
    write_instance(dir, gi.inst);
    man["params"] = {{"n", g.n}};
    man["known_lambda"] = *gi.known_lambda;
    man["known_angle_over_pi"] = angle_over_pi(*gi.known_lambda);
  } else if (g.kind == "biclique") {
    BicliqueInstance bi = gen_biclique(g.m, g.n, g.density, g.k, g.l, g.seed);
    write_instance(dir, bi.inst);
    std::ofstream edges(dir / "edges.txt");
    write_edge_list(edges, bi.B);
    man["files"]["edges"] = "edges.txt";
    man["params"] = {{"m", g.m}, {"n", g.n}, {"k", g.k}, {"l", g.l},
                     {"density", g.density}, {"seed", g.seed}};
    man["planted_rows"] = bi.planted_rows;
    man["planted_cols"] = bi.planted_cols;
    if (g.density == 0.0) {
      const double lam = -std::sqrt(static_cast<double>(g.k) * g.l);
      man["known_lambda"] = lam;
    }
  } else if (g.kind == "circulant") {
    CirculantReduction cr = gen_circulant(g.n);
    write_instance(dir, cr.inst);
    man["params"] = {{"n", g.n}};
    if (auto ref = circulant_reference(g.n)) man["reference_angle_over_pi"] = *ref;
  } else {
    throw InputError("unknown kind '" + g.kind + "'");
  }
  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw InputError("cannot write manifest in " + g.out_dir);
  mf << man.dump(2) << '\n';
  out << "wrote " << g.kind << " instance to " << g.out_dir << '\n';
  return kExitSolved;
}

// ---- bench --------------------------------------------------------------

struct BenchCell {
  std::string name;
  SVInstance inst;
  std::optional<double> reference;  // angle over pi
  std::vector<std::string> algos;
  double budget = 60.0;
  std::optional<int> restarts;
  std::uint64_t seed = 0;
  std::string preset;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

template <class T>
T parse_value(const std::string& key, const std::string& text, int line) {
  std::istringstream is(text);
  T v{};
  if (!(is >> v) || !is.eof())
    throw InputError("suite line " + std::to_string(line) + ": bad value for " + key);
  return v;
}

// One cell per line: `<kind> key=value ...`. Kinds: schur-orthant, schur-schur,
// circulant (n=), biclique (m= n= k= l= density= gseed=), files (A= G= H=).
// Common keys: algos=a,b budget=seconds restarts= seed= preset= name=.
std::vector<BenchCell> read_suite(std::istream& is, const fs::path& base) {
  std::vector<BenchCell> cells;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    std::map<std::string, std::string> kv;
    for (std::string tok; ls >> tok;) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        throw InputError("suite line " + std::to_string(lineno) + ": expected key=value, got '" +
                         tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto take = [&](const std::string& key, const std::string& def) {
      auto it = kv.find(key);
      if (it == kv.end()) return def;
      std::string v = it->second;
      kv.erase(it);
      return v;
    };
    const int n = parse_value<int>("n", take("n", "5"), lineno);
    std::optional<BenchCell> cell;
    if (kind == "schur-orthant" || kind == "schur-schur") {
      GeneratedInstance gi = kind == "schur-orthant" ? gen_schur_orthant(n) : gen_schur_schur(n);
      cell = BenchCell{gi.name, gi.inst, angle_over_pi(*gi.known_lambda), {}, 60.0, {}, 0, {}};
    } else if (kind == "circulant") {
      CirculantReduction cr = gen_circulant(n);
      cell = BenchCell{"circulant-" + std::to_string(n), cr.inst, circulant_reference(n), {}, 60.0,
                       {}, 0, {}};
    } else if (kind == "biclique") {
      const int m = parse_value<int>("m", take("m", "10"), lineno);
      const int k = parse_value<int>("k", take("k", "3"), lineno);
      const int l = parse_value<int>("l", take("l", "3"), lineno);
      const double density = parse_value<double>("density", take("density", "0"), lineno);
      const auto gseed = parse_value<std::uint64_t>("gseed", take("gseed", "0"), lineno);
      BicliqueInstance bi = gen_biclique(m, n, density, k, l, gseed);
      std::optional<double> ref;
      if (density == 0.0) ref = angle_over_pi(-std::sqrt(static_cast<double>(k) * l));
      cell = BenchCell{"biclique-" + std::to_string(m) + "x" + std::to_string(n), bi.inst, ref, {},
                       60.0, {}, 0, {}};
    } else if (kind == "files") {
      auto path = [&](const std::string& key) {
        const std::string p = take(key, "");
        if (p.empty())
          throw InputError("suite line " + std::to_string(lineno) + ": files needs " + key + "=");
        return (base / p).string();
      };
      const Matrix A = load(path("A"));
      const Matrix G = load(path("G"));
      const Matrix H = load(path("H"));
      cell = BenchCell{"files-" + std::to_string(lineno),
                       SVInstance(A, make_cone(G, "P"), make_cone(H, "Q")), std::nullopt, {}, 60.0,
                       {}, 0, {}};
    } else {
      throw InputError("suite line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
    cell->algos = split(take("algos", "bfas"), ',');
    cell->budget = parse_value<double>("budget", take("budget", "60"), lineno);
    if (kv.count("restarts"))
      cell->restarts = parse_value<int>("restarts", take("restarts", "0"), lineno);
    cell->seed = parse_value<std::uint64_t>("seed", take("seed", "0"), lineno);
    cell->preset = take("preset", "");
    cell->name = take("name", cell->name);
    if (!kv.empty())
      throw InputError("suite line " + std::to_string(lineno) + ": unknown key '" +
                       kv.begin()->first + "'");
    for (const std::string& a : cell->algos)
      if (a != "bfas" && a != "bnb" && a != "eao" && a != "srpl")
        throw InputError("suite line " + std::to_string(lineno) + ": unknown algo '" + a + "'");
    cells.push_back(std::move(*cell));
  }
  return cells;
}

inline constexpr const char* kBenchHeader =
    "instance,algo,status,lambda,angle_over_pi,reference_angle_over_pi,abs_error_over_pi,"
    "elapsed,work,kkt_residual,error";

void write_restart_trace(const fs::path& file, const std::vector<double>& values,
                         const std::vector<double>& times) {
  std::ofstream os(file);
  os << std::setprecision(17) << "restart,finish_time,value,best_so_far\n";
  double best = kInf;
  for (size_t r = 0; r < values.size(); ++r) {
    if (std::isnan(values[r])) continue;
    best = std::min(best, values[r]);
    os << r << ',' << times[r] << ',' << values[r] << ',' << best << '\n';
  }
}

int cmd_bench(const std::string& suite_path, const std::string& csv_path,
              const std::string& trace_dir, std::ostream& out, std::ostream& err) {
  std::ifstream sf(suite_path);
  if (!sf) throw InputError("cannot open " + suite_path);
  const std::vector<BenchCell> cells = read_suite(sf, fs::path(suite_path).parent_path());
  std::ofstream csv_file;
  if (!csv_path.empty()) {
    csv_file.open(csv_path);
    if (!csv_file) throw InputError("cannot write " + csv_path);
  }
  std::ostream& csv = csv_path.empty() ? out : csv_file;
  if (!trace_dir.empty()) fs::create_directories(trace_dir);
  csv << kBenchHeader << '\n' << std::setprecision(12);
  for (const BenchCell& cell : cells) {
    for (const std::string& algo : cell.algos) {
      const auto t0 = std::chrono::steady_clock::now();
      Solution sol;
      std::string error;
      const std::string stem = cell.name + "_" + algo;
      try {
        if (algo == "bfas") {
          BfasConfig bc;
          bc.time_limit = cell.budget;
          sol = solve_bfas(cell.inst, bc);
        } else if (algo == "bnb") {
          BnbConfig bc;
          bc.time_limit = cell.budget;
          bc.seed = cell.seed;
          BnbResult r = solve_bnb_detailed(cell.inst, bc);
          sol = r.solution;
          if (!trace_dir.empty()) {
            std::ofstream os(fs::path(trace_dir) / (stem + "_nodes.csv"));
            write_node_log(os, r.log);
          }
        } else if (algo == "eao") {
          MultistartConfig ms;
          ms.restarts = cell.restarts.value_or(1 << 20);
          ms.time_budget = cell.budget;
          ms.seed = cell.seed;
          const PolyhedralCone P = cell.inst.P(), Q = cell.inst.Q();
          MultistartResult r = multistart_eao(
              cell.inst.A(), [&P]() { return polyhedral_oracle(P); },
              [&Q]() { return polyhedral_oracle(Q); }, ms);
          sol = make_solution(cell.inst, r.best.u, r.best.v, Status::Heuristic, "eao");
          sol.work = r.total_iterations;
          emit_solution(sol);
          if (!trace_dir.empty())
            write_restart_trace(fs::path(trace_dir) / (stem + ".csv"), r.values, r.finish_times);
        } else {
          SrplMultistartConfig ms;
          ms.restarts = cell.restarts.value_or(1 << 20);
          ms.time_budget = cell.budget;
          ms.seed = cell.seed;
          ms.params = preset_params(cell.preset);
          SrplMultistartResult r = multistart_srpl(cell.inst, ms);
          sol = make_solution(cell.inst, r.best.u, r.best.v, Status::Heuristic, "srpl");
          sol.work = r.total_iterations;
          emit_solution(sol);
          if (!trace_dir.empty())
            write_restart_trace(fs::path(trace_dir) / (stem + ".csv"), r.values, r.finish_times);
        }
      } catch (const std::exception& e) {
        error = e.what();
        err << "bench: " << cell.name << " / " << algo << ": " << error << '\n';
      }
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      csv << cell.name << ',' << algo << ',';
      if (error.empty()) {
        const double a = angle_over_pi(sol.lambda);
        csv << to_string(sol.status) << ',' << sol.lambda << ',' << a << ',';
        if (cell.reference) {
          csv << *cell.reference << ',' << std::abs(a - *cell.reference);
        } else {
          csv << ',';
        }
        csv << ',' << elapsed << ',' << sol.work << ',' << sol.kkt_residual << ',';
      } else {
        std::string e = error;
        std::replace(e.begin(), e.end(), ',', ';');
        csv << "error,,,,," << elapsed << ",,," << e;
      }
      csv << '\n';
    }
  }
  return kExitSolved;
}

void add_solver_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--algo", cfg.algo, "Solver")
      ->check(CLI::IsMember({"bfas", "bnb", "eao", "srpl", "auto"}));
  sub->add_option("--tol", cfg.tol, "BnB relative gap / heuristic stopping tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--time-limit", cfg.time_limit, "Seconds")->check(CLI::PositiveNumber);
  sub->add_option("--restarts", cfg.restarts, "Heuristic restarts")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "Random seed");
  sub->add_option("--threads", cfg.threads, "Worker threads (default $CONESV_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--output", cfg.output, "Report format")->check(CLI::IsMember({"text", "json"}));
  sub->add_option("--preset", cfg.preset, "SRPL weights")
      ->check(CLI::IsMember({"schur-orthant", "schur-schur", "circulant", "matrix-cone"}));
  sub->add_flag("--omit-timing", cfg.omit_timing, "Leave wall-clock fields out of the report");
  sub->add_option("--auto-cap", cfg.auto_cap, "Generator count up to which auto picks BFAS")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

Solution generator_anchored(const SVInstance& inst) {
  const auto t0 = std::chrono::steady_clock::now();
  const Matrix& G = inst.P().generators();
  const Matrix& H = inst.Q().generators();
  const Matrix At = inst.A().transpose();
  Vector bu, bv;
  double best = kInf;
  for (int i = 0; i < G.cols(); ++i) {
    const RayResult r = ray_subproblem(inst.A(), G.col(i), inst.Q());
    if (r.value < best) {
      best = r.value;
      bu = G.col(i);
      bv = r.v;
    }
  }
  for (int j = 0; j < H.cols(); ++j) {
    const RayResult r = ray_subproblem(At, H.col(j), inst.P());
    if (r.value < best) {
      best = r.value;
      bu = r.v;
      bv = H.col(j);
    }
  }
  Solution sol = make_solution(inst, bu, bv, Status::ExactGlobal, "generator-anchored");
  sol.work = G.cols() + H.cols();
  sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  emit_solution(sol);
  return sol;
}

PipelineResult solve_pipeline(const SVInstance& inst, const RunConfig& cfg) {
  PreprocessOutcome pre = check_nonnegative_case(inst);
  if (pre.solution) return {*pre.solution, "preprocess-nonnegative"};
  pre = check_extreme_case(inst);
  if (pre.solution) return {*pre.solution, "preprocess-extreme"};

  const bool pointed = inst.P().pointed() && inst.Q().pointed();
  if ((cfg.algo == "bnb" || cfg.algo == "srpl") && !pointed)
    throw Error(ErrorCode::NotPointed, cfg.algo + " needs pointed cones");
  if (cfg.algo == "bfas") return {run_bfas(inst, cfg), "bfas"};
  if (cfg.algo == "bnb") return {run_bnb(inst, cfg), "bnb"};
  if (cfg.algo == "eao") return {run_eao(inst, cfg), "eao"};
  if (cfg.algo == "srpl") return {run_srpl(inst, cfg), "srpl"};

  const int gens = inst.P().num_generators() + inst.Q().num_generators();
  if (gens <= cfg.auto_cap || !pointed) return {run_bfas(inst, cfg), "bfas"};
  RunConfig warm_cfg = cfg;
  warm_cfg.time_limit = std::min(cfg.time_limit, 5.0);
  const Solution warm = run_eao(inst, warm_cfg);
  return {run_bnb(inst, cfg, std::make_pair(warm.u, warm.v)), "bnb"};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cone-constrained singular values and maximal angles between polyhedral cones"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "conesv 0.1.0");

  RunConfig cfg;
  cfg.threads = default_threads();
  std::string a_path, g_path, h_path, export_lp;

  CLI::App* solve = app.add_subcommand("solve", "min <u, A v> over unit u in cone(G), v in cone(H)");
  solve->add_option("-A,--matrix", a_path, "Matrix file for A")->required();
  solve->add_option("-G,--gens-p", g_path, "Generators of P, one per column")->required();
  solve->add_option("-H,--gens-q", h_path, "Generators of Q, one per column")->required();
  solve->add_option("--export-lp", export_lp, "Also write the quadratic model in LP format");
  add_solver_options(solve, cfg);

  CLI::App* angle = app.add_subcommand("angle", "Largest angle between cone(G) and cone(H)");
  angle->add_option("-G,--gens-p", g_path, "Generators of P")->required();
  angle->add_option("-H,--gens-q", h_path, "Generators of Q")->required();
  angle->add_option("--export-lp", export_lp, "Also write the quadratic model in LP format");
  add_solver_options(angle, cfg);

  CLI::App* psv = app.add_subcommand("psv", "Least Pareto singular value of A");
  psv->add_option("-A,--matrix", a_path, "Matrix file for A")->required();
  psv->add_option("--export-lp", export_lp, "Also write the quadratic model in LP format");
  add_solver_options(psv, cfg);

  GenOptions gen_opts;
  CLI::App* gen = app.add_subcommand("gen", "Write a generated instance and its manifest");
  gen->add_option("kind", gen_opts.kind, "Instance family")
      ->required()
      ->check(CLI::IsMember({"schur-orthant", "schur-schur", "biclique", "circulant"}));
  gen->add_option("-n", gen_opts.n, "Dimension (columns for biclique)");
  gen->add_option("-m", gen_opts.m, "Rows (biclique)");
  gen->add_option("-k", gen_opts.k, "Planted rows (biclique)");
  gen->add_option("-l", gen_opts.l, "Planted columns (biclique)");
  gen->add_option("--density", gen_opts.density, "Edge density (biclique)");
  gen->add_option("--seed", gen_opts.seed, "Random seed (biclique)");
  gen->add_option("-o,--out-dir", gen_opts.out_dir, "Output directory");

  std::string suite_path, csv_path, trace_dir;
  CLI::App* bench = app.add_subcommand("bench", "Run a suite of (instance, algorithm) cells to CSV");
  bench->add_option("suite", suite_path, "Suite file")->required();
  bench->add_option("--csv", csv_path, "CSV output (default stdout)");
  bench->add_option("--trace-dir", trace_dir, "Directory for per-run traces");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitSolved;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSolved;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kExitSolved;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_opts, out);
    if (bench->parsed()) return cmd_bench(suite_path, csv_path, trace_dir, out, err);

    std::string command;
    Matrix A, G, H;
    if (solve->parsed()) {
      command = "solve";
      A = load(a_path);
      G = load(g_path);
      H = load(h_path);
    } else if (angle->parsed()) {
      command = "angle";
      G = load(g_path);
      H = load(h_path);
      if (G.rows() != H.rows())
        throw InputError("G has " + std::to_string(G.rows()) + " rows but H has " +
                         std::to_string(H.rows()));
      A = Matrix::Identity(G.rows(), H.rows());
    } else {
      command = "psv";
      A = load(a_path);
      G = Matrix::Identity(A.rows(), A.rows());
      H = Matrix::Identity(A.cols(), A.cols());
    }
    if (A.rows() != G.rows() || A.cols() != H.rows())
      throw InputError("dimension mismatch: A is " + std::to_string(A.rows()) + "x" +
                       std::to_string(A.cols()) + ", G has " + std::to_string(G.rows()) +
                       " rows, H has " + std::to_string(H.rows()) + " rows");
    const SVInstance inst(A, make_cone(G, "P"), make_cone(H, "Q"));
    if (!export_lp.empty()) {
      std::ofstream lp(export_lp);
      if (!lp) throw InputError("cannot write " + export_lp);
      export_miqcp(inst, lp);
    }
    cfg.command = command;
    PipelineResult res;
    if (command == "angle" && cfg.algo == "auto" && inst.m() <= 3) {
      PreprocessOutcome pre = check_nonnegative_case(inst);
      if (pre.solution) {
        res = {*pre.solution, "preprocess-nonnegative"};
      } else {
        res = {generator_anchored(inst), "generator-anchored"};
      }
    } else {
      res = solve_pipeline(inst, cfg);
    }
    return emit_report(out, command, cfg, inst, res);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::InvalidInput:
      case ErrorCode::InvalidGenerator:
      case ErrorCode::NotPointed:
      case ErrorCode::ParseError:
        return kExitInputError;
      default:
        return kExitNumericalFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumericalFailure;
  }
}

}  // namespace conesv::cli
