#include "simvi/cli.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simvi/bench.hpp"
#include "simvi/verify.hpp"

namespace simvi {

namespace {

struct Options {
  Eigen::Index d = 25;
  std::size_t T = 10000;
  std::size_t m = 5;
  std::uint64_t seed = 1;
  double eps = 1e-3;
  std::size_t K = 5000;
  std::string c = "1";
  std::string solver = "paus";
  std::string geometry;  // empty: the solver's own
  std::string out = "results";
  std::string config;
  std::string base_file;
  bool per_entry = false;
  bool timing = false;
  bool stop_at_eps = false;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(no) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    for (auto& ch : key)
      if (ch == '-') ch = '_';
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

template <class T>
T parse_num(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T x{};
  if (!(is >> x) || !is.eof()) throw ConfigError("config key " + key + ": cannot parse '" + v + "'");
  return x;
}

// Fills options the command line left unset. Returns whether the file set a seed.
bool apply_config(Options& o, const CLI::App& app, const std::string& path) {
  const auto kv = read_config(path);
  const std::map<std::string, std::function<void(const std::string&)>> setters{
      {"d", [&](const std::string& v) { o.d = parse_num<Eigen::Index>("d", v); }},
      {"T", [&](const std::string& v) { o.T = parse_num<std::size_t>("T", v); }},
      {"m", [&](const std::string& v) { o.m = parse_num<std::size_t>("m", v); }},
      {"seed", [&](const std::string& v) { o.seed = parse_num<std::uint64_t>("seed", v); }},
      {"eps", [&](const std::string& v) { o.eps = parse_num<double>("eps", v); }},
      {"K", [&](const std::string& v) { o.K = parse_num<std::size_t>("K", v); }},
      {"c", [&](const std::string& v) { o.c = v; }},
      {"solver", [&](const std::string& v) { o.solver = v; }},
      {"geometry", [&](const std::string& v) { o.geometry = v; }},
      {"out", [&](const std::string& v) { o.out = v; }},
      {"base_file", [&](const std::string& v) { o.base_file = v; }},
      {"per_entry", [&](const std::string& v) { o.per_entry = parse_bool(v); }},
      {"timing", [&](const std::string& v) { o.timing = parse_bool(v); }},
      {"stop_at_eps", [&](const std::string& v) { o.stop_at_eps = parse_bool(v); }},
  };
  for (const auto& [k, v] : kv) {
    const auto it = setters.find(k);
    if (it == setters.end()) throw ConfigError("unknown config key '" + k + "'");
    std::string flag = "--" + k;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    if (app.count(flag) == 0) it->second(v);
  }
  return kv.count("seed") > 0;
}

std::vector<double> parse_c_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const double v = parse_num<double>("c", item);
    if (!(v > 0.0)) throw ConfigError("stepsize multipliers must be positive");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty multiplier list");
  return out;
}

GameSpec game_spec(const Options& o) {
  GameSpec g;
  g.d = o.d;
  g.T = o.T;
  g.m = o.m;
  g.seed = o.seed;
  g.base_file = o.base_file;
  g.per_entry = o.per_entry;
  g.validate();
  if (!(o.eps > 0.0)) throw ConfigError("eps must be positive");
  if (o.K < 1) throw ConfigError("K must be at least 1");
  return g;
}

Budget budget(const Options& o) {
  Budget b;
  b.K = o.K;
  b.eps = o.eps;
  if (o.stop_at_eps) b.stop_at_gap = o.eps;
  return b;
}

SolverSpec solver_spec(const Options& o, double c) {
  SolverSpec s;
  s.kind = parse_solver(o.solver);
  s.c = c;
  const std::string geo = o.geometry.empty() ? (s.kind == SolverKind::Euclidean ? "euclidean" : "entropy") : o.geometry;
  if (geo != "entropy" && geo != "euclidean") throw ConfigError("geometry must be entropy or euclidean");
  if (s.kind == SolverKind::Paus && geo == "euclidean") s.kind = SolverKind::Euclidean;
  if (s.kind == SolverKind::Euclidean && geo == "entropy")
    throw ConfigError("the euclidean solver has no entropic variant; use --solver paus");
  if (s.kind == SolverKind::MirrorProx && geo == "euclidean") {
    s.euclidean_geometry = true;
    s.label = "mirror-prox-euclidean";
  }
  return s;
}

void print_summary(const ExperimentResult& r, double eps) {
  std::cout << "constants: L=" << format_double(r.constants.L) << " L_F1=" << format_double(r.constants.L_F1)
            << " delta=" << format_double(r.constants.delta) << " (l1/linf), delta_l2="
            << format_double(r.constants_l2.delta) << "\n";
  for (const auto& s : r.series) {
    std::cout << s.label << ": ";
    if (!s.error.empty()) {
      std::cout << "FAILED (" << s.error << ")\n";
      continue;
    }
    const auto hit = rounds_to_gap(s.log, eps);
    std::cout << "gamma=" << format_double(s.gamma) << " rounds=" << s.log.back().round
              << " final_gap=" << format_double(s.log.back().gap) << " rounds_to_eps="
              << (hit ? std::to_string(*hit) : std::string("-")) << " slope[1e2,1e4]="
              << format_double(loglog_slope(s.log, 1e2, 1e4)) << "\n";
  }
}

int finish(const ExperimentResult& r, const Options& o) {
  emit_csv(r, o.out, o.timing);
  print_summary(r, o.eps);
  for (const auto& s : r.series)
    if (!s.error.empty()) return 2;
  return 0;
}

}  // namespace

int parse_and_dispatch(int argc, char** argv) {
  Options o;
  CLI::App app{"Distributed VI solvers under data similarity: run, compare, sweep, check"};
  app.require_subcommand(1);
  app.add_option("--d", o.d, "matrix dimension")->check(CLI::Range(2, 100000));
  app.add_option("--T", o.T, "number of sampled matrices");
  app.add_option("--m", o.m, "number of workers (server included)");
  app.add_option("--seed", o.seed, "game seed");
  app.add_option("--eps", o.eps, "target accuracy; sets the inner tolerance");
  app.add_option("--K", o.K, "outer iterations per solver (two rounds each)");
  app.add_option("--c", o.c, "stepsize multiplier, comma-separated list for sweep");
  app.add_option("--solver", o.solver, "paus | mirror-prox | euclidean");
  app.add_option("--geometry", o.geometry, "entropy | euclidean");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--config", o.config, "key=value file; command-line flags win");
  app.add_option("--base-file", o.base_file, "read C from a file instead of the synthetic base");
  app.add_flag("--per-entry", o.per_entry, "draw one Rademacher sign per matrix entry");
  app.add_flag("--timing", o.timing, "write wall-clock times to the CSVs");
  app.add_flag("--stop-at-eps", o.stop_at_eps, "stop each solver once its gap reaches eps");

  auto* run = app.add_subcommand("run", "run one solver");
  auto* compare = app.add_subcommand("compare", "PAUS vs Mirror Prox vs the Euclidean method");
  auto* sweep = app.add_subcommand("sweep", "stepsize multiplier study");
  auto* check = app.add_subcommand("check", "run the verification suites");
  for (auto* s : {run, compare, sweep, check}) {
    s->fallthrough();
    s->footer("Flags are shared by all subcommands; see " + std::string(argc > 0 ? argv[0] : "simvi") + " --help.");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!o.config.empty()) {
      const bool has_seed = apply_config(o, app, o.config);
      if (compare->parsed() && !has_seed) throw ConfigError("config file for compare must set seed");
    }

    if (check->parsed()) {
      bool ok = true;
      for (const auto& r : verify::run_all_checks(o.seed)) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        ok = ok && r.pass;
      }
      return ok ? 0 : 3;
    }

    const GameSpec spec = game_spec(o);
    std::vector<SolverSpec> solvers;
    if (run->parsed()) {
      solvers.push_back(solver_spec(o, parse_c_list(o.c).at(0)));
    } else if (compare->parsed()) {
      const double c = parse_c_list(o.c).at(0);
      solvers = {{SolverKind::Paus, c, "paus"},
                 {SolverKind::MirrorProx, c, "mirror-prox"},
                 {SolverKind::Euclidean, c, "euclidean"}};
    } else {
      for (double c : parse_c_list(app.count("--c") == 0 && o.c == "1" ? "0.25,0.5,1,2,4" : o.c)) {
        SolverSpec s = solver_spec(o, c);
        s.label = (s.label.empty() ? solver_name(s.kind) : s.label) + "_c" + format_double(c);
        solvers.push_back(s);
      }
    }
    return finish(run_comparison(spec, solvers, budget(o)), o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for the flag list.\n";
    return 1;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace simvi
