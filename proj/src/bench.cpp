#include "simvi/bench.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "simvi/random.hpp"

namespace simvi {

void GameSpec::validate() const {
  if (d < 2) throw ConfigError("game dimension must be at least 2");
  if (m < 1 || T < m || T % m != 0) throw ConfigError("T must be a positive multiple of m");
}

Eigen::MatrixXd synthetic_base(Eigen::Index d, const SyntheticBase& p) {
  Rng rng(p.seed);
  const Eigen::VectorXd w = rng.uniform_vector(d, p.w_min, p.w_max);
  Eigen::MatrixXd c(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      c(i, j) = w[i] * (1.0 - std::exp(-p.theta * std::abs(static_cast<double>(i - j))));
  return c;
}

Eigen::MatrixXd load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file " + path);
  long d = 0;
  if (!(in >> d) || d < 1) throw IoError("matrix file " + path + ": bad dimension line");
  Eigen::MatrixXd c(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      if (!(in >> c(i, j))) throw IoError("matrix file " + path + ": expected " + std::to_string(d * d) + " entries");
  return c;
}

Eigen::MatrixXd base_matrix(const GameSpec& spec) {
  if (spec.base_file.empty()) return synthetic_base(spec.d, spec.synthetic);
  Eigen::MatrixXd c = load_matrix_file(spec.base_file);
  if (c.rows() != spec.d) throw ConfigError("matrix file dimension differs from d");
  return c;
}

namespace {

// Visits A_1 .. A_T in order without storing them.
template <class Fn>
void for_each_sample(const GameSpec& spec, const Eigen::MatrixXd& c, Fn&& fn) {
  Rng rng(spec.seed);
  Eigen::MatrixXd a(c.rows(), c.cols());
  for (std::size_t t = 0; t < spec.T; ++t) {
    if (spec.per_entry) {
      for (Eigen::Index j = 0; j < c.cols(); ++j)
        for (Eigen::Index i = 0; i < c.rows(); ++i) a(i, j) = (1.0 + rng.rademacher()) * c(i, j);
    } else {
      a = (1.0 + rng.rademacher()) * c;
    }
    fn(t, a);
  }
}

}  // namespace

std::vector<Eigen::MatrixXd> generate_game(const GameSpec& spec) {
  spec.validate();
  const Eigen::MatrixXd c = base_matrix(spec);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(spec.T);
  for_each_sample(spec, c, [&](std::size_t, const Eigen::MatrixXd& a) { out.push_back(a); });
  return out;
}

std::vector<Eigen::MatrixXd> sample_shard_means(const GameSpec& spec) {
  spec.validate();
  const Eigen::MatrixXd c = base_matrix(spec);
  const std::size_t n = spec.T / spec.m;
  std::vector<Eigen::MatrixXd> means(spec.m, Eigen::MatrixXd::Zero(c.rows(), c.cols()));
  for_each_sample(spec, c, [&](std::size_t t, const Eigen::MatrixXd& a) { means[t / n] += a; });
  for (auto& mm : means) mm /= static_cast<double>(n);
  return means;
}

Eigen::MatrixXd global_mean(const std::vector<Eigen::MatrixXd>& means) {
  if (means.empty()) throw ConfigError("no shards");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(means[0].rows(), means[0].cols());
  for (const auto& mm : means) g += mm;
  return g / static_cast<double>(means.size());
}

SimilarityConstants constants_from_means(const std::vector<Eigen::MatrixXd>& means) {
  const Eigen::MatrixXd g = global_mean(means);
  SimilarityConstants k;
  k.L = lipschitz_matrix_game(g);
  k.L_F1 = lipschitz_matrix_game(means[0]);
  k.delta = similarity_matrix_game(g, means[0]);
  k.norm = NormTag::L1_Linf;
  return k;
}

SimilarityConstants constants_from_means_l2(const std::vector<Eigen::MatrixXd>& means) {
  const Eigen::MatrixXd g = global_mean(means);
  SimilarityConstants k;
  k.L = lipschitz_matrix_game_l2(g);
  k.L_F1 = lipschitz_matrix_game_l2(means[0]);
  k.delta = similarity_matrix_game_l2(g, means[0]);
  k.norm = NormTag::L2_L2;
  return k;
}

SimilarityConstants estimate_constants(const std::vector<Eigen::MatrixXd>& matrices, std::size_t m) {
  return constants_from_means(shard_means(matrices, m));
}

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::Paus: return "paus";
    case SolverKind::MirrorProx: return "mirror-prox";
    case SolverKind::Euclidean: return "euclidean";
  }
  return "?";
}

SolverKind parse_solver(const std::string& s) {
  if (s == "paus") return SolverKind::Paus;
  if (s == "mirror-prox") return SolverKind::MirrorProx;
  if (s == "euclidean") return SolverKind::Euclidean;
  throw ConfigError("unknown solver '" + s + "'");
}

ExperimentResult run_comparison(const GameSpec& spec, const std::vector<SolverSpec>& solvers, const Budget& budget) {
  return run_comparison(spec, sample_shard_means(spec), solvers, budget);
}

ExperimentResult run_comparison(const GameSpec& spec, const std::vector<Eigen::MatrixXd>& means,
                                const std::vector<SolverSpec>& solvers, const Budget& budget) {
  ExperimentResult res;
  res.spec = spec;
  res.constants = constants_from_means(means);
  res.constants_l2 = constants_from_means_l2(means);

  const Eigen::MatrixXd g = global_mean(means);
  Cluster cluster(saddle_shards(means));
  const std::vector<Eigen::Index> dims{g.rows(), g.cols()};

  RunOptions run;
  run.gap = matrix_game_gap(g);
  run.stop_at_gap = budget.stop_at_gap;
  InnerOptions inner;
  inner.eps = inner_eps_for_target(budget.eps);

  for (const auto& s : solvers) {
    SeriesResult out;
    out.kind = s.kind;
    out.c = s.c;
    out.label = s.label.empty() ? solver_name(s.kind) : s.label;
    cluster.reset_counters();
    try {
      RunResult r;
      if (s.kind == SolverKind::Paus) {
        out.constants = res.constants;
        PausConfig p;
        p.geometry = entropy_simplex(dims);
        out.constants.require_norm(p.geometry);
        if (!(out.constants.delta > 0.0)) throw ParameterError("delta = 0: shards are identical");
        p.gamma = out.gamma = s.c / out.constants.delta;
        p.K = budget.K;
        p.z0 = dgf_center(p.geometry);
        p.L_F1 = out.constants.L_F1;
        p.delta = out.constants.delta;
        p.enforce_step_bound = s.c <= 1.0;
        p.inner = inner;
        p.run = run;
        r = paus_run(p, cluster);
      } else {
        BaselineConfig b;
        b.K = budget.K;
        b.inner = inner;
        b.run = run;
        if (s.kind == SolverKind::MirrorProx) {
          out.constants = s.euclidean_geometry ? res.constants_l2 : res.constants;
          b.kind = BaselineKind::MirrorProx;
          b.geometry = s.euclidean_geometry ? euclidean_simplex(dims) : entropy_simplex(dims);
          out.constants.require_norm(b.geometry);
          b.stepsize = out.gamma = s.c / out.constants.L;
          b.z0 = dgf_center(b.geometry);
          r = mirror_prox_run(b, cluster);
        } else {
          out.constants = res.constants_l2;
          b.kind = BaselineKind::EuclideanPaus;
          b.geometry = euclidean_simplex(dims);
          out.constants.require_norm(b.geometry);
          if (!(out.constants.delta > 0.0)) throw ParameterError("delta = 0: shards are identical");
          b.stepsize = out.gamma = s.c / out.constants.delta;
          b.z0 = dgf_center(b.geometry);
          b.L_F1 = out.constants.L_F1;
          b.delta = out.constants.delta;
          b.enforce_step_bound = s.c <= 1.0;
          r = euclidean_paus_run(b, cluster);
        }
      }
      out.log = std::move(r.log);
      out.total_inner = r.total_inner;
    } catch (const Error& e) {
      out.error = e.what();
    }
    res.series.push_back(std::move(out));
  }
  return res;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + p.string());
  out << body;
  out.flush();
  if (!out) throw IoError("write failed for " + p.string());
}

}  // namespace

void emit_csv(const ExperimentResult& result, const std::string& dir, bool timing) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  std::ostringstream consts;
  consts << "solver,c,L,L_F1,delta,gamma,norm,status\n";
  for (const auto& s : result.series) {
    std::ostringstream body;
    body << "round,gap,inner_iters,elapsed_ms\n";
    for (const auto& r : s.log)
      body << r.round << ',' << format_double(r.gap) << ',' << r.inner_iters << ','
           << format_double(timing ? r.elapsed_ms : 0.0) << '\n';
    write_file(std::filesystem::path(dir) / (s.label + ".csv"), body.str());
    consts << s.label << ',' << format_double(s.c) << ',' << format_double(s.constants.L) << ','
           << format_double(s.constants.L_F1) << ',' << format_double(s.constants.delta) << ','
           << format_double(s.gamma) << ',' << to_string(s.constants.norm) << ','
           << (s.error.empty() ? "ok" : "failed") << '\n';
  }
  write_file(std::filesystem::path(dir) / "constants.csv", consts.str());
}

std::vector<RunRecord> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[4];
    for (auto& x : f)
      if (!std::getline(ls, x, ',')) throw IoError(path + ": malformed row");
    RunRecord r;
    r.round = std::stoull(f[0]);
    r.gap = f[1] == "nan" ? std::nan("") : std::stod(f[1]);
    r.inner_iters = std::stoull(f[2]);
    r.elapsed_ms = std::stod(f[3]);
    out.push_back(r);
  }
  return out;
}

double loglog_slope(const std::vector<RunRecord>& log, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const auto& r : log) {
    const double x = static_cast<double>(r.round);
    if (x < lo || x > hi || !(r.gap > 0.0)) continue;
    const double lx = std::log(x), ly = std::log(r.gap);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

std::optional<std::size_t> rounds_to_gap(const std::vector<RunRecord>& log, double eps) {
  for (const auto& r : log)
    if (r.gap <= eps) return r.round;
  return std::nullopt;
}

}  // namespace simvi
