#include "simvi/cluster.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

namespace simvi {

namespace {

DualVector evaluate_on(const Operator& op, const Point& z, std::size_t worker) {
  try {
    return op.evaluate(z);
  } catch (const std::exception& e) {
    throw WorkerError("worker " + std::to_string(worker) + ": " + e.what(), worker);
  }
}

}  // namespace

unsigned worker_threads() {
  if (const char* env = std::getenv("VI_SIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Cluster::Cluster(std::vector<OperatorShard> shards, bool parallel)
    : shards_(std::move(shards)), parallel_(parallel) {
  if (shards_.empty()) throw ConfigError("cluster needs at least one shard");
  for (const auto& s : shards_)
    if (!s) throw ConfigError("null shard");
}

std::vector<DualVector> Cluster::gather_average(const std::vector<Point>& points) {
  if (points.empty()) throw ParameterError("gather of an empty point list");
  const std::size_t m = shards_.size(), n = points.size();

  // results[w][p]; filled by worker, reduced in worker order
  std::vector<std::vector<DualVector>> results(m, std::vector<DualVector>(n));
  auto work = [&](std::size_t w) {
    for (std::size_t p = 0; p < n; ++p) results[w][p] = evaluate_on(*shards_[w], points[p], w);
  };

  const unsigned lanes = parallel_ ? std::min<unsigned>(worker_threads(), static_cast<unsigned>(m)) : 1u;
  if (lanes <= 1) {
    for (std::size_t w = 0; w < m; ++w) work(w);
  } else {
    std::vector<std::exception_ptr> errs(lanes);
    std::vector<std::thread> pool;
    for (unsigned l = 0; l < lanes; ++l)
      pool.emplace_back([&, l] {
        try {
          for (std::size_t w = l; w < m; w += lanes) work(w);
        } catch (...) {
          errs[l] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }

  std::vector<DualVector> avg;
  avg.reserve(n);
  Eigen::Index coords = 0;
  for (std::size_t p = 0; p < n; ++p) {
    DualVector acc = results[0][p];
    for (std::size_t w = 1; w < m; ++w) {
      if (!results[w][p].same_shape(acc)) throw ShapeError("workers returned different shapes");
      acc += results[w][p];
    }
    acc *= 1.0 / static_cast<double>(m);
    coords += points[p].total_size() + acc.total_size();
    avg.push_back(std::move(acc));
  }
  ++rounds_;
  // points out plus results back, per worker
  bytes_ += static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(coords) * 8u;
  return avg;
}

std::vector<Eigen::MatrixXd> shard_means(const std::vector<Eigen::MatrixXd>& matrices, std::size_t m) {
  if (m == 0 || matrices.empty() || matrices.size() % m != 0)
    throw ConfigError("matrix count must be a positive multiple of the worker count");
  const std::size_t n = matrices.size() / m;
  std::vector<Eigen::MatrixXd> means;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(matrices[0].rows(), matrices[0].cols());
    for (std::size_t t = i * n; t < (i + 1) * n; ++t) acc += matrices[t];
    means.push_back(acc / static_cast<double>(n));
  }
  return means;
}

std::vector<OperatorShard> saddle_shards(const std::vector<Eigen::MatrixXd>& means) {
  std::vector<OperatorShard> out;
  out.reserve(means.size());
  for (const auto& mm : means) out.push_back(make_saddle_shard(mm));
  return out;
}

std::vector<OperatorShard> shard_data(const std::vector<Eigen::MatrixXd>& matrices, std::size_t m) {
  return saddle_shards(shard_means(matrices, m));
}

}  // namespace simvi
