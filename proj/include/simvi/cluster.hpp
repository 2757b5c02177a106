#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "simvi/operators.hpp"

namespace simvi {

// Star topology: worker 0 is the server and keeps its own shard locally.
// One gather_average call is one communication round no matter how many
// points ride along.
class Cluster {
 public:
  explicit Cluster(std::vector<OperatorShard> shards, bool parallel = false);

  std::vector<DualVector> gather_average(const std::vector<Point>& points);
  DualVector gather_average(const Point& z) { return gather_average(std::vector<Point>{z}).front(); }

  // Server-side evaluation of its own shard; no communication.
  DualVector server_evaluate(const Point& z) const { return shards_.front()->evaluate(z); }
  const OperatorShard& server_shard() const { return shards_.front(); }

  void reset_counters() {
    rounds_ = 0;
    bytes_ = 0;
  }

  std::size_t round_count() const { return rounds_; }
  std::uint64_t bytes_sent() const { return bytes_; }
  std::size_t m() const { return shards_.size(); }
  bool parallel() const { return parallel_; }
  const std::vector<OperatorShard>& shards() const { return shards_; }

 private:
  std::vector<OperatorShard> shards_;
  bool parallel_;
  std::size_t rounds_ = 0;
  std::uint64_t bytes_ = 0;
};

// Lanes for parallel gathers: VI_SIM_THREADS if set, else hardware concurrency.
unsigned worker_threads();

// Contiguous equal blocks of matrices, one mean per block.
std::vector<Eigen::MatrixXd> shard_means(const std::vector<Eigen::MatrixXd>& matrices, std::size_t m);
std::vector<OperatorShard> shard_data(const std::vector<Eigen::MatrixXd>& matrices, std::size_t m);
std::vector<OperatorShard> saddle_shards(const std::vector<Eigen::MatrixXd>& means);

}  // namespace simvi
