#pragma once

#include "rankzo/objective.hpp"
#include "rankzo/rng.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rankzo {

/// N x d matrix of i.i.d. standard normals; row i is direction u_i.
struct DirectionBatch {
  Matrix directions;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t counter_start = 0;  // rng position before the draw

  [[nodiscard]] int size() const { return static_cast<int>(directions.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(directions.cols()); }
};

/// Throws std::invalid_argument unless N >= 4 and N % 4 == 0.
void require_batch_size(int N);

DirectionBatch sample_directions(CounterRng& rng, int N, int d);

class QueryLedger {
 public:
  /// Opens a new per-iteration bucket; later charges land there.
  void begin_iteration();
  void charge(long long queries);

  [[nodiscard]] long long total() const { return total_; }
  [[nodiscard]] const std::vector<long long>& per_iteration() const { return per_iteration_; }

 private:
  long long total_ = 0;
  std::vector<long long> per_iteration_;
};

class NonFiniteValueError : public std::runtime_error {
 public:
  NonFiniteValueError(int index, double value);
  [[nodiscard]] int index() const { return index_; }

 private:
  int index_;
};

/// Result of one rank-oracle call. Ranks are 0-based: rank 0 is the best
/// (smallest) value. The raw function values are an instrumentation
/// side-channel and are only readable when the oracle was asked to keep them.
class RankedBatch {
 public:
  RankedBatch(DirectionBatch batch, std::vector<int> order, std::vector<double> values, bool expose_values);

  [[nodiscard]] const DirectionBatch& batch() const { return batch_; }
  [[nodiscard]] int size() const { return batch_.size(); }
  [[nodiscard]] std::span<const int> order() const { return order_; }

  /// Direction with the given rank.
  [[nodiscard]] Eigen::RowVectorXd direction(int rank) const { return batch_.directions.row(order_[static_cast<std::size_t>(rank)]); }

  [[nodiscard]] bool values_exposed() const { return expose_values_; }
  /// f(x + alpha u_i) indexed by original sample index. Instrumentation only.
  [[nodiscard]] std::span<const double> instrumentation_values() const;
  /// f(x + alpha u_(rank)). Instrumentation only.
  [[nodiscard]] double instrumentation_value_at_rank(int rank) const;

  [[nodiscard]] long long queries_charged() const { return batch_.size(); }

 private:
  DirectionBatch batch_;
  std::vector<int> order_;
  std::vector<double> values_;
  bool expose_values_;
};

/// Evaluates f(x + alpha u_i) for every row, charges N queries, and returns
/// the stable ascending order (ties keep original index order).
RankedBatch rank_oracle(const Objective& obj, const Vector& x, double alpha, DirectionBatch batch,
                        QueryLedger& ledger, bool expose_values = false);

/// 0-based ranks of the selected set: plus = {0..N/4-1}, minus = {3N/4..N-1}.
struct SelectedRanks {
  std::vector<int> plus;
  std::vector<int> minus;
};

SelectedRanks selected_index_set(int N);

}  // namespace rankzo
