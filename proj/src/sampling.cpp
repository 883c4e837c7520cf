#include "rankzo/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rankzo {

void require_batch_size(int N) {
  if (N < 4 || N % 4 != 0)
    throw std::invalid_argument("batch size N must be a positive multiple of 4, got " + std::to_string(N));
}

DirectionBatch sample_directions(CounterRng& rng, int N, int d) {
  require_batch_size(N);
  if (d < 1) throw std::invalid_argument("sample_directions: d must be positive");
  DirectionBatch batch;
  batch.seed = rng.seed();
  batch.stream = rng.stream();
  batch.counter_start = rng.counter();
  // Row-major fill so u_i is the i-th consecutive block of d draws.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u(N, d);
  rng.fill_normal({u.data(), static_cast<std::size_t>(u.size())});
  batch.directions = u;
  return batch;
}

void QueryLedger::begin_iteration() { per_iteration_.push_back(0); }

void QueryLedger::charge(long long queries) {
  if (queries < 0) throw std::invalid_argument("QueryLedger: negative charge");
  if (per_iteration_.empty()) per_iteration_.push_back(0);
  per_iteration_.back() += queries;
  total_ += queries;
}

NonFiniteValueError::NonFiniteValueError(int index, double value)
    : std::runtime_error("rank oracle: non-finite value " + std::to_string(value) + " at sample " +
                         std::to_string(index)),
      index_(index) {}

RankedBatch::RankedBatch(DirectionBatch batch, std::vector<int> order, std::vector<double> values,
                         bool expose_values)
    : batch_(std::move(batch)), order_(std::move(order)), values_(std::move(values)), expose_values_(expose_values) {}

std::span<const double> RankedBatch::instrumentation_values() const {
  if (!expose_values_) throw std::logic_error("RankedBatch: function values are not exposed");
  return values_;
}

double RankedBatch::instrumentation_value_at_rank(int rank) const {
  return instrumentation_values()[static_cast<std::size_t>(order_[static_cast<std::size_t>(rank)])];
}

RankedBatch rank_oracle(const Objective& obj, const Vector& x, double alpha, DirectionBatch batch,
                        QueryLedger& ledger, bool expose_values) {
  if (!(alpha > 0.0)) throw std::invalid_argument("rank_oracle: alpha must be positive");
  const int n = batch.size();
  require_batch_size(n);
  if (batch.dim() != obj.dim()) throw DimensionError("rank_oracle: batch dimension does not match objective");

  std::vector<double> values(static_cast<std::size_t>(n));
  Vector probe(x.size());
  for (int i = 0; i < n; ++i) {
    probe = x + alpha * batch.directions.row(i).transpose();
    values[static_cast<std::size_t>(i)] = obj.evaluate(probe);
  }
  ledger.charge(n);
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(values[static_cast<std::size_t>(i)])) throw NonFiniteValueError(i, values[static_cast<std::size_t>(i)]);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  return RankedBatch(std::move(batch), std::move(order), std::move(values), expose_values);
}

SelectedRanks selected_index_set(int N) {
  require_batch_size(N);
  SelectedRanks s;
  for (int k = 0; k < N / 4; ++k) s.plus.push_back(k);
  for (int k = 3 * N / 4; k < N; ++k) s.minus.push_back(k);
  return s;
}

}  // namespace rankzo
