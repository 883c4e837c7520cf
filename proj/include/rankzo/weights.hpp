#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rankzo {

enum class WeightScheme { uniform, log, blom };

std::string_view to_string(WeightScheme s);
WeightScheme parse_weight_scheme(std::string_view name);

/// Signed recombination weights over the selected ranks.
///
/// plus()[k] is the weight of rank k (0-based, best first) for k < N/4.
/// minus()[j] is the weight of rank 3N/4 + j; the last entry belongs to the
/// worst sample and carries the largest magnitude. A positive-only vector
/// has an empty minus side.
class WeightVector {
 public:
  WeightVector(WeightScheme scheme, int N, std::vector<double> plus, std::vector<double> minus);

  [[nodiscard]] WeightScheme scheme() const { return scheme_; }
  [[nodiscard]] int batch_size() const { return n_; }
  [[nodiscard]] bool positive_only() const { return minus_.empty(); }
  [[nodiscard]] std::span<const double> plus() const { return plus_; }
  [[nodiscard]] std::span<const double> minus() const { return minus_; }

  /// Signed weight for a 0-based rank; zero outside the selected set.
  [[nodiscard]] double at_rank(int rank) const;

  /// Selected ranks in ascending order, paired with their weights.
  [[nodiscard]] std::vector<int> ranks() const;

 private:
  WeightScheme scheme_;
  int n_;
  std::vector<double> plus_;
  std::vector<double> minus_;
};

WeightVector uniform_weights(int N);
WeightVector log_weights(int N);
WeightVector blom_weights(int N);
WeightVector make_weights(WeightScheme scheme, int N);

/// Same plus side as make_weights(scheme, N) with the negative side dropped.
WeightVector positive_only_weights(WeightScheme scheme, int N);

/// min |w| / max |w| over the selected set.
double weight_ratio(const WeightVector& w);

}  // namespace rankzo
