#include "rankzo/weights.hpp"

#include "rankzo/sampling.hpp"
#include "rankzo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rankzo {

std::string_view to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::log: return "log";
    case WeightScheme::blom: return "blom";
  }
  return "?";
}

WeightScheme parse_weight_scheme(std::string_view name) {
  if (name == "uniform") return WeightScheme::uniform;
  if (name == "log") return WeightScheme::log;
  if (name == "blom") return WeightScheme::blom;
  throw std::invalid_argument("unknown weight scheme '" + std::string(name) + "'");
}

namespace {
constexpr double kSumTol = 1e-12;
}

WeightVector::WeightVector(WeightScheme scheme, int N, std::vector<double> plus, std::vector<double> minus)
    : scheme_(scheme), n_(N), plus_(std::move(plus)), minus_(std::move(minus)) {
  require_batch_size(N);
  const auto quarter = static_cast<std::size_t>(N / 4);
  if (plus_.size() != quarter) throw std::invalid_argument("WeightVector: plus side must have N/4 entries");
  if (!minus_.empty() && minus_.size() != quarter)
    throw std::invalid_argument("WeightVector: minus side must have N/4 entries or be empty");

  if (std::any_of(plus_.begin(), plus_.end(), [](double w) { return !(w > 0.0); }))
    throw std::invalid_argument("WeightVector: plus weights must be positive");
  if (std::any_of(minus_.begin(), minus_.end(), [](double w) { return !(w < 0.0); }))
    throw std::invalid_argument("WeightVector: minus weights must be negative");
  if (std::abs(std::accumulate(plus_.begin(), plus_.end(), 0.0) - 1.0) > kSumTol)
    throw std::invalid_argument("WeightVector: plus weights must sum to 1");
  if (!minus_.empty() && std::abs(std::accumulate(minus_.begin(), minus_.end(), 0.0) + 1.0) > kSumTol)
    throw std::invalid_argument("WeightVector: minus weights must sum to -1");
  for (std::size_t k = 1; k < plus_.size(); ++k)
    if (plus_[k] > plus_[k - 1]) throw std::invalid_argument("WeightVector: plus weights must be nonincreasing in rank");
  for (std::size_t k = 1; k < minus_.size(); ++k)
    if (std::abs(minus_[k]) < std::abs(minus_[k - 1]))
      throw std::invalid_argument("WeightVector: minus magnitudes must be nondecreasing in rank");
}

double WeightVector::at_rank(int rank) const {
  const int quarter = n_ / 4;
  if (rank >= 0 && rank < quarter) return plus_[static_cast<std::size_t>(rank)];
  if (!minus_.empty() && rank >= 3 * quarter && rank < n_) return minus_[static_cast<std::size_t>(rank - 3 * quarter)];
  return 0.0;
}

std::vector<int> WeightVector::ranks() const {
  const SelectedRanks s = selected_index_set(n_);
  std::vector<int> out = s.plus;
  if (!minus_.empty()) out.insert(out.end(), s.minus.begin(), s.minus.end());
  return out;
}

namespace {

// Builds both sides from an unnormalized magnitude per 1-based rank.
template <class Magnitude>
WeightVector from_magnitudes(WeightScheme scheme, int N, Magnitude magnitude) {
  require_batch_size(N);
  const int quarter = N / 4;
  std::vector<double> plus, minus;
  for (int k = 1; k <= quarter; ++k) plus.push_back(magnitude(k));
  for (int k = 3 * quarter + 1; k <= N; ++k) minus.push_back(magnitude(k));
  const double sp = std::accumulate(plus.begin(), plus.end(), 0.0);
  const double sm = std::accumulate(minus.begin(), minus.end(), 0.0);
  for (double& w : plus) w /= sp;
  for (double& w : minus) w = -w / sm;
  return WeightVector(scheme, N, std::move(plus), std::move(minus));
}

}  // namespace

WeightVector uniform_weights(int N) {
  require_batch_size(N);
  const double w = 4.0 / N;
  return WeightVector(WeightScheme::uniform, N, std::vector<double>(static_cast<std::size_t>(N / 4), w),
                      std::vector<double>(static_cast<std::size_t>(N / 4), -w));
}

WeightVector log_weights(int N) {
  // Rank k on the minus side mirrors to position N + 1 - k.
  return from_magnitudes(WeightScheme::log, N, [N](int k) {
    const int pos = (k <= N / 4) ? k : N + 1 - k;
    return std::log(N + 1.0) - std::log(static_cast<double>(pos));
  });
}

WeightVector blom_weights(int N) {
  return from_magnitudes(WeightScheme::blom, N, [N](int k) {
    return std::abs(stats::normal_quantile((k - 0.375) / (N + 0.25)));
  });
}

WeightVector make_weights(WeightScheme scheme, int N) {
  switch (scheme) {
    case WeightScheme::uniform: return uniform_weights(N);
    case WeightScheme::log: return log_weights(N);
    case WeightScheme::blom: return blom_weights(N);
  }
  throw std::invalid_argument("make_weights: unknown scheme");
}

WeightVector positive_only_weights(WeightScheme scheme, int N) {
  const WeightVector full = make_weights(scheme, N);
  return WeightVector(scheme, N, {full.plus().begin(), full.plus().end()}, {});
}

double weight_ratio(const WeightVector& w) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double v : w.plus()) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  for (double v : w.minus()) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  return lo / hi;
}

}  // namespace rankzo
