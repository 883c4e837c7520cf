#pragma once

#include "rankzo/optimizer.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rankzo::bench {

/// Two-point Gaussian-smoothing estimator ((f(x + alpha u) - f(x)) / alpha) u
/// with step 1 / (4 (d + 4) L). Two charged queries per iteration. Uses
/// cfg.T, cfg.seed, cfg.alpha, cfg.target_rel and cfg.x0; N, scheme and the
/// step policy are ignored.
RunTrace baseline_value_zo(const Objective& obj, const RunConfig& cfg);

/// Same pipeline as run() with only the best N/4 directions, weights summing to 1.
RunTrace ablate_positive_only(const Objective& obj, const RunConfig& cfg);

/// Cumulative queries spent before the first x_t with f(x_t) - f_star <= eps.
std::optional<long long> queries_to_target(const RunTrace& trace, double eps, double f_star);

/// Least-squares slope of log(gap) against t over the recorded iterations
/// with positive gap. NaN with fewer than two such points.
double log_gap_slope(const RunTrace& trace);

enum class Method { rank, positive_only, value };
std::string_view to_string(Method m);
Method parse_method(std::string_view name);

enum class GridObjective { quadratic, rosenbrock };

struct ExperimentGrid {
  GridObjective objective = GridObjective::quadratic;
  std::vector<int> dims = {32};
  std::vector<double> kappas = {10.0};  // quadratic only; mu = L / kappa
  std::vector<int> Ns = {16};
  std::vector<WeightScheme> schemes = {WeightScheme::uniform};
  std::vector<Method> methods = {Method::rank};
  double L = 10.0;
  int repetitions = 10;
  std::uint64_t first_seed = 1;  // repetition r uses seed first_seed + r for objective and run
  double target_rel = 1e-4;
  double start_scale = 1.0;
  RunConfig base;  // step, alpha, delta, T, max_resamples

  void validate() const;
};

struct ResultRow {
  std::string config_id;
  std::uint64_t seed = 0;
  WeightScheme scheme = WeightScheme::uniform;
  int N = 0;
  int d = 0;
  std::optional<double> kappa;
  Method method = Method::rank;
  std::optional<long long> queries_to_target;
  long long total_queries = 0;
  double final_gap = 0.0;
  double slope = 0.0;
  long long wall_ms = 0;
  std::optional<std::string> error;
};

struct GridResult {
  std::vector<ResultRow> rows;  // sorted by (config_id, seed)
  nlohmann::json summary;
};

GridResult run_grid(const ExperimentGrid& grid, int jobs = 1);

/// Header plus one line per row. wall_ms is written as 0 unless
/// `with_timing`, so that reruns are byte-identical.
void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool with_timing = false);

}  // namespace rankzo::bench
