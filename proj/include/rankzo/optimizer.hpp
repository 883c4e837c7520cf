#pragma once

#include "rankzo/objective.hpp"
#include "rankzo/sampling.hpp"
#include "rankzo/weights.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankzo {

struct StepPolicy {
  enum class Kind { instrumented, fixed, backtracking };
  Kind kind = Kind::instrumented;
  double eta0 = 1.0;
  double shrink = 0.5;
  int max_tries = 10;

  static StepPolicy instrumented() { return {}; }
  static StepPolicy fixed(double eta0) { return {Kind::fixed, eta0, 0.5, 1}; }
  static StepPolicy backtracking(double eta0, double shrink, int max_tries) {
    return {Kind::backtracking, eta0, shrink, max_tries};
  }
  void validate() const;
};

struct AlphaPolicy {
  enum class Kind { instrumented, fixed, geometric };
  Kind kind = Kind::instrumented;
  double c = 1.0;       // instrumented: fraction of the ||grad|| / (4 L C_{d,delta}) ceiling
  double alpha0 = 1e-3;
  double gamma = 0.99;  // geometric decay per iteration

  static AlphaPolicy instrumented(double c = 1.0) { return {Kind::instrumented, c, 1e-3, 0.99}; }
  static AlphaPolicy fixed(double alpha0) { return {Kind::fixed, 1.0, alpha0, 1.0}; }
  static AlphaPolicy geometric(double alpha0, double gamma) { return {Kind::geometric, 1.0, alpha0, gamma}; }
  void validate() const;
};

std::string_view to_string(StepPolicy::Kind k);
std::string_view to_string(AlphaPolicy::Kind k);

enum class Variant { full, positive_only };

struct RunConfig {
  int N = 16;
  int T = 1000;
  WeightScheme scheme = WeightScheme::uniform;
  Variant variant = Variant::full;
  StepPolicy step = StepPolicy::instrumented();
  AlphaPolicy alpha = AlphaPolicy::instrumented();
  std::uint64_t seed = 1;
  double delta = 0.1;
  /// Relative target: stop once f(x_t) - f* <= target_rel * (f(x_0) - f*).
  /// Zero runs all T iterations.
  double target_rel = 0.0;
  Vector x0;
  /// Batches redrawn with alpha halved when the instrumented step size is
  /// not positive, before the iteration is abandoned with an error.
  int max_resamples = 40;
  /// Keep every iterate x_t in the trace.
  bool keep_iterates = false;

  void validate(const Objective& obj) const;
};

/// State at the start of iteration t and what the iteration did.
struct IterRecord {
  int t = 0;
  double f = 0.0;
  double gap = 0.0;        // NaN when f* is unknown
  double grad_norm = 0.0;  // NaN when the objective has no gradient
  double alpha = 0.0;
  double eta = 0.0;        // 0 for rejected moves
  long long queries = 0;   // cumulative queries spent before x_t
  double grad_dot_direction = 0.0;  // <grad f(x_t), d_t>; NaN without gradient
  double f_next = 0.0;
  int resamples = 0;
  bool moved = false;
};

struct RunTrace {
  std::vector<IterRecord> records;
  std::vector<Vector> iterates;  // x_0..x_T when keep_iterates
  Vector x_final;
  double f_final = 0.0;
  double gap_final = 0.0;
  double f_initial = 0.0;
  long long total_queries = 0;
  std::vector<long long> queries_per_iteration;
  WeightScheme scheme = WeightScheme::uniform;
  std::optional<std::string> error;

  [[nodiscard]] int completed_iterations() const { return static_cast<int>(records.size()); }
};

class StepRegimeViolation : public std::runtime_error {
 public:
  StepRegimeViolation() : std::runtime_error("step-size regime violated") {}
};

class StationaryPointError : public std::invalid_argument {
 public:
  StationaryPointError() : std::invalid_argument("at stationary point") {}
};

/// d_t = sum over selected ranks of w_(k) u_(k).
Vector descent_direction(const RankedBatch& ranked, const WeightVector& w);

/// min over selected k of <g, u_(k)>^2 / (2 L C_{N,d,delta} w_(k)) * alpha / (f(x) - f(x + alpha u_(k))).
/// Needs the ranked batch's instrumentation values. Throws StepRegimeViolation
/// when any term is not strictly positive and finite.
double instrumented_step_size(const Vector& grad, const RankedBatch& ranked, const WeightVector& w, double f_x,
                              double alpha, double L, double c_N_d);

/// c * ||grad|| / (4 L C_{d,delta}).
double instrumented_alpha(double grad_norm, double L, double c_d, double c);

struct StepOutcome {
  Vector x;
  double eta = 0.0;
  long long extra_queries = 0;
  bool moved = false;
};

/// Rank-only step. fixed: x + eta0 d. backtracking: compare f(x + eta d) with
/// f(x) (two queries per comparison), shrinking eta from eta0 until the first
/// strict improvement; the move is rejected after max_tries failures.
StepOutcome practical_step(const Objective& obj, const Vector& x, const Vector& direction, const StepPolicy& policy,
                           QueryLedger& ledger);

/// Runs the rank-based loop: sample -> rank -> weight -> direction -> step.
/// Errors inside an iteration stop the run; the partial trace is returned
/// with `error` set.
RunTrace run(const Objective& obj, const RunConfig& cfg);

/// Default start point: x* + 1 for objectives with a known optimum point,
/// (-1.2, 1, -1.2, 1, ...) for the Rosenbrock family, zero otherwise.
Vector default_start(const Objective& obj, double scale = 1.0);

}  // namespace rankzo
