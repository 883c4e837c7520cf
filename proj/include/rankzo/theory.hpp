#pragma once

#include "rankzo/objective.hpp"
#include "rankzo/rng.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rankzo::theory {

// ---- constants -----------------------------------------------------------

/// d + 2 ln(1/delta). Bounds |d(x + alpha u, x)| / (L alpha^2) for one sample.
double c_d_delta(int d, double delta);

/// (sqrt(N/2) + sqrt(d) + sqrt(2 ln(2/delta)))^2. Bounds ||U_t||^2 for the
/// d x N/2 matrix of selected directions.
double c_N_d_delta(int N, int d, double delta);

/// Binary KL divergence D(q || p).
double kl_bernoulli(double q, double p);

/// 1 - Phi(2), used where the analysis quotes p = 0.0224.
double gaussian_tail_at_two();
inline constexpr double kQuotedTailAtTwo = 0.0224;

/// exp(-N D(1/4 || p)) with the exact p = 1 - Phi(2).
double event_bound_E45(int N);

/// Contraction factor ratio * (N/2) / (8 C_{N,d,delta} sqrt(2 ln(2N/delta))) * mu / L.
/// Throws std::domain_error when the result is not below 1.
double rho(int N, int d, double delta, double mu, double L, double weight_ratio);

struct Floors {
  double strongly_convex = 0.0;  // additive one-step term of the linear-rate recursion
  double nonconvex = 0.0;        // additive term of the averaged squared-gradient bound
};

/// Both alpha-floors. `mu` is accepted for symmetry with rho() but neither
/// floor depends on it.
Floors floors(int N, int d, double delta, double L, std::optional<double> mu, double alpha, double weight_ratio);

/// Probability that one iteration's events all hold, one bound per regime:
/// strongly convex uses (N+4) delta / 2, smooth nonconvex uses (N+6) delta / 2.
double iteration_failure_bound_sc(int N, double delta);
double iteration_failure_bound_nc(int N, double delta);

struct TheoryConstants {
  double c_d_delta = 0.0;
  double c_N_d_delta = 0.0;
  double p_tail = 0.0;
  double kl_quarter = 0.0;
  double rho = 0.0;
  double delta_floor_sc = 0.0;
  double delta_floor_nc = 0.0;
};

TheoryConstants compute_constants(int N, int d, double delta, double mu, double L, double alpha, double weight_ratio);

// ---- complexity prediction ----------------------------------------------

enum class ProblemKind { strongly_convex, nonconvex };

struct ComplexityInputs {
  ProblemKind kind = ProblemKind::strongly_convex;
  int d = 1;
  double L = 1.0;
  double mu = 1.0;         // strongly convex only
  double eps = 1e-6;
  double delta_prime = 0.1;
  double c1 = 1.0;         // constant in N = c1 (ln(T/delta') + ln ln(T/delta'))
  double initial_gap = 1.0;  // f(x0) - f*, used by the explicit nonconvex count
};

struct ComplexityPrediction {
  // Leading-order counts: T = dL/mu ln(1/eps) or T = dL/eps, N from T, Q = T N.
  long long T = 0;
  int N = 0;
  long long Q = 0;
  // Explicit-constant counts from rho and delta = delta' / (T N), solved as a
  // fixed point between T and N.
  long long T_explicit = 0;
  int N_explicit = 0;
  long long Q_explicit = 0;
  double delta = 0.0;
  int passes = 0;
};

/// Smallest multiple of 4 that is >= max(x, 4).
int ceil_to_multiple_of_four(double x);

ComplexityPrediction predict_complexity(const ComplexityInputs& in);

// ---- Monte-Carlo verification -------------------------------------------

enum class BoundKind { upper, lower };

struct EventCheckReport {
  std::string event_id;
  std::string params;
  long long trials = 0;
  long long hits = 0;               // failures for events, occurrences for appendix tails
  double empirical = 0.0;
  double theoretical_bound = 0.0;
  BoundKind bound_kind = BoundKind::upper;
  bool pass = false;
};

/// empirical <= bound + 3 sigma (upper), empirical >= bound - 3 sigma (lower).
bool passes_three_sigma(double empirical, double bound, long long trials, BoundKind kind);

struct EventParams {
  const Objective* objective = nullptr;  // needs gradient and L
  Vector x;
  int N = 32;
  double delta = 0.1;
  /// Multiplier on the ceiling ||grad|| / (4 L C_{d,delta}); values above 1
  /// deliberately violate the precondition.
  double alpha_scale = 1.0;
  /// Explicit alpha; overrides alpha_scale when set. Must respect the ceiling
  /// unless `allow_large_alpha` is set.
  std::optional<double> alpha;
  bool allow_large_alpha = false;
};

/// E1..E5 checker. Each trial draws a fresh Gaussian batch at the fixed
/// point, ranks it, and tests the event's defining inequality.
EventCheckReport check_event(std::string_view event_id, const EventParams& params, long long trials,
                             const CounterRng& rng, int jobs = 1);

struct AppendixParams {
  int N = 64;
  int d = 100;
  double delta = 0.01;
  double p = 0.0228;   // Bernoulli rate for the Chernoff check
  double r = 0.25;     // Chernoff threshold fraction
  double tau = 2.0;    // spectral deviation, Gaussian tail threshold, order-statistic threshold
};

/// chernoff, gauss_tail, gauss_max, chi2, spectral, order_low1, order_low2.
EventCheckReport check_appendix_bounds(std::string_view which, const AppendixParams& params, long long trials,
                                       const CounterRng& rng, int jobs = 1);

const std::vector<std::string>& event_ids();
const std::vector<std::string>& appendix_ids();

/// Iterates D_{t+1} = (1 - beta) D_t + c and checks
/// D_t - c/beta = (1 - beta)^t (D_0 - c/beta) to `rel_tol` at every step
/// (relative to max(|D_t|, |c/beta|, |D_0|)).
bool recursion_fixed_point_check(double beta, double c, double delta0, int steps, double rel_tol = 1e-9);

}  // namespace rankzo::theory
