#include "rankzo/theory.hpp"

#include "rankzo/sampling.hpp"
#include "rankzo/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rankzo::theory {

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

double sqrt_two_log(double x) { return std::sqrt(2.0 * std::log(x)); }

}  // namespace

double c_d_delta(int d, double delta) {
  if (d < 1) throw std::invalid_argument("c_d_delta: d must be positive");
  require_delta(delta);
  return d + 2.0 * std::log(1.0 / delta);
}

double c_N_d_delta(int N, int d, double delta) {
  require_batch_size(N);
  if (d < 1) throw std::invalid_argument("c_N_d_delta: d must be positive");
  require_delta(delta);
  const double s = std::sqrt(N / 2.0) + std::sqrt(static_cast<double>(d)) + sqrt_two_log(2.0 / delta);
  return s * s;
}

double kl_bernoulli(double q, double p) {
  if (!(q > 0.0 && q < 1.0 && p > 0.0 && p < 1.0)) throw std::invalid_argument("kl_bernoulli: p and q must lie in (0, 1)");
  return q * std::log(q / p) + (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
}

double gaussian_tail_at_two() { return stats::normal_sf(2.0); }

double event_bound_E45(int N) {
  require_batch_size(N);
  return std::exp(-N * kl_bernoulli(0.25, gaussian_tail_at_two()));
}

double rho(int N, int d, double delta, double mu, double L, double weight_ratio) {
  if (!(mu > 0.0) || !(L > 0.0) || mu > L) throw std::invalid_argument("rho: need 0 < mu <= L");
  if (!(weight_ratio > 0.0 && weight_ratio <= 1.0)) throw std::invalid_argument("rho: weight ratio must lie in (0, 1]");
  const double value =
      weight_ratio * (N / 2.0) / (8.0 * c_N_d_delta(N, d, delta) * sqrt_two_log(2.0 * N / delta)) * (mu / L);
  if (!(value < 1.0)) throw std::domain_error("rho: contraction factor is not below 1");
  return value;
}

Floors floors(int N, int d, double delta, double L, std::optional<double> /*mu*/, double alpha, double weight_ratio) {
  if (!(L > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("floors: L and alpha must be positive");
  if (!(weight_ratio > 0.0 && weight_ratio <= 1.0)) throw std::invalid_argument("floors: weight ratio must lie in (0, 1]");
  const double spread = 1.0 / weight_ratio;
  const double cd = c_d_delta(d, delta);
  const double cn = c_N_d_delta(N, d, delta);
  const double log_term = std::log(2.0 * N / delta);
  Floors out;
  out.strongly_convex = spread * N * L * cd * cd * std::sqrt(2.0 * log_term) * alpha * alpha / (2.0 * cn);
  out.nonconvex = spread * spread * 32.0 * L * L * cd * cd * log_term * alpha * alpha;
  return out;
}

double iteration_failure_bound_sc(int N, double delta) {
  return (N + 4.0) * delta / 2.0 + 2.0 * event_bound_E45(N);
}

double iteration_failure_bound_nc(int N, double delta) {
  return (N + 6.0) * delta / 2.0 + 2.0 * event_bound_E45(N);
}

TheoryConstants compute_constants(int N, int d, double delta, double mu, double L, double alpha, double weight_ratio) {
  TheoryConstants c;
  c.c_d_delta = c_d_delta(d, delta);
  c.c_N_d_delta = c_N_d_delta(N, d, delta);
  c.p_tail = gaussian_tail_at_two();
  c.kl_quarter = kl_bernoulli(0.25, c.p_tail);
  c.rho = rho(N, d, delta, mu, L, weight_ratio);
  const Floors f = floors(N, d, delta, L, mu, alpha, weight_ratio);
  c.delta_floor_sc = f.strongly_convex;
  c.delta_floor_nc = f.nonconvex;
  return c;
}

// ---- complexity ----------------------------------------------------------

int ceil_to_multiple_of_four(double x) {
  const double v = std::max(x, 4.0);
  return static_cast<int>(std::ceil(v / 4.0 - 1e-12)) * 4;
}

namespace {

int batch_for_horizon(double T, double delta_prime, double c1) {
  const double r = std::log(T / delta_prime);
  const double loglog = r > 1.0 ? std::log(r) : 0.0;
  return ceil_to_multiple_of_four(c1 * (std::max(r, 0.0) + loglog));
}

}  // namespace

ComplexityPrediction predict_complexity(const ComplexityInputs& in) {
  if (in.d < 1 || !(in.L > 0.0) || !(in.eps > 0.0) || !(in.c1 > 0.0) || !(in.initial_gap > 0.0))
    throw std::invalid_argument("predict_complexity: inputs must be positive");
  require_delta(in.delta_prime);
  const bool sc = in.kind == ProblemKind::strongly_convex;
  if (sc && !(in.mu > 0.0 && in.mu <= in.L)) throw std::invalid_argument("predict_complexity: need 0 < mu <= L");
  if (sc && !(in.eps < 1.0)) throw std::invalid_argument("predict_complexity: eps must be below 1 for log(1/eps)");

  ComplexityPrediction out;
  const double lead = sc ? in.d * in.L / in.mu * std::log(1.0 / in.eps) : in.d * in.L / in.eps;
  out.T = static_cast<long long>(std::ceil(lead));
  out.N = batch_for_horizon(static_cast<double>(out.T), in.delta_prime, in.c1);
  out.Q = out.T * out.N;

  // Explicit constants: T depends on N and delta, delta = delta' / (T N), and N on T.
  long long T = out.T;
  int N = out.N;
  for (int pass = 1; pass <= 100; ++pass) {
    const double delta = std::min(in.delta_prime / (static_cast<double>(T) * N), 0.5);
    double t_next;
    if (sc) {
      t_next = std::log(1.0 / in.eps) / rho(N, in.d, delta, in.mu, in.L, 1.0);
    } else {
      t_next = in.initial_gap / in.eps * 32.0 * in.L * c_N_d_delta(N, in.d, delta) *
               sqrt_two_log(2.0 * N / delta) / N;
    }
    const auto T_next = static_cast<long long>(std::ceil(t_next));
    const int N_next = batch_for_horizon(static_cast<double>(T_next), in.delta_prime, in.c1);
    if (T_next == T && N_next == N) {
      out.T_explicit = T;
      out.N_explicit = N;
      out.Q_explicit = T * N;
      out.delta = delta;
      out.passes = pass;
      return out;
    }
    T = T_next;
    N = N_next;
  }
  throw std::runtime_error("predict_complexity: T/N fixed point did not converge in 100 passes");
}

// ---- Monte-Carlo ---------------------------------------------------------

bool passes_three_sigma(double empirical, double bound, long long trials, BoundKind kind) {
  const double slack = stats::three_sigma(bound, trials);
  return kind == BoundKind::upper ? empirical <= bound + slack : empirical >= bound - slack;
}

const std::vector<std::string>& event_ids() {
  static const std::vector<std::string> ids = {"E1", "E2", "E3", "E4", "E5"};
  return ids;
}

const std::vector<std::string>& appendix_ids() {
  static const std::vector<std::string> ids = {"chernoff", "gauss_tail", "gauss_max", "chi2",
                                               "spectral", "order_low1", "order_low2"};
  return ids;
}

namespace {

// Trials are cut into a fixed number of shards, each with its own substream,
// so the hit count does not depend on how many workers run them.
constexpr int kShards = 16;

long long count_hits(long long trials, const CounterRng& rng, int jobs,
                     const std::function<bool(CounterRng&)>& trial) {
  std::vector<long long> hits(kShards, 0);
  auto run_shard = [&](int s) {
    CounterRng local = rng.substream(static_cast<std::uint64_t>(s));
    const long long begin = trials * s / kShards;
    const long long end = trials * (s + 1) / kShards;
    long long h = 0;
    for (long long i = begin; i < end; ++i) h += trial(local) ? 1 : 0;
    hits[static_cast<std::size_t>(s)] = h;
  };
  const int workers = std::clamp(jobs, 1, kShards);
  if (workers == 1) {
    for (int s = 0; s < kShards; ++s) run_shard(s);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int s = next++; s < kShards; s = next++) run_shard(s);
      });
    for (auto& th : pool) th.join();
  }
  return std::accumulate(hits.begin(), hits.end(), 0LL);
}

EventCheckReport finish_report(std::string id, std::string params, long long trials, long long hits, double bound,
                               BoundKind kind) {
  EventCheckReport r;
  r.event_id = std::move(id);
  r.params = std::move(params);
  r.trials = trials;
  r.hits = hits;
  r.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  r.theoretical_bound = bound;
  r.bound_kind = kind;
  r.pass = passes_three_sigma(r.empirical, bound, trials, kind);
  return r;
}

double largest_singular_value_squared(const Matrix& a) {
  // Gram matrix on the smaller side.
  const Matrix gram = a.rows() <= a.cols() ? Matrix(a * a.transpose()) : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

EventCheckReport check_event(std::string_view event_id, const EventParams& params, long long trials,
                             const CounterRng& rng, int jobs) {
  if (trials < 1000) throw std::invalid_argument("check_event: need at least 1000 trials");
  if (params.objective == nullptr) throw std::invalid_argument("check_event: missing objective");
  const Objective& obj = *params.objective;
  if (!obj.has_gradient() || !obj.smoothness())
    throw std::invalid_argument("check_event: objective must expose gradient and L");
  require_batch_size(params.N);
  require_delta(params.delta);
  if (params.x.size() != obj.dim()) throw DimensionError("check_event: x has the wrong dimension");

  const int N = params.N;
  const int d = obj.dim();
  const double L = *obj.smoothness();
  const double delta = params.delta;
  const Vector grad = obj.gradient(params.x);
  const double gnorm = grad.norm();
  if (!(gnorm > 0.0)) throw std::invalid_argument("check_event: gradient vanishes at x");
  const double cd = c_d_delta(d, delta);
  const double ceiling = gnorm / (4.0 * L * cd);
  const double alpha = params.alpha.value_or(params.alpha_scale * ceiling);
  if (!(alpha > 0.0)) throw std::invalid_argument("check_event: alpha must be positive");
  if (alpha > ceiling * (1.0 + 1e-12) && !params.allow_large_alpha)
    throw std::invalid_argument("check_event: alpha exceeds ||grad|| / (4 L C_{d,delta})");
  const double fx = obj.evaluate(params.x);
  const SelectedRanks sel = selected_index_set(N);

  std::function<bool(CounterRng&)> trial;
  double bound = 0.0;
  if (event_id == "E1") {
    bound = N * delta / 2.0;
    const double limit = cd * L * alpha * alpha;
    trial = [&, limit](CounterRng& r) {
      QueryLedger ledger;
      const RankedBatch rb = rank_oracle(obj, params.x, alpha, sample_directions(r, N, d), ledger, true);
      auto bad = [&](int k) {
        const double rem = rb.instrumentation_value_at_rank(k) - fx - alpha * grad.dot(rb.direction(k).transpose());
        return std::abs(rem) > limit;
      };
      return std::any_of(sel.plus.begin(), sel.plus.end(), bad) || std::any_of(sel.minus.begin(), sel.minus.end(), bad);
    };
  } else if (event_id == "E2") {
    bound = delta;
    const double limit = c_N_d_delta(N, d, delta);
    trial = [&, limit](CounterRng& r) {
      QueryLedger ledger;
      const RankedBatch rb = rank_oracle(obj, params.x, alpha, sample_directions(r, N, d), ledger);
      Matrix u(N / 2, d);
      int row = 0;
      for (int k : sel.plus) u.row(row++) = rb.direction(k);
      for (int k : sel.minus) u.row(row++) = rb.direction(k);
      return largest_singular_value_squared(u) > limit;
    };
  } else if (event_id == "E3") {
    bound = delta;
    const double limit = sqrt_two_log(2.0 * N / delta) * gnorm;
    trial = [&, limit](CounterRng& r) {
      QueryLedger ledger;
      const RankedBatch rb = rank_oracle(obj, params.x, alpha, sample_directions(r, N, d), ledger);
      auto bad = [&](int k) { return std::abs(grad.dot(rb.direction(k).transpose())) > limit; };
      return std::any_of(sel.plus.begin(), sel.plus.end(), bad) || std::any_of(sel.minus.begin(), sel.minus.end(), bad);
    };
  } else if (event_id == "E4" || event_id == "E5") {
    bound = event_bound_E45(N);
    const bool upper_tail = event_id == "E4";
    trial = [&, upper_tail](CounterRng& r) {
      QueryLedger ledger;
      const RankedBatch rb = rank_oracle(obj, params.x, alpha, sample_directions(r, N, d), ledger);
      if (upper_tail)
        return std::any_of(sel.minus.begin(), sel.minus.end(),
                           [&](int k) { return grad.dot(rb.direction(k).transpose()) < gnorm; });
      return std::any_of(sel.plus.begin(), sel.plus.end(),
                         [&](int k) { return grad.dot(rb.direction(k).transpose()) > -gnorm; });
    };
  } else {
    throw std::invalid_argument("check_event: unknown event '" + std::string(event_id) + "'");
  }

  const long long hits = count_hits(trials, rng, jobs, trial);
  std::ostringstream p;
  p << "N=" << N << ";d=" << d << ";delta=" << delta << ";alpha=" << alpha << ";alpha_ceiling=" << ceiling;
  return finish_report(std::string(event_id), p.str(), trials, hits, bound, BoundKind::upper);
}

EventCheckReport check_appendix_bounds(std::string_view which, const AppendixParams& params, long long trials,
                                       const CounterRng& rng, int jobs) {
  if (trials < 1000) throw std::invalid_argument("check_appendix_bounds: need at least 1000 trials");
  const int N = params.N;
  const int d = params.d;
  const double tau = params.tau;
  std::ostringstream p;
  std::function<bool(CounterRng&)> trial;
  double bound = 0.0;
  BoundKind kind = BoundKind::upper;

  if (which == "chernoff") {
    if (N < 1 || !(params.p > 0.0 && params.p < params.r && params.r < 1.0))
      throw std::invalid_argument("chernoff: need 0 < p < r < 1");
    bound = std::exp(-N * kl_bernoulli(params.r, params.p));
    const double threshold = params.r * N;
    trial = [N, threshold, pr = params.p](CounterRng& r) {
      int s = 0;
      for (int i = 0; i < N; ++i) s += r.uniform() < pr ? 1 : 0;
      return s >= threshold;
    };
    p << "N=" << N << ";p=" << params.p << ";r=" << params.r;
  } else if (which == "gauss_tail") {
    if (!(tau > 0.0)) throw std::invalid_argument("gauss_tail: tau must be positive");
    bound = 2.0 * std::exp(-tau * tau / 2.0);
    trial = [tau](CounterRng& r) { return std::abs(r.normal()) > tau; };
    p << "tau=" << tau;
  } else if (which == "gauss_max") {
    require_delta(params.delta);
    if (N < 1) throw std::invalid_argument("gauss_max: N must be positive");
    bound = params.delta;
    const double limit = sqrt_two_log(2.0 * N / params.delta);
    trial = [N, limit](CounterRng& r) {
      double m = 0.0;
      for (int i = 0; i < N; ++i) m = std::max(m, std::abs(r.normal()));
      return m > limit;
    };
    p << "N=" << N << ";delta=" << params.delta;
  } else if (which == "chi2") {
    require_delta(params.delta);
    if (d < 1) throw std::invalid_argument("chi2: d must be positive");
    bound = params.delta;
    const double limit = 2.0 * d + 3.0 * std::log(1.0 / params.delta);
    trial = [d, limit](CounterRng& r) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const double z = r.normal();
        s += z * z;
      }
      return s > limit;
    };
    p << "d=" << d << ";delta=" << params.delta;
  } else if (which == "spectral") {
    require_batch_size(N);
    if (d < 1 || tau < 0.0) throw std::invalid_argument("spectral: need d >= 1 and tau >= 0");
    const int cols = N / 2;
    bound = 2.0 * std::exp(-tau * tau / 2.0);
    const double limit = std::sqrt(static_cast<double>(cols)) + std::sqrt(static_cast<double>(d)) + tau;
    trial = [d, cols, limit](CounterRng& r) {
      Matrix a(d, cols);
      r.fill_normal({a.data(), static_cast<std::size_t>(a.size())});
      return std::sqrt(largest_singular_value_squared(a)) > limit;
    };
    p << "rows=" << d << ";cols=" << cols << ";tau=" << tau;
  } else if (which == "order_low1" || which == "order_low2") {
    if (N < 4) throw std::invalid_argument("order statistic check: N must be >= 4");
    const int m = N / 4;
    const double q = static_cast<double>(m) / N;
    const double tail = stats::normal_sf(tau);
    if (!(tail < q)) throw std::invalid_argument("order statistic check: need 1 - Phi(tau) < floor(N/4)/N");
    bound = 1.0 - std::exp(-N * kl_bernoulli(q, tail));
    kind = BoundKind::lower;
    const bool upper_side = which == "order_low1";
    trial = [N, m, tau, upper_side](CounterRng& r) {
      std::vector<double> xs(static_cast<std::size_t>(N));
      r.fill_normal(xs);
      if (upper_side) {
        // m-th largest above tau
        std::nth_element(xs.begin(), xs.begin() + (N - m), xs.end());
        return xs[static_cast<std::size_t>(N - m)] > tau;
      }
      // m-th smallest below -tau
      std::nth_element(xs.begin(), xs.begin() + (m - 1), xs.end());
      return xs[static_cast<std::size_t>(m - 1)] < -tau;
    };
    p << "N=" << N << ";m=" << m << ";tau=" << tau;
  } else {
    throw std::invalid_argument("check_appendix_bounds: unknown check '" + std::string(which) + "'");
  }

  const long long hits = count_hits(trials, rng, jobs, trial);
  return finish_report(std::string(which), p.str(), trials, hits, bound, kind);
}

bool recursion_fixed_point_check(double beta, double c, double delta0, int steps, double rel_tol) {
  if (!(beta > 0.0 && beta <= 1.0) || c < 0.0 || steps < 0)
    throw std::invalid_argument("recursion_fixed_point_check: need beta in (0, 1], c >= 0, steps >= 0");
  const double limit = c / beta;
  double value = delta0;
  double factor = 1.0;
  for (int t = 1; t <= steps; ++t) {
    value = (1.0 - beta) * value + c;
    factor *= (1.0 - beta);
    const double closed = factor * (delta0 - limit);
    const double scale = std::max({std::abs(value), std::abs(limit), std::abs(delta0), 1e-300});
    if (std::abs((value - limit) - closed) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace rankzo::theory
