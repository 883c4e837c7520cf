#include "helpers.hpp"
#include "rankzo/stats.hpp"
#include "rankzo/optimizer.hpp"
#include "rankzo/theory.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <doctest.h>

#include <cmath>

using namespace rankzo;
using namespace rankzo::theory;

TEST_CASE("C_{d,delta} and C_{N,d,delta}") {
  CHECK(c_d_delta(100, 0.01) == doctest::Approx(109.2103).epsilon(1e-6));
  CHECK(c_d_delta(10, 0.1) == doctest::Approx(14.6052).epsilon(1e-5));
  CHECK_THROWS((void)c_d_delta(10, 1.0));
  CHECK_THROWS((void)c_d_delta(10, 0.0));
  CHECK(std::abs(c_N_d_delta(32, 100, 0.1) - 270.53) <= 0.01);
  CHECK(std::abs(c_N_d_delta(8, 4, 0.5) - 32.09) <= 0.01);
  CHECK(c_N_d_delta(36, 100, 0.1) > c_N_d_delta(32, 100, 0.1));
  CHECK(c_N_d_delta(32, 101, 0.1) > c_N_d_delta(32, 100, 0.1));
  CHECK(c_N_d_delta(32, 100, 0.05) > c_N_d_delta(32, 100, 0.1));
  CHECK(c_d_delta(11, 0.1) > c_d_delta(10, 0.1));
  CHECK(c_d_delta(10, 0.05) > c_d_delta(10, 0.1));
  CHECK_THROWS((void)c_N_d_delta(10, 4, 0.5));
}

TEST_CASE("KL divergence and the order-statistic event bound") {
  CHECK(kl_bernoulli(0.3, 0.3) == 0.0);
  CHECK(kl_bernoulli(0.25, kQuotedTailAtTwo) == doctest::Approx(0.4043).epsilon(0.0001 / 0.4043));
  CHECK(gaussian_tail_at_two() == doctest::Approx(0.022750).epsilon(1e-4));
  CHECK(kl_bernoulli(0.25, gaussian_tail_at_two()) == doctest::Approx(0.4005).epsilon(0.0001 / 0.4005));
  CHECK(kl_bernoulli(0.25, 0.1) != doctest::Approx(kl_bernoulli(0.1, 0.25)));
  CHECK_THROWS((void)kl_bernoulli(0.0, 0.2));
  CHECK_THROWS((void)kl_bernoulli(0.2, 1.0));

  CHECK(event_bound_E45(16) == doctest::Approx(1.65e-3).epsilon(0.05));
  CHECK(event_bound_E45(64) == doctest::Approx(7.3e-12).epsilon(0.01));
  for (int N = 4; N < 128; N += 4) CHECK(event_bound_E45(N + 4) < event_bound_E45(N));
}

TEST_CASE("rho and the alpha floors") {
  CHECK(rho(32, 100, 0.01, 0.1, 1.0, 1.0) == doctest::Approx(1.604e-4).epsilon(0.01));
  CHECK(rho(32, 100, 0.01, 0.1, 1.0, 0.5) == doctest::Approx(0.5 * rho(32, 100, 0.01, 0.1, 1.0, 1.0)));
  CHECK(rho(32, 100, 0.01, 1.0, 1.0, 1.0) == doctest::Approx(10 * rho(32, 100, 0.01, 0.1, 1.0, 1.0)));
  CHECK(rho(32, 100, 0.01, 0.2, 1.0, 1.0) > rho(32, 100, 0.01, 0.1, 1.0, 1.0));
  CHECK_THROWS((void)rho(32, 100, 0.01, 2.0, 1.0, 1.0));
  // C_{N,d,delta} >= N/2 keeps rho below 1/8 for every valid input.
  for (int N : {4, 16, 64, 256})
    for (int d : {1, 10, 1000}) CHECK(rho(N, d, 0.999, 1.0, 1.0, 1.0) < 0.125);

  const Floors f = floors(32, 100, 0.01, 1.0, std::nullopt, 1e-4, 1.0);
  const double by_hand = 32 * 109.2103 * 109.2103 * std::sqrt(2 * std::log(6400.0)) * 1e-8 / (2 * 297.74);
  CHECK(f.strongly_convex == doctest::Approx(by_hand).epsilon(1e-4));
  CHECK(f.strongly_convex == doctest::Approx(2.68e-5).epsilon(0.02));
  CHECK(f.nonconvex == doctest::Approx(32 * 109.2103 * 109.2103 * std::log(6400.0) * 1e-8).epsilon(1e-5));
  const Floors half = floors(32, 100, 0.01, 1.0, std::nullopt, 5e-5, 1.0);
  CHECK(half.strongly_convex == doctest::Approx(f.strongly_convex / 4));
  CHECK(half.nonconvex == doctest::Approx(f.nonconvex / 4));
  const Floors spread = floors(32, 100, 0.01, 1.0, std::nullopt, 1e-4, 0.5);
  CHECK(spread.strongly_convex == doctest::Approx(2 * f.strongly_convex));
  CHECK(spread.nonconvex == doctest::Approx(4 * f.nonconvex));

  CHECK(iteration_failure_bound_sc(32, 0.01) == doctest::Approx(0.18 + 2 * event_bound_E45(32)));
  CHECK(iteration_failure_bound_nc(32, 0.01) == doctest::Approx(0.19 + 2 * event_bound_E45(32)));

  const TheoryConstants c = compute_constants(32, 100, 0.01, 0.1, 1.0, 1e-4, 1.0);
  CHECK(c.rho > 0.0);
  CHECK(c.rho < 1.0);
  CHECK(c.delta_floor_sc == f.strongly_convex);
  CHECK(c.kl_quarter == kl_bernoulli(0.25, c.p_tail));
}

TEST_CASE("predict_complexity") {
  ComplexityInputs in;
  in.kind = ProblemKind::strongly_convex;
  in.d = 32;
  in.L = 10;
  in.mu = 1;
  in.eps = 1e-6;
  in.delta_prime = 0.1;
  const ComplexityPrediction p = predict_complexity(in);
  CHECK(p.T == static_cast<long long>(std::ceil(320 * std::log(1e6))));
  CHECK(p.N % 4 == 0);
  CHECK(p.Q == p.T * p.N);
  CHECK(p.Q_explicit == p.T_explicit * p.N_explicit);
  CHECK(p.T_explicit > 0);
  CHECK(p.passes >= 1);
  // The explicit horizon is a fixed point of T = log(1/eps) / rho(N, d, delta' / (T N)).
  CHECK(static_cast<long long>(std::ceil(std::log(1e6) / rho(p.N_explicit, 32, p.delta, 1, 10, 1.0))) == p.T_explicit);

  ComplexityInputs d2 = in;
  d2.d = 64;
  CHECK(std::abs(static_cast<double>(predict_complexity(d2).T) / p.T - 2.0) < 1e-3);

  ComplexityInputs nc = in;
  nc.kind = ProblemKind::nonconvex;
  nc.eps = 1e-3;
  const auto a = predict_complexity(nc);
  nc.eps = 5e-4;
  const auto b = predict_complexity(nc);
  CHECK(b.T == 2 * a.T);

  CHECK(ceil_to_multiple_of_four(1.0) == 4);
  CHECK(ceil_to_multiple_of_four(8.0) == 8);
  CHECK(ceil_to_multiple_of_four(8.2) == 12);
  ComplexityInputs bad = in;
  bad.mu = 20;
  CHECK_THROWS((void)predict_complexity(bad));
  bad = in;
  bad.eps = -1;
  CHECK_THROWS((void)predict_complexity(bad));
}

namespace {

EventParams quad_params(const Objective& q, int N, double delta) {
  EventParams p;
  p.objective = &q;
  p.x = default_start(q);
  p.N = N;
  p.delta = delta;
  return p;
}

double stats_tail_one() { return rankzo::stats::normal_sf(1.0); }
double stats_tail_two() { return rankzo::stats::normal_sf(2.0); }

/// Pr(at least m of N i.i.d. Bernoulli(p) successes), exact.
double binomial_upper_tail(int N, int m, double p) {
  return boost::math::cdf(boost::math::complement(boost::math::binomial_distribution<double>(N, p), m - 1));
}

}  // namespace

TEST_CASE("event checkers on the instrumented quadratic") {
  const Objective q = make_quadratic(100, 1, 10, 1);
  const CounterRng rng(1, 7);
  const EventParams p = quad_params(q, 32, 0.1);

  const auto e2 = check_event("E2", p, 10000, rng);
  CHECK(e2.pass);
  CHECK(e2.theoretical_bound == 0.1);
  CHECK(e2.trials == 10000);

  const auto e1 = check_event("E1", p, 2000, rng);
  CHECK(e1.pass);
  CHECK(e1.theoretical_bound == doctest::Approx(1.6));

  // E4 fails whenever fewer than N/4 of the N projections exceed ||grad||.
  // With alpha at the ceiling the ranking is close to the projection order,
  // so the failure rate tracks the exact binomial probability.
  const auto e4 = check_event("E4", p, 4000, rng);
  const double miss = 1.0 - binomial_upper_tail(32, 8, stats_tail_one());
  CHECK_FALSE(e4.pass);
  CHECK(std::abs(e4.empirical - miss) < 0.05);
  CHECK(e4.theoretical_bound == doctest::Approx(event_bound_E45(32)));
}

TEST_CASE("event checkers on a linear objective") {
  const Objective lin = make_linear(Vector::Constant(20, 0.3), 1.0);
  const CounterRng rng(2);
  const EventParams p = quad_params(lin, 64, 0.1);
  // Remainder is zero: E1 never fails.
  CHECK(check_event("E1", p, 1000, rng).empirical == 0.0);
  // Projections are exactly standard normals times ||grad||.
  const auto e5 = check_event("E5", p, 4000, rng);
  const double miss = 1.0 - binomial_upper_tail(64, 16, stats_tail_one());
  CHECK(std::abs(e5.empirical - miss) < 4 * std::sqrt(miss * (1 - miss) / 4000) + 1e-3);
  CHECK_FALSE(e5.pass);

  const EventParams loose = quad_params(lin, 16, 0.5);
  const auto e3 = check_event("E3", loose, 4000, rng);
  CHECK(e3.pass);
  CHECK(e3.empirical < 0.5 / 4);
}

TEST_CASE("event checker preconditions") {
  const Objective q = make_quadratic(10, 1, 10, 1);
  const CounterRng rng(3);
  EventParams p = quad_params(q, 16, 0.1);
  CHECK_THROWS((void)check_event("E1", p, 999, rng));
  CHECK_THROWS((void)check_event("E9", p, 1000, rng));
  p.alpha_scale = 10;
  CHECK_THROWS((void)check_event("E4", p, 1000, rng));
  p.allow_large_alpha = true;
  CHECK_NOTHROW((void)check_event("E4", p, 1000, rng));
  p.alpha_scale = 1;
  p.x = *q.optimum_point();
  CHECK_THROWS((void)check_event("E2", p, 1000, rng));
  const Objective blind = wrap_monotone(q, MonotoneTransform::affine(1, 0));
  EventParams b = quad_params(q, 16, 0.1);
  b.objective = &blind;
  CHECK_THROWS((void)check_event("E2", b, 1000, rng));
}

TEST_CASE("event checks do not depend on the number of workers") {
  const Objective q = make_quadratic(20, 1, 10, 1);
  const CounterRng rng(4);
  const EventParams p = quad_params(q, 16, 0.1);
  const auto a = check_event("E3", p, 3000, rng, 1);
  const auto b = check_event("E3", p, 3000, rng, 3);
  CHECK(a.hits == b.hits);
  AppendixParams ap;
  CHECK(check_appendix_bounds("chi2", ap, 5000, rng, 1).hits == check_appendix_bounds("chi2", ap, 5000, rng, 4).hits);
}

TEST_CASE("appendix checks") {
  const CounterRng rng(5);
  AppendixParams ap;
  const auto ch = check_appendix_bounds("chernoff", ap, 100000, rng);
  CHECK(ch.pass);
  CHECK(ch.hits == 0);
  CHECK(ch.theoretical_bound == doctest::Approx(std::exp(-64 * kl_bernoulli(0.25, 0.0228))));

  const auto chi = check_appendix_bounds("chi2", ap, 100000, rng);
  CHECK(chi.pass);
  CHECK(chi.params.find("d=100") != std::string::npos);

  AppendixParams sp = ap;
  sp.N = 16;
  const auto spec = check_appendix_bounds("spectral", sp, 20000, rng);
  CHECK(spec.pass);
  CHECK(spec.theoretical_bound == doctest::Approx(2 * std::exp(-2.0)));

  const auto gm = check_appendix_bounds("gauss_max", ap, 50000, rng);
  CHECK(gm.pass);
  const auto gt = check_appendix_bounds("gauss_tail", ap, 50000, rng);
  CHECK(gt.pass);
  CHECK(gt.empirical == doctest::Approx(2 * 0.0227501).epsilon(0.05));

  // The exact probability that the N/4-th largest of N standard normals
  // exceeds 2 is a binomial tail, far below the claimed lower bound.
  AppendixParams small = ap;
  small.N = 16;
  const auto lo1 = check_appendix_bounds("order_low1", small, 100000, rng);
  const double exact = binomial_upper_tail(16, 4, stats_tail_two());
  CHECK(lo1.bound_kind == BoundKind::lower);
  CHECK(std::abs(lo1.empirical - exact) < 4 * std::sqrt(exact * (1 - exact) / 100000) + 1e-5);
  CHECK_FALSE(lo1.pass);
  const auto lo2 = check_appendix_bounds("order_low2", small, 100000, rng);
  CHECK(std::abs(lo2.empirical - exact) < 4 * std::sqrt(exact * (1 - exact) / 100000) + 1e-5);

  CHECK_THROWS((void)check_appendix_bounds("nope", ap, 1000, rng));
  CHECK_THROWS((void)check_appendix_bounds("chi2", ap, 10, rng));
}

TEST_CASE("three-sigma pass rule") {
  CHECK(passes_three_sigma(0.1 + 0.0089, 0.1, 10000, BoundKind::upper));
  CHECK_FALSE(passes_three_sigma(0.1 + 0.0091, 0.1, 10000, BoundKind::upper));
  CHECK(passes_three_sigma(0.9 - 0.0089, 0.9, 10000, BoundKind::lower));
  CHECK_FALSE(passes_three_sigma(0.5, 0.9, 10000, BoundKind::lower));
}

TEST_CASE("recursion fixed point") {
  CHECK(recursion_fixed_point_check(0.5, 0.0, 1.0, 20));
  CHECK(recursion_fixed_point_check(0.1, 0.05, 10.0, 200));
  CHECK(recursion_fixed_point_check(0.3, 0.6, 2.0, 50));
  CHECK(recursion_fixed_point_check(1.0, 0.2, 5.0, 10));
  CHECK_THROWS((void)recursion_fixed_point_check(0.0, 0.1, 1.0, 10));
  CHECK_THROWS((void)recursion_fixed_point_check(0.5, -0.1, 1.0, 10));
}
