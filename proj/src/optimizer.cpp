#include "rankzo/optimizer.hpp"

#include "rankzo/theory.hpp"

#include <cmath>
#include <limits>

namespace rankzo {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void StepPolicy::validate() const {
  if (kind == Kind::instrumented) return;
  if (!(eta0 > 0.0)) throw std::invalid_argument("StepPolicy: eta0 must be positive");
  if (kind == Kind::backtracking) {
    if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("StepPolicy: shrink must lie in (0, 1)");
    if (max_tries < 1) throw std::invalid_argument("StepPolicy: max_tries must be >= 1");
  }
}

void AlphaPolicy::validate() const {
  switch (kind) {
    case Kind::instrumented:
      if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("AlphaPolicy: c must lie in (0, 1]");
      return;
    case Kind::geometric:
      if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("AlphaPolicy: gamma must lie in (0, 1)");
      [[fallthrough]];
    case Kind::fixed:
      if (!(alpha0 > 0.0)) throw std::invalid_argument("AlphaPolicy: alpha0 must be positive");
      return;
  }
}

std::string_view to_string(StepPolicy::Kind k) {
  switch (k) {
    case StepPolicy::Kind::instrumented: return "instrumented";
    case StepPolicy::Kind::fixed: return "fixed";
    case StepPolicy::Kind::backtracking: return "backtracking";
  }
  return "?";
}

std::string_view to_string(AlphaPolicy::Kind k) {
  switch (k) {
    case AlphaPolicy::Kind::instrumented: return "instrumented";
    case AlphaPolicy::Kind::fixed: return "fixed";
    case AlphaPolicy::Kind::geometric: return "geometric";
  }
  return "?";
}

void RunConfig::validate(const Objective& obj) const {
  require_batch_size(N);
  if (T < 0) throw std::invalid_argument("RunConfig: T must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("RunConfig: delta must lie in (0, 1)");
  if (target_rel < 0.0) throw std::invalid_argument("RunConfig: target must be nonnegative");
  if (max_resamples < 0) throw std::invalid_argument("RunConfig: max_resamples must be nonnegative");
  step.validate();
  alpha.validate();
  const bool instrumented = step.kind == StepPolicy::Kind::instrumented || alpha.kind == AlphaPolicy::Kind::instrumented;
  if (instrumented && (!obj.has_gradient() || !obj.smoothness()))
    throw std::invalid_argument("RunConfig: instrumented policies need an objective with gradient and L");
  if (x0.size() != 0 && x0.size() != obj.dim()) throw DimensionError("RunConfig: x0 has the wrong dimension");
}

Vector descent_direction(const RankedBatch& ranked, const WeightVector& w) {
  if (ranked.size() != w.batch_size())
    throw std::invalid_argument("descent_direction: batch size does not match weight vector");
  Vector d = Vector::Zero(ranked.batch().dim());
  for (int rank : w.ranks()) d += w.at_rank(rank) * ranked.direction(rank).transpose();
  return d;
}

double instrumented_step_size(const Vector& grad, const RankedBatch& ranked, const WeightVector& w, double f_x,
                              double alpha, double L, double c_N_d) {
  if (ranked.size() != w.batch_size())
    throw std::invalid_argument("instrumented_step_size: batch size does not match weight vector");
  double eta = std::numeric_limits<double>::infinity();
  for (int rank : w.ranks()) {
    const double wk = w.at_rank(rank);
    const double proj = grad.dot(ranked.direction(rank).transpose());
    const double slope = (f_x - ranked.instrumentation_value_at_rank(rank)) / alpha;
    const double term = proj * proj / (2.0 * L * c_N_d * wk) / slope;
    if (!(term > 0.0) || !std::isfinite(term)) throw StepRegimeViolation();
    eta = std::min(eta, term);
  }
  return eta;
}

double instrumented_alpha(double grad_norm, double L, double c_d, double c) {
  if (!(grad_norm > 0.0)) throw StationaryPointError();
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("instrumented_alpha: c must lie in (0, 1]");
  return c * grad_norm / (4.0 * L * c_d);
}

StepOutcome practical_step(const Objective& obj, const Vector& x, const Vector& direction, const StepPolicy& policy,
                           QueryLedger& ledger) {
  policy.validate();
  StepOutcome out{x, 0.0, 0, false};
  switch (policy.kind) {
    case StepPolicy::Kind::instrumented:
      throw std::invalid_argument("practical_step: instrumented policy needs the gradient path");
    case StepPolicy::Kind::fixed:
      out.x = x + policy.eta0 * direction;
      out.eta = policy.eta0;
      out.moved = true;
      return out;
    case StepPolicy::Kind::backtracking: {
      double eta = policy.eta0;
      for (int attempt = 0; attempt < policy.max_tries; ++attempt, eta *= policy.shrink) {
        Vector candidate = x + eta * direction;
        // One comparison of two points: both evaluations are charged.
        const double f_candidate = obj.evaluate(candidate);
        const double f_current = obj.evaluate(x);
        ledger.charge(2);
        out.extra_queries += 2;
        if (f_candidate < f_current) {
          out.x = std::move(candidate);
          out.eta = eta;
          out.moved = true;
          return out;
        }
      }
      return out;
    }
  }
  return out;
}

Vector default_start(const Objective& obj, double scale) {
  if (obj.name().starts_with("rosenbrock")) {
    Vector x(obj.dim());
    for (int i = 0; i < obj.dim(); ++i) x[i] = (i % 2 == 0) ? -1.2 : 1.0;
    return x;
  }
  if (obj.optimum_point()) return *obj.optimum_point() + scale * Vector::Ones(obj.dim());
  return Vector::Zero(obj.dim());
}

RunTrace run(const Objective& obj, const RunConfig& cfg) {
  cfg.validate(obj);
  RunTrace trace;
  trace.scheme = cfg.scheme;

  const int d = obj.dim();
  const WeightVector weights =
      cfg.variant == Variant::full ? make_weights(cfg.scheme, cfg.N) : positive_only_weights(cfg.scheme, cfg.N);
  const bool instrumented_step = cfg.step.kind == StepPolicy::Kind::instrumented;
  const bool instrumented_alpha_policy = cfg.alpha.kind == AlphaPolicy::Kind::instrumented;
  const double L = obj.smoothness().value_or(kNaN);
  const double c_d = theory::c_d_delta(d, cfg.delta);
  const double c_N = theory::c_N_d_delta(cfg.N, d, cfg.delta);
  const std::optional<double> f_star = obj.optimum_value();

  CounterRng rng(cfg.seed, /*stream=*/1);
  QueryLedger ledger;
  Vector x = cfg.x0.size() == 0 ? default_start(obj) : cfg.x0;
  double f = obj.evaluate(x);
  trace.f_initial = f;
  const double gap0 = f_star ? f - *f_star : kNaN;
  const double target = cfg.target_rel * gap0;
  if (cfg.keep_iterates) trace.iterates.push_back(x);

  auto finish = [&] {
    trace.x_final = x;
    trace.f_final = f;
    trace.gap_final = f_star ? f - *f_star : kNaN;
    trace.total_queries = ledger.total();
    trace.queries_per_iteration = ledger.per_iteration();
    return trace;
  };

  for (int t = 0; t < cfg.T; ++t) {
    IterRecord rec;
    rec.t = t;
    rec.f = f;
    rec.gap = f_star ? f - *f_star : kNaN;
    rec.queries = ledger.total();
    if (cfg.target_rel > 0.0 && f_star && rec.gap <= target) break;

    try {
      const Vector grad = obj.has_gradient() ? obj.gradient(x) : Vector();
      rec.grad_norm = obj.has_gradient() ? grad.norm() : kNaN;

      double alpha = 0.0;
      switch (cfg.alpha.kind) {
        case AlphaPolicy::Kind::instrumented: alpha = instrumented_alpha(rec.grad_norm, L, c_d, cfg.alpha.c); break;
        case AlphaPolicy::Kind::fixed: alpha = cfg.alpha.alpha0; break;
        case AlphaPolicy::Kind::geometric: alpha = cfg.alpha.alpha0 * std::pow(cfg.alpha.gamma, t); break;
      }

      ledger.begin_iteration();
      Vector x_next = x;
      for (;;) {
        RankedBatch ranked = rank_oracle(obj, x, alpha, sample_directions(rng, cfg.N, d), ledger, instrumented_step);
        const Vector direction = descent_direction(ranked, weights);
        rec.grad_dot_direction = obj.has_gradient() ? grad.dot(direction) : kNaN;
        if (instrumented_step) {
          try {
            rec.eta = instrumented_step_size(grad, ranked, weights, f, alpha, L, c_N);
          } catch (const StepRegimeViolation&) {
            if (instrumented_alpha_policy) {
              if (rec.resamples >= cfg.max_resamples) throw;
              alpha *= 0.5;
              ++rec.resamples;
              continue;
            }
            // A fixed smoothing radius is kept; the move is skipped instead.
            rec.eta = 0.0;
            break;
          }
          x_next = x + rec.eta * direction;
          rec.moved = true;
        } else {
          StepOutcome step = practical_step(obj, x, direction, cfg.step, ledger);
          x_next = std::move(step.x);
          rec.eta = step.eta;
          rec.moved = step.moved;
        }
        break;
      }
      rec.alpha = alpha;

      x = std::move(x_next);
      f = obj.evaluate(x);
      rec.f_next = f;
      trace.records.push_back(rec);
      if (cfg.keep_iterates) trace.iterates.push_back(x);
    } catch (const std::exception& e) {
      trace.error = "iteration " + std::to_string(t) + ": " + e.what();
      break;
    }
  }
  return finish();
}

}  // namespace rankzo
