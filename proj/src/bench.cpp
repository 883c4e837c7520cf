#include "rankzo/bench.hpp"

#include "rankzo/stats.hpp"
#include "rankzo/theory.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace rankzo::bench {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

RunTrace baseline_value_zo(const Objective& obj, const RunConfig& cfg) {
  if (!obj.smoothness()) throw std::invalid_argument("baseline_value_zo: objective needs L");
  if (cfg.T < 0) throw std::invalid_argument("baseline_value_zo: T must be nonnegative");
  cfg.alpha.validate();
  if (cfg.alpha.kind == AlphaPolicy::Kind::instrumented && !obj.has_gradient())
    throw std::invalid_argument("baseline_value_zo: instrumented alpha needs a gradient");
  if (cfg.x0.size() != 0 && cfg.x0.size() != obj.dim()) throw DimensionError("baseline_value_zo: x0 has the wrong dimension");

  const int d = obj.dim();
  const double L = *obj.smoothness();
  const double step = 1.0 / (4.0 * (d + 4) * L);
  const double c_d = theory::c_d_delta(d, cfg.delta);
  const std::optional<double> f_star = obj.optimum_value();

  RunTrace trace;
  trace.scheme = cfg.scheme;
  CounterRng rng(cfg.seed, /*stream=*/1);
  QueryLedger ledger;
  Vector x = cfg.x0.size() == 0 ? default_start(obj) : cfg.x0;
  double f = obj.evaluate(x);
  trace.f_initial = f;
  const double target = f_star ? cfg.target_rel * (f - *f_star) : kNaN;
  if (cfg.keep_iterates) trace.iterates.push_back(x);
  Vector u(d);

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
      switch (cfg.alpha.kind) {
        case AlphaPolicy::Kind::instrumented: rec.alpha = instrumented_alpha(rec.grad_norm, L, c_d, cfg.alpha.c); break;
        case AlphaPolicy::Kind::fixed: rec.alpha = cfg.alpha.alpha0; break;
        case AlphaPolicy::Kind::geometric: rec.alpha = cfg.alpha.alpha0 * std::pow(cfg.alpha.gamma, t); break;
      }
      ledger.begin_iteration();
      rng.fill_normal({u.data(), static_cast<std::size_t>(d)});
      const double f_probe = obj.evaluate(x + rec.alpha * u);
      const double f_base = obj.evaluate(x);
      ledger.charge(2);
      if (!std::isfinite(f_probe)) throw NonFiniteValueError(0, f_probe);
      const Vector direction = -((f_probe - f_base) / rec.alpha) * u;
      rec.grad_dot_direction = obj.has_gradient() ? grad.dot(direction) : kNaN;
      rec.eta = step;
      rec.moved = true;
      x += step * direction;
      f = obj.evaluate(x);
      rec.f_next = f;
      trace.records.push_back(rec);
      if (cfg.keep_iterates) trace.iterates.push_back(x);
    } catch (const std::exception& e) {
      trace.error = "iteration " + std::to_string(t) + ": " + e.what();
      break;
    }
  }
  trace.x_final = x;
  trace.f_final = f;
  trace.gap_final = f_star ? f - *f_star : kNaN;
  trace.total_queries = ledger.total();
  trace.queries_per_iteration = ledger.per_iteration();
  return trace;
}

RunTrace ablate_positive_only(const Objective& obj, const RunConfig& cfg) {
  RunConfig c = cfg;
  c.variant = Variant::positive_only;
  return run(obj, c);
}

std::optional<long long> queries_to_target(const RunTrace& trace, double eps, double f_star) {
  for (const IterRecord& r : trace.records)
    if (r.f - f_star <= eps) return r.queries;
  if (trace.f_final - f_star <= eps) return trace.total_queries;
  return std::nullopt;
}

double log_gap_slope(const RunTrace& trace) {
  std::vector<double> ts, ys;
  for (const IterRecord& r : trace.records) {
    if (r.gap > 0.0 && std::isfinite(r.gap)) {
      ts.push_back(r.t);
      ys.push_back(std::log(r.gap));
    }
  }
  if (ts.size() < 2) return kNaN;
  return stats::linear_fit(ts, ys).slope;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::rank: return "rank";
    case Method::positive_only: return "positive_only";
    case Method::value: return "value";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "rank") return Method::rank;
  if (name == "positive_only") return Method::positive_only;
  if (name == "value") return Method::value;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

void ExperimentGrid::validate() const {
  if (dims.empty() || Ns.empty() || schemes.empty() || methods.empty() || kappas.empty())
    throw std::invalid_argument("grid: every axis needs at least one value");
  if (repetitions < 1) throw std::invalid_argument("grid: repetitions must be positive");
  if (!(target_rel > 0.0 && target_rel < 1.0)) throw std::invalid_argument("grid: target must lie in (0, 1)");
  if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
  for (int N : Ns) require_batch_size(N);
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("grid: dimensions must be positive");
    if (objective == GridObjective::rosenbrock && d % 2 != 0)
      throw std::invalid_argument("grid: Rosenbrock dimensions must be even");
  }
  for (double k : kappas)
    if (!(k >= 1.0)) throw std::invalid_argument("grid: condition numbers must be >= 1");
  base.step.validate();
  base.alpha.validate();
}

namespace {

struct Cell {
  std::string id;
  int d;
  std::optional<double> kappa;
  int N;
  WeightScheme scheme;
  Method method;
};

std::vector<Cell> expand(const ExperimentGrid& g) {
  std::vector<Cell> cells;
  const bool quad = g.objective == GridObjective::quadratic;
  const std::vector<double> kappas = quad ? g.kappas : std::vector<double>{kNaN};
  for (int d : g.dims)
    for (double k : kappas)
      for (int N : g.Ns)
        for (WeightScheme s : g.schemes)
          for (Method m : g.methods) {
            char id[16];
            std::snprintf(id, sizeof id, "c%03zu", cells.size());
            cells.push_back({id, d, quad ? std::optional<double>(k) : std::nullopt, N, s, m});
          }
  return cells;
}

ResultRow run_one(const ExperimentGrid& g, const Cell& cell, std::uint64_t seed) {
  ResultRow row;
  row.config_id = cell.id;
  row.seed = seed;
  row.scheme = cell.scheme;
  row.N = cell.N;
  row.d = cell.d;
  row.kappa = cell.kappa;
  row.method = cell.method;
  row.final_gap = kNaN;
  row.slope = kNaN;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Objective obj = cell.kappa ? make_quadratic(cell.d, g.L / *cell.kappa, g.L, seed)
                                     : make_rosenbrock_like(cell.d);
    RunConfig cfg = g.base;
    cfg.N = cell.N;
    cfg.scheme = cell.scheme;
    cfg.seed = seed;
    cfg.target_rel = g.target_rel;
    cfg.x0 = default_start(obj, g.start_scale);
    RunTrace trace;
    switch (cell.method) {
      case Method::rank: trace = run(obj, cfg); break;
      case Method::positive_only: trace = ablate_positive_only(obj, cfg); break;
      case Method::value: trace = baseline_value_zo(obj, cfg); break;
    }
    const double f_star = obj.optimum_value().value_or(0.0);
    row.queries_to_target = queries_to_target(trace, g.target_rel * (trace.f_initial - f_star), f_star);
    row.total_queries = trace.total_queries;
    row.final_gap = trace.gap_final;
    row.slope = log_gap_slope(trace);
    row.error = trace.error;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return row;
}

nlohmann::json nullable(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

GridResult run_grid(const ExperimentGrid& grid, int jobs) {
  grid.validate();
  const std::vector<Cell> cells = expand(grid);
  const std::size_t reps = static_cast<std::size_t>(grid.repetitions);
  const std::size_t total = cells.size() * reps;
  std::vector<ResultRow> rows(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++)
      rows[i] = run_one(grid, cells[i / reps], grid.first_seed + i % reps);
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return a.config_id != b.config_id ? a.config_id < b.config_id : a.seed < b.seed;
  });

  GridResult result;
  nlohmann::json cell_summaries = nlohmann::json::array();
  nlohmann::json failures = nlohmann::json::array();
  long long wall_total = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& cell = cells[c];
    std::vector<double> q, gaps, slopes;
    int reached = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const ResultRow& row = rows[c * reps + r];
      wall_total += row.wall_ms;
      // Unreached runs count as infinitely expensive.
      q.push_back(row.queries_to_target ? static_cast<double>(*row.queries_to_target) : kInf);
      reached += row.queries_to_target ? 1 : 0;
      gaps.push_back(std::isnan(row.final_gap) ? kInf : row.final_gap);
      if (std::isfinite(row.slope)) slopes.push_back(row.slope);
      if (row.error) failures.push_back({{"config_id", row.config_id}, {"seed", row.seed}, {"error", *row.error}});
    }
    nlohmann::json s = {{"config_id", cell.id},
                        {"d", cell.d},
                        {"kappa", cell.kappa ? nlohmann::json(*cell.kappa) : nlohmann::json(nullptr)},
                        {"N", cell.N},
                        {"scheme", std::string(to_string(cell.scheme))},
                        {"policy", std::string(to_string(cell.method))},
                        {"runs", reps},
                        {"reached", reached},
                        {"median_queries_to_target", nullable(stats::median(q))},
                        {"median_final_gap", nullable(stats::median(gaps))},
                        {"median_slope", slopes.empty() ? nlohmann::json(nullptr) : nullable(stats::median(slopes))}};
    nlohmann::json prediction = nullptr;
    if (cell.kappa) {
      try {
        theory::ComplexityInputs in;
        in.kind = theory::ProblemKind::strongly_convex;
        in.d = cell.d;
        in.L = grid.L;
        in.mu = grid.L / *cell.kappa;
        in.eps = grid.target_rel;
        in.delta_prime = grid.base.delta;
        const theory::ComplexityPrediction p = theory::predict_complexity(in);
        prediction = {{"T", p.T}, {"N", p.N}, {"Q", p.Q},
                      {"T_explicit", p.T_explicit}, {"N_explicit", p.N_explicit}, {"Q_explicit", p.Q_explicit}};
      } catch (const std::exception& e) {
        prediction = {{"error", e.what()}};
      }
    }
    s["prediction"] = prediction;
    cell_summaries.push_back(std::move(s));
  }
  result.summary = {{"objective", grid.objective == GridObjective::quadratic ? "quadratic" : "rosenbrock"},
                    {"target_rel", grid.target_rel},
                    {"L", grid.L},
                    {"cells", std::move(cell_summaries)},
                    {"failures", std::move(failures)},
                    {"wall_ms_total", wall_total}};
  result.rows = std::move(rows);
  return result;
}

void write_rows_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool with_timing) {
  out << "config_id,seed,scheme,N,d,kappa,policy,queries_to_target,final_gap,slope,wall_ms\n";
  char buf[64];
  auto real = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const ResultRow& r : rows) {
    out << r.config_id << ',' << r.seed << ',' << to_string(r.scheme) << ',' << r.N << ',' << r.d << ','
        << (r.kappa ? real(*r.kappa) : std::string()) << ',' << to_string(r.method) << ','
        << (r.queries_to_target ? std::to_string(*r.queries_to_target) : std::string("not reached")) << ','
        << real(r.final_gap) << ',' << real(r.slope) << ',' << (with_timing ? r.wall_ms : 0) << '\n';
  }
}

}  // namespace rankzo::bench
