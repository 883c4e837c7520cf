#include "rankzo/cli.hpp"

#include "rankzo/bench.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

namespace rankzo::cli {

namespace fs = std::filesystem;

namespace {

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json nullable(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<long long> trials;
  bool verbose = false;
};

FlatConfig load_config(const Common& c) {
  FlatConfig cfg = c.config_path.empty() ? FlatConfig() : FlatConfig::load(c.config_path);
  if (c.seed) cfg.set("run.seed", std::to_string(*c.seed));
  return cfg;
}

fs::path prepare_out_dir(const Common& c) {
  const fs::path dir(c.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw ConfigError("output directory '" + c.out_dir + "' cannot be created");
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  return f;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto f = open_output(path);
  f << j.dump(2) << '\n';
}

StepPolicy step_from_config(const FlatConfig& cfg) {
  const std::string kind = cfg.get_string("optimizer.step", "instrumented");
  const double eta0 = cfg.get_double("optimizer.step.eta0", 1.0);
  const double shrink = cfg.get_double("optimizer.step.shrink", 0.5);
  const int tries = cfg.get_int("optimizer.step.max_tries", 20);
  StepPolicy p;
  if (kind == "instrumented") p = StepPolicy::instrumented();
  else if (kind == "fixed") p = StepPolicy::fixed(eta0);
  else if (kind == "backtracking") p = StepPolicy::backtracking(eta0, shrink, tries);
  else throw ConfigError("config: optimizer.step must be instrumented, fixed or backtracking");
  p.validate();
  return p;
}

AlphaPolicy alpha_from_config(const FlatConfig& cfg) {
  const std::string kind = cfg.get_string("optimizer.alpha", "instrumented");
  const double c = cfg.get_double("optimizer.alpha.c", 1.0);
  const double alpha0 = cfg.get_double("optimizer.alpha.alpha0", 1e-3);
  const double gamma = cfg.get_double("optimizer.alpha.gamma", 0.99);
  AlphaPolicy p;
  if (kind == "instrumented") p = AlphaPolicy::instrumented(c);
  else if (kind == "fixed") p = AlphaPolicy::fixed(alpha0);
  else if (kind == "geometric") p = AlphaPolicy::geometric(alpha0, gamma);
  else throw ConfigError("config: optimizer.alpha must be instrumented, fixed or geometric");
  p.validate();
  return p;
}

nlohmann::json trace_summary(const RunTrace& trace, const Objective& obj, const RunConfig& rc) {
  nlohmann::json j = {{"objective", obj.name()},
                      {"d", obj.dim()},
                      {"N", rc.N},
                      {"T", rc.T},
                      {"scheme", std::string(to_string(rc.scheme))},
                      {"variant", rc.variant == Variant::full ? "full" : "positive_only"},
                      {"step", std::string(to_string(rc.step.kind))},
                      {"alpha", std::string(to_string(rc.alpha.kind))},
                      {"seed", rc.seed},
                      {"iterations", trace.completed_iterations()},
                      {"f_initial", nullable(trace.f_initial)},
                      {"f_final", nullable(trace.f_final)},
                      {"final_gap", nullable(trace.gap_final)},
                      {"total_queries", trace.total_queries}};
  if (obj.optimum_value()) {
    const double f_star = *obj.optimum_value();
    const double eps = (rc.target_rel > 0.0 ? rc.target_rel : 1e-4) * (trace.f_initial - f_star);
    const auto q = bench::queries_to_target(trace, eps, f_star);
    j["target_rel"] = rc.target_rel > 0.0 ? rc.target_rel : 1e-4;
    j["queries_to_target"] = q ? nlohmann::json(*q) : nlohmann::json(nullptr);
  }
  j["error"] = trace.error ? nlohmann::json(*trace.error) : nlohmann::json(nullptr);
  return j;
}

// ---- subcommands ---------------------------------------------------------

int cmd_optimize(const Common& c, std::ostream& out, std::ostream& err) {
  Objective obj = make_linear(Vector::Ones(1));
  RunConfig rc;
  bool value_baseline = false;
  fs::path dir;
  try {
    const FlatConfig cfg = load_config(c);
    obj = objective_from_config(cfg);
    const std::string method = cfg.get_string("optimizer.method", "rank");
    if (method != "rank" && method != "value") throw ConfigError("config: optimizer.method must be rank or value");
    value_baseline = method == "value";
    rc = run_config_from_config(cfg, obj);
    cfg.check_all_used();
    dir = prepare_out_dir(c);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const auto start = std::chrono::steady_clock::now();
    const RunTrace trace = value_baseline ? bench::baseline_value_zo(obj, rc) : run(obj, rc);
    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    {
      auto f = open_output(dir / "trace.csv");
      write_trace_csv(f, trace);
    }
    nlohmann::json summary = trace_summary(trace, obj, rc);
    summary["method"] = value_baseline ? "value" : "rank";
    summary["wall_ms"] = wall.count();
    write_json(dir / "summary.json", summary);
    out << "iterations " << trace.completed_iterations() << ", final f " << real(trace.f_final) << ", queries "
        << trace.total_queries << '\n';
    if (trace.error) {
      err << "runtime error: " << *trace.error << '\n';
      return kRuntimeError;
    }
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int cmd_ablate(const Common& c, std::ostream& out, std::ostream& err) {
  Objective obj = make_linear(Vector::Ones(1));
  RunConfig rc;
  fs::path dir;
  try {
    const FlatConfig cfg = load_config(c);
    obj = objective_from_config(cfg, 32);
    rc = run_config_from_config(cfg, obj);
    cfg.check_all_used();
    if (!obj.optimum_value()) throw ConfigError("ablate needs an objective with known optimum value");
    dir = prepare_out_dir(c);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const RunTrace full = run(obj, rc);
    const RunTrace pos = bench::ablate_positive_only(obj, rc);
    {
      auto f = open_output(dir / "trace_full.csv");
      write_trace_csv(f, full);
    }
    {
      auto f = open_output(dir / "trace_positive_only.csv");
      write_trace_csv(f, pos);
    }
    nlohmann::json s_full = trace_summary(full, obj, rc);
    RunConfig rc_pos = rc;
    rc_pos.variant = Variant::positive_only;
    nlohmann::json s_pos = trace_summary(pos, obj, rc_pos);
    nlohmann::json summary = {{"full", s_full}, {"positive_only", s_pos}};
    if (s_full["queries_to_target"].is_number() && s_pos["queries_to_target"].is_number())
      summary["query_ratio"] = s_pos["queries_to_target"].get<double>() / s_full["queries_to_target"].get<double>();
    write_json(dir / "summary.json", summary);
    out << "full: " << s_full["queries_to_target"].dump() << " queries, positive-only: "
        << s_pos["queries_to_target"].dump() << " queries\n";
    if (full.error || pos.error) {
      err << "runtime error: " << (full.error ? *full.error : *pos.error) << '\n';
      return kRuntimeError;
    }
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

int cmd_verify(const Common& c, std::ostream& out, std::ostream& err) {
  std::vector<std::string> ids;
  long long event_trials = 0, appendix_trials = 0;
  std::uint64_t seed = 1;
  theory::AppendixParams ap;
  std::optional<Objective> obj;
  theory::EventParams ep;
  fs::path dir;
  try {
    const FlatConfig cfg = load_config(c);
    std::vector<std::string> defaults = theory::event_ids();
    for (const char* a : {"chernoff", "gauss_max", "chi2", "spectral", "order_low1", "order_low2"}) defaults.push_back(a);
    ids = cfg.get_list("verify.events", defaults);
    if (ids.empty()) throw ConfigError("verify.events is empty");
    const auto& ev = theory::event_ids();
    const auto& ap_ids = theory::appendix_ids();
    for (const auto& id : ids)
      if (std::find(ev.begin(), ev.end(), id) == ev.end() && std::find(ap_ids.begin(), ap_ids.end(), id) == ap_ids.end())
        throw ConfigError("verify.events: unknown id '" + id + "'");
    event_trials = cfg.get_int("verify.trials", 10000);
    appendix_trials = cfg.get_int("verify.appendix_trials", 100000);
    if (c.trials) event_trials = appendix_trials = *c.trials;
    if (event_trials < 1000 || appendix_trials < 1000) throw ConfigError("verify: trials must be at least 1000");
    seed = cfg.get_u64("run.seed", 1);
    obj = objective_from_config(cfg, 100);
    ep.N = cfg.get_int("verify.N", 32);
    ep.delta = cfg.get_double("verify.delta", 0.1);
    ep.alpha_scale = cfg.get_double("verify.alpha_scale", 1.0);
    ep.allow_large_alpha = cfg.get_bool("verify.allow_large_alpha", false);
    ep.x = default_start(*obj, cfg.get_double("verify.start_scale", 1.0));
    ap.N = cfg.get_int("appendix.N", ap.N);
    ap.d = cfg.get_int("appendix.d", ap.d);
    ap.delta = cfg.get_double("appendix.delta", ap.delta);
    ap.p = cfg.get_double("appendix.p", ap.p);
    ap.r = cfg.get_double("appendix.r", ap.r);
    ap.tau = cfg.get_double("appendix.tau", ap.tau);
    cfg.check_all_used();
    ep.objective = &*obj;
    dir = prepare_out_dir(c);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<theory::EventCheckReport> reports;
  try {
    const CounterRng root(seed, /*stream=*/7);
    const auto& ev = theory::event_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const CounterRng rng = root.substream(i);
      const bool is_event = std::find(ev.begin(), ev.end(), ids[i]) != ev.end();
      reports.push_back(is_event ? theory::check_event(ids[i], ep, event_trials, rng, c.jobs)
                                 : theory::check_appendix_bounds(ids[i], ap, appendix_trials, rng, c.jobs));
      const auto& r = reports.back();
      out << r.event_id << ' ' << (r.pass ? "PASS" : "FAIL") << " empirical=" << real(r.empirical)
          << " bound=" << real(r.theoretical_bound) << " trials=" << r.trials << '\n';
    }
    auto f = open_output(dir / "reports.csv");
    write_reports_csv(f, reports);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  const bool all = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  return all ? kOk : kVerificationFailed;
}

int cmd_bench(const Common& c, std::ostream& out, std::ostream& err) {
  bench::ExperimentGrid grid;
  bool timing = false;
  fs::path dir;
  try {
    const FlatConfig cfg = load_config(c);
    const std::string kind = cfg.get_string("bench.objective", "quadratic");
    if (kind == "quadratic") grid.objective = bench::GridObjective::quadratic;
    else if (kind == "rosenbrock") grid.objective = bench::GridObjective::rosenbrock;
    else throw ConfigError("config: bench.objective must be quadratic or rosenbrock");
    grid.dims = cfg.get_int_list("bench.dims", grid.dims);
    grid.kappas = cfg.get_double_list("bench.kappas", grid.kappas);
    grid.Ns = cfg.get_int_list("bench.Ns", grid.Ns);
    grid.schemes.clear();
    for (const auto& s : cfg.get_list("bench.schemes", {"uniform"})) grid.schemes.push_back(parse_weight_scheme(s));
    grid.methods.clear();
    for (const auto& m : cfg.get_list("bench.methods", {"rank"})) grid.methods.push_back(bench::parse_method(m));
    grid.L = cfg.get_double("bench.L", grid.L);
    grid.repetitions = cfg.get_int("bench.repetitions", grid.repetitions);
    grid.first_seed = cfg.get_u64("run.seed", grid.first_seed);
    grid.target_rel = cfg.get_double("bench.target", grid.target_rel);
    grid.start_scale = cfg.get_double("bench.start_scale", grid.start_scale);
    timing = cfg.get_bool("bench.timing", false);
    grid.base.T = cfg.get_int("optimizer.T", 200000);
    grid.base.delta = cfg.get_double("optimizer.delta", grid.base.delta);
    grid.base.max_resamples = cfg.get_int("optimizer.max_resamples", grid.base.max_resamples);
    grid.base.step = step_from_config(cfg);
    grid.base.alpha = alpha_from_config(cfg);
    cfg.check_all_used();
    grid.validate();
    dir = prepare_out_dir(c);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    const bench::GridResult result = bench::run_grid(grid, c.jobs);
    {
      auto f = open_output(dir / "rows.csv");
      bench::write_rows_csv(f, result.rows, timing);
    }
    write_json(dir / "summary.json", result.summary);
    out << result.rows.size() << " runs over " << result.summary["cells"].size() << " cells\n";
    if (c.verbose) {
      for (const auto& cell : result.summary["cells"])
        out << cell["config_id"].get<std::string>() << " median queries " << cell["median_queries_to_target"].dump()
            << '\n';
    }
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

struct PredictFlags {
  std::string kind = "strongly_convex";
  int d = 0;
  double L = 0.0;
  double mu = 0.0;
  double eps = 0.0;
  double delta_prime = 0.1;
  double c1 = 1.0;
  double alpha = 1e-3;
  double initial_gap = 1.0;
};

int cmd_predict(const PredictFlags& p, std::ostream& out, std::ostream& err) {
  theory::ComplexityInputs in;
  if (p.kind == "strongly_convex" || p.kind == "sc") in.kind = theory::ProblemKind::strongly_convex;
  else if (p.kind == "nonconvex" || p.kind == "nc") in.kind = theory::ProblemKind::nonconvex;
  else {
    err << "config error: --kind must be strongly_convex or nonconvex\n";
    return kConfigError;
  }
  in.d = p.d;
  in.L = p.L;
  in.mu = p.mu;
  in.eps = p.eps;
  in.delta_prime = p.delta_prime;
  in.c1 = p.c1;
  in.initial_gap = p.initial_gap;
  if (in.kind == theory::ProblemKind::nonconvex && !(p.mu > 0.0)) in.mu = p.L;  // unused by the nonconvex count
  try {
    if (!(p.alpha > 0.0)) throw std::invalid_argument("--alpha must be positive");
    const theory::ComplexityPrediction r = theory::predict_complexity(in);
    const theory::Floors fl = theory::floors(r.N, in.d, r.delta, in.L, std::nullopt, p.alpha, 1.0);
    out << "T " << r.T << '\n'
        << "N " << r.N << '\n'
        << "Q " << r.Q << '\n'
        << "T_explicit " << r.T_explicit << '\n'
        << "N_explicit " << r.N_explicit << '\n'
        << "Q_explicit " << r.Q_explicit << '\n'
        << "delta " << real(r.delta) << '\n'
        << "floor_sc " << real(fl.strongly_convex) << '\n'
        << "floor_nc " << real(fl.nonconvex) << '\n';
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool with_trials) {
  sub->add_option("--config", c.config_path, "Config file (key = value)");
  sub->add_option("--out", c.out_dir, "Output directory");
  sub->add_option("--seed", c.seed, "Seed override (run.seed)");
  sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  if (with_trials) sub->add_option("--trials", c.trials, "Monte-Carlo trials per check");
  sub->add_flag("-v,--verbose", c.verbose, "More output");
}

}  // namespace

Objective objective_from_config(const FlatConfig& cfg, int default_d) {
  const std::string kind = cfg.get_string("objective.kind", "quadratic");
  const int d = cfg.get_int("objective.d", default_d);
  Objective obj = make_linear(Vector::Ones(1));
  if (kind == "quadratic") {
    const double L = cfg.get_double("objective.L", 10.0);
    const double mu = cfg.get_double("objective.mu", 1.0);
    obj = make_quadratic(d, mu, L, cfg.get_u64("objective.seed", 1));
  } else if (kind == "rosenbrock") {
    obj = make_rosenbrock_like(d);
  } else {
    throw ConfigError("config: objective.kind must be quadratic or rosenbrock");
  }
  const std::string t = cfg.get_string("objective.transform", "none");
  const double a = cfg.get_double("objective.transform.a", 1.0);
  const double b = cfg.get_double("objective.transform.b", 0.0);
  if (t == "none") return obj;
  if (t == "affine") return wrap_monotone(obj, MonotoneTransform::affine(a, b));
  if (t == "exp") return wrap_monotone(obj, MonotoneTransform::exponential());
  if (t == "cube") return wrap_monotone(obj, MonotoneTransform::cube_plus_linear(a));
  throw ConfigError("config: objective.transform must be none, affine, exp or cube");
}

RunConfig run_config_from_config(const FlatConfig& cfg, const Objective& obj) {
  RunConfig rc;
  rc.N = cfg.get_int("optimizer.N", rc.N);
  rc.T = cfg.get_int("optimizer.T", rc.T);
  rc.scheme = parse_weight_scheme(cfg.get_string("optimizer.scheme", "uniform"));
  const std::string variant = cfg.get_string("optimizer.variant", "full");
  if (variant == "full") rc.variant = Variant::full;
  else if (variant == "positive_only") rc.variant = Variant::positive_only;
  else throw ConfigError("config: optimizer.variant must be full or positive_only");
  rc.step = step_from_config(cfg);
  rc.alpha = alpha_from_config(cfg);
  rc.delta = cfg.get_double("optimizer.delta", rc.delta);
  rc.target_rel = cfg.get_double("optimizer.target", rc.target_rel);
  rc.max_resamples = cfg.get_int("optimizer.max_resamples", rc.max_resamples);
  rc.seed = cfg.get_u64("run.seed", rc.seed);
  rc.x0 = default_start(obj, cfg.get_double("optimizer.start_scale", 1.0));
  rc.validate(obj);
  return rc;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "t,f,fgap,gradnorm,alpha,eta,queries_cum\n";
  for (const IterRecord& r : trace.records)
    out << r.t << ',' << real(r.f) << ',' << real(r.gap) << ',' << real(r.grad_norm) << ',' << real(r.alpha) << ','
        << real(r.eta) << ',' << r.queries << '\n';
}

void write_reports_csv(std::ostream& out, const std::vector<theory::EventCheckReport>& reports) {
  out << "event_id,params,trials,empirical,bound,pass\n";
  for (const auto& r : reports)
    out << r.event_id << ',' << r.params << ',' << r.trials << ',' << real(r.empirical) << ','
        << real(r.theoretical_bound) << ',' << (r.pass ? "true" : "false") << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rank-based zeroth-order optimizer"};
  app.require_subcommand(1);
  Common common;
  PredictFlags pf;
  std::function<int()> action;

  auto* opt = app.add_subcommand("optimize", "Run one optimization, write trace.csv and summary.json");
  add_common(opt, common, false);
  opt->callback([&] { action = [&] { return cmd_optimize(common, out, err); }; });

  auto* ver = app.add_subcommand("verify", "Monte-Carlo check of the event and tail bounds, write reports.csv");
  add_common(ver, common, true);
  ver->callback([&] { action = [&] { return cmd_verify(common, out, err); }; });

  auto* ben = app.add_subcommand("bench", "Run an experiment grid, write rows.csv and summary.json");
  add_common(ben, common, false);
  ben->callback([&] { action = [&] { return cmd_bench(common, out, err); }; });

  auto* abl = app.add_subcommand("ablate", "Compare full and positive-only weighting on one config");
  add_common(abl, common, false);
  abl->callback([&] { action = [&] { return cmd_ablate(common, out, err); }; });

  auto* pre = app.add_subcommand("predict", "Print predicted T, N, Q and the alpha floors");
  pre->add_option("--kind", pf.kind, "strongly_convex or nonconvex");
  pre->add_option("--d", pf.d, "Dimension")->required()->check(CLI::PositiveNumber);
  pre->add_option("--L", pf.L, "Smoothness constant")->required()->check(CLI::PositiveNumber);
  pre->add_option("--mu", pf.mu, "Strong convexity constant")->check(CLI::PositiveNumber);
  pre->add_option("--eps", pf.eps, "Target accuracy")->required()->check(CLI::PositiveNumber);
  pre->add_option("--delta-prime", pf.delta_prime, "Overall failure probability")->check(CLI::Range(0.0, 1.0));
  pre->add_option("--c1", pf.c1, "Constant in the batch-size rule")->check(CLI::PositiveNumber);
  pre->add_option("--alpha", pf.alpha, "Smoothing radius for the floor terms")->check(CLI::PositiveNumber);
  pre->add_option("--initial-gap", pf.initial_gap, "f(x0) - f*, nonconvex explicit count")->check(CLI::PositiveNumber);
  pre->callback([&] {
    action = [&] {
      if (pf.kind != "nonconvex" && pf.kind != "nc" && !(pf.mu > 0.0)) {
        err << "config error: --mu is required for strongly convex predictions\n";
        return static_cast<int>(kConfigError);
      }
      return cmd_predict(pf, out, err);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return action ? action() : kConfigError;
}

}  // namespace rankzo::cli
