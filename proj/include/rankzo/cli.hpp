#pragma once

#include "rankzo/config.hpp"
#include "rankzo/optimizer.hpp"
#include "rankzo/theory.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace rankzo::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kRuntimeError = 3 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// objective.kind (quadratic | rosenbrock), objective.d, objective.mu,
/// objective.L, objective.seed, objective.transform (none | affine | exp |
/// cube), objective.transform.a, objective.transform.b.
Objective objective_from_config(const FlatConfig& cfg, int default_d = 16);

/// optimizer.* and run.seed keys. Validates against `obj`.
RunConfig run_config_from_config(const FlatConfig& cfg, const Objective& obj);

/// Columns t, f, fgap, gradnorm, alpha, eta, queries_cum; one row per
/// completed iteration.
void write_trace_csv(std::ostream& out, const RunTrace& trace);

/// Columns event_id, params, trials, empirical, bound, pass.
void write_reports_csv(std::ostream& out, const std::vector<theory::EventCheckReport>& reports);

}  // namespace rankzo::cli
