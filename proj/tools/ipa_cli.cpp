// Command-line front end: solve, analyze, oracle and bench.
//
// Exit codes: 0 success, 1 input error, 2 divergence, 3 condition not
// certifiable when certification was required.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ipa/analysis.hpp"
#include "ipa/csv.hpp"
#include "ipa/harness.hpp"
#include "ipa/solver.hpp"

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kDivergence = 2, kNotCertifiable = 3 };

double resolve_mu(const std::string& text, const ipa::LinearOperator& op) {
  if (text == "auto") return ipa::default_step_size(op);
  std::size_t used = 0;
  double mu = 0.0;
  try {
    mu = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(mu > 0.0)) throw ipa::InputError("--mu must be 'auto' or a positive real");
  return mu;
}

ipa::LinearOperator load_operator(const std::string& path) {
  return ipa::LinearOperator::dense(ipa::csv::read_matrix(path));
}

ipa::MeasurementVector load_measurement(const std::string& path, const ipa::LinearOperator& op) {
  Eigen::VectorXd g = ipa::csv::read_vector(path);
  if (g.size() != op.codomain_dim()) {
    throw ipa::InputError(path + ": measurement has length " + std::to_string(g.size()) +
                          ", operator has " + std::to_string(op.codomain_dim()) + " rows");
  }
  return ipa::MeasurementVector(std::move(g));
}

void emit(std::ostream& out, const std::string& key, const std::string& value) {
  out << key << ',' << value << '\n';
}

std::string opt(const std::optional<double>& v) { return v ? ipa::csv::format_real(*v) : std::string(); }

struct SolveArgs {
  std::string op, measurement, set, mu = "auto", trace, reference, out;
  double eps = 0.0;
  std::size_t max_iter = 500;
  double tol = 1e-12;
  double delta = 0.1;
};

int run_solve(const SolveArgs& a) {
  const auto op = load_operator(a.op);
  const auto g = load_measurement(a.measurement, op);
  const auto set = ipa::parse_constraint_set(a.set, op.domain_dim());

  ipa::SolverConfig config;
  config.mu = resolve_mu(a.mu, op);
  config.eps_schedule = ipa::EpsSchedule::constant(a.eps);
  config.max_iter = a.max_iter;
  config.residual_tol = a.tol;
  config.delta = a.delta;

  std::optional<ipa::SignalVector> reference;
  if (!a.reference.empty()) reference = ipa::SignalVector(ipa::csv::read_vector(a.reference));

  const ipa::SolverTrace trace = ipa::solve(g, op, set, config, reference);
  if (!a.trace.empty()) {
    std::ofstream out(a.trace);
    if (!out) throw ipa::InputError("cannot write " + a.trace);
    ipa::write_trace_csv(out, trace);
  }
  if (a.out.empty())
    ipa::csv::write_vector(std::cout, trace.final_iterate.values());
  else
    ipa::csv::write_vector(a.out, trace.final_iterate.values());
  std::cerr << "termination=" << ipa::to_string(trace.termination)
            << " iterations=" << trace.iterations()
            << " residual=" << ipa::csv::format_real(trace.records.back().residual_norm) << '\n';
  return kOk;
}

struct AnalyzeArgs {
  std::string op, set, mode = "exact", mu = "auto", format = "csv";
  int trials = 10000;
  std::uint64_t seed = 0;
  bool require_certified = false;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto op = load_operator(a.op);
  const auto set = ipa::parse_constraint_set(a.set, op.domain_dim());
  const double mu = resolve_mu(a.mu, op);
  const ipa::BiLipschitzEstimate est =
      a.mode == "exact" ? ipa::exact_bilipschitz(op, set) : ipa::mc_bilipschitz(op, set, a.trials, a.seed);
  const ipa::BoundReport report = ipa::evaluate_bounds(est, ipa::BoundInputs{.mu = mu});

  if (a.format == "csv") {
    emit(std::cout, "set", set.describe());
    emit(std::cout, "N", std::to_string(op.domain_dim()));
    emit(std::cout, "M", std::to_string(op.codomain_dim()));
    emit(std::cout, "method", ipa::to_string(est.method));
    emit(std::cout, "trials_or_supports", std::to_string(est.trials_or_supports));
    emit(std::cout, "alpha", ipa::csv::format_real(est.alpha));
    emit(std::cout, "beta", ipa::csv::format_real(est.beta));
    emit(std::cout, "bilipschitz", est.bilipschitz() ? "true" : "false");
    emit(std::cout, "mu", ipa::csv::format_real(mu));
    emit(std::cout, "condition_pass", report.condition_pass ? "true" : "false");
    emit(std::cout, "condition_margin", ipa::csv::format_real(report.condition_margin));
    emit(std::cout, "c", opt(report.c));
    if (mu != 1.0) emit(std::cout, "c_statement", opt(report.c_statement));
  } else {
    std::cout << "Constraint set   " << set.describe() << " in R^" << op.domain_dim() << '\n'
              << "Operator         " << op.codomain_dim() << " x " << op.domain_dim() << '\n'
              << "Method           " << ipa::to_string(est.method) << " ("
              << est.trials_or_supports << (a.mode == "exact" ? " subproblems)" : " trials)") << '\n'
              << "alpha            " << ipa::csv::format_real(est.alpha)
              << (est.bilipschitz() ? "" : "  (T not bi-Lipschitz on A)") << '\n'
              << "beta             " << ipa::csv::format_real(est.beta) << '\n'
              << "mu               " << ipa::csv::format_real(mu) << '\n'
              << "beta <= 1/mu < 1.5 alpha: " << (report.condition_pass ? "holds" : "fails")
              << " (margin " << ipa::csv::format_real(report.condition_margin) << ")\n";
    if (report.c) std::cout << "c = 4/(3 alpha - 2/mu) = " << ipa::csv::format_real(*report.c) << '\n';
    if (report.c && mu != 1.0 && report.c_statement)
      std::cout << "c with 2 mu in place of 2/mu  = " << ipa::csv::format_real(*report.c_statement) << '\n';
  }
  if (a.require_certified && !report.condition_pass) {
    std::cerr << "condition beta <= 1/mu < 1.5 alpha not certifiable\n";
    return kNotCertifiable;
  }
  return kOk;
}

struct OracleArgs {
  std::string op, measurement, set, out;
};

int run_oracle(const OracleArgs& a) {
  const auto op = load_operator(a.op);
  const auto g = load_measurement(a.measurement, op);
  const auto set = ipa::parse_constraint_set(a.set, op.domain_dim());
  const ipa::OracleResult r = ipa::brute_force_fopt(g, op, set);
  emit(std::cout, "residual", ipa::csv::format_real(r.residual));
  emit(std::cout, "support", '"' + r.support_or_index + '"');
  if (!a.out.empty()) ipa::csv::write_vector(a.out, r.f_opt.values());
  return kOk;
}

struct BenchArgs {
  std::string config, out;
  int threads = 1;
};

int run_bench(const BenchArgs& a) {
  const ipa::ExperimentConfig config = ipa::load_config(a.config);
  const auto rows = ipa::run_experiment(config, a.threads);
  const std::string path = a.out.empty() ? config.output_path.string() : a.out;
  if (path.empty()) {
    ipa::write_results_csv(std::cout, rows);
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ipa::InputError("cannot write " + path);
    ipa::write_results_csv(out, rows);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative projection solver for non-convexly constrained linear inverse problems"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Run the iterative projection algorithm");
  solve->add_option("--operator", solve_args.op, "Dense operator CSV (M x N)")->required();
  solve->add_option("--measurement", solve_args.measurement, "Measurement CSV (single column)")->required();
  solve->add_option("--set", solve_args.set, "ksparse:K | uos:MANIFEST | lowrank:RxC:r")->required();
  solve->add_option("--mu", solve_args.mu, "Step size or 'auto' (0.99/||T||^2)");
  solve->add_option("--eps", solve_args.eps, "Projection tolerance");
  solve->add_option("--max-iter", solve_args.max_iter, "Iteration cap");
  solve->add_option("--tol", solve_args.tol, "Residual tolerance");
  solve->add_option("--delta", solve_args.delta, "Accuracy parameter of the iteration budget");
  solve->add_option("--trace", solve_args.trace, "Write the iteration trace CSV here");
  solve->add_option("--reference", solve_args.reference, "Reference point in the set (CSV)");
  solve->add_option("--out", solve_args.out, "Write the final iterate here instead of stdout");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Bi-Lipschitz constants and the convergence condition");
  analyze->add_option("--operator", analyze_args.op, "Dense operator CSV (M x N)")->required();
  analyze->add_option("--set", analyze_args.set, "ksparse:K | uos:MANIFEST | lowrank:RxC:r")->required();
  analyze->add_option("--mode", analyze_args.mode, "exact | mc")->check(CLI::IsMember({"exact", "mc"}));
  analyze->add_option("--trials", analyze_args.trials, "Monte-Carlo pairs");
  analyze->add_option("--seed", analyze_args.seed, "Monte-Carlo seed");
  analyze->add_option("--mu", analyze_args.mu, "Step size or 'auto'");
  analyze->add_option("--format", analyze_args.format, "csv | text")->check(CLI::IsMember({"csv", "text"}));
  analyze->add_flag("--require-certified", analyze_args.require_certified,
                    "Exit with code 3 unless the condition holds");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive search for the optimal in-set estimate");
  oracle->add_option("--operator", oracle_args.op, "Dense operator CSV (M x N)")->required();
  oracle->add_option("--measurement", oracle_args.measurement, "Measurement CSV")->required();
  oracle->add_option("--set", oracle_args.set, "ksparse:K | uos:MANIFEST")->required();
  oracle->add_option("--out", oracle_args.out, "Write the optimal estimate here");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Run a seeded batch experiment from a config file");
  bench->add_option("--config", bench_args.config, "Experiment config")->required();
  bench->add_option("--out", bench_args.out, "Results CSV (defaults to the config's output)");
  bench->add_option("--threads", bench_args.threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*solve) return run_solve(solve_args);
    if (*analyze) return run_analyze(analyze_args);
    if (*oracle) return run_oracle(oracle_args);
    if (*bench) return run_bench(bench_args);
  } catch (const ipa::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const ipa::ConditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotCertifiable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
