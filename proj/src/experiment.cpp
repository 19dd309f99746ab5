#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

#include "combinations.hpp"
#include "ipa/csv.hpp"
#include "ipa/harness.hpp"

namespace ipa {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class ConfigReader {
 public:
  ConfigReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  void at_line(std::size_t line) { line_ = line; }

  double real(const std::string& text) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
      fail("expected a real number, got '" + text + "'");
    return v;
  }

  template <class Int>
  Int integer(const std::string& text) const {
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
      fail("expected a non-negative integer, got '" + text + "'");
    return v;
  }

  bool boolean(const std::string& text) const {
    const std::string t = lower(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    fail("expected true or false, got '" + text + "'");
  }

 private:
  std::string source_;
  std::size_t line_ = 0;
};

std::pair<std::string, std::string> split_once(const std::string& s, char sep) {
  const auto pos = s.find(sep);
  if (pos == std::string::npos) return {s, {}};
  return {s.substr(0, pos), s.substr(pos + 1)};
}

std::string fmt(const std::optional<double>& v) { return v ? csv::format_real(*v) : std::string(); }
std::string fmt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); }
std::string fmt(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : std::string(); }

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  ConfigReader rd(source);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    rd.at_line(++line_no);
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail("expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "n") {
      cfg.problem.n = rd.integer<Index>(value);
    } else if (key == "m") {
      cfg.problem.m = rd.integer<Index>(value);
    } else if (key == "operator") {
      const auto [kind, arg] = split_once(value, ':');
      auto& op = cfg.problem.op;
      if (kind == "gaussian_normalized") {
        op.kind = OperatorSpec::Kind::gaussian_normalized;
      } else if (kind == "gaussian_raw") {
        op.kind = OperatorSpec::Kind::gaussian_raw;
      } else if (kind == "identity") {
        op.kind = OperatorSpec::Kind::identity;
      } else if (kind == "near_identity") {
        op.kind = OperatorSpec::Kind::near_identity;
        op.sigma = rd.real(arg);
      } else if (kind == "file") {
        op.kind = OperatorSpec::Kind::from_file;
        op.path = arg;
      } else if (kind == "diagonal") {
        op.kind = OperatorSpec::Kind::diagonal;
        std::vector<double> vals;
        std::string rest = arg;
        while (!rest.empty()) {
          auto [head, tail] = split_once(rest, ',');
          vals.push_back(rd.real(trim(head)));
          if (rest.find(',') == std::string::npos) break;
          rest = tail;
        }
        op.diagonal_values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Index>(vals.size()));
      } else {
        rd.fail("unknown operator kind '" + kind + "'");
      }
    } else if (key == "set") {
      cfg.problem.set_descriptor = value;
    } else if (key == "signal") {
      const auto [kind, arg] = split_once(value, ':');
      auto& sig = cfg.problem.signal;
      if (kind == "in_set_random") {
        sig.kind = SignalSpec::Kind::in_set_random;
      } else if (kind == "near_set") {
        sig.kind = SignalSpec::Kind::near_set;
        sig.perturbation = rd.real(arg);
      } else if (kind == "file") {
        sig.kind = SignalSpec::Kind::from_file;
        sig.path = arg;
      } else {
        rd.fail("unknown signal kind '" + kind + "'");
      }
    } else if (key == "noise_sigma") {
      cfg.problem.noise_sigma = rd.real(value);
    } else if (key == "seed") {
      cfg.problem.seed = rd.integer<std::uint64_t>(value);
    } else if (key == "trials") {
      cfg.trials = rd.integer<std::size_t>(value);
    } else if (key == "analysis") {
      const auto [kind, arg] = split_once(value, ':');
      if (kind == "exact") {
        cfg.analysis = {AnalysisMode::Kind::exact, 0};
      } else if (kind == "mc") {
        cfg.analysis = {AnalysisMode::Kind::mc, rd.integer<int>(arg)};
      } else if (kind == "none") {
        cfg.analysis = {AnalysisMode::Kind::none, 0};
      } else {
        rd.fail("unknown analysis mode '" + kind + "'");
      }
    } else if (key == "mu") {
      if (value == "auto")
        cfg.mu.reset();
      else
        cfg.mu = rd.real(value);
    } else if (key == "eps") {
      const auto [kind, arg] = split_once(value, ':');
      if (kind == "geometric") {
        const auto [e0, rho] = split_once(arg, ':');
        cfg.solver.eps_schedule = EpsSchedule::geometric(rd.real(e0), rd.real(rho));
      } else if (kind == "constant") {
        cfg.solver.eps_schedule = EpsSchedule::constant(rd.real(arg));
      } else {
        cfg.solver.eps_schedule = EpsSchedule::constant(rd.real(value));
      }
    } else if (key == "max_iter") {
      cfg.solver.max_iter = rd.integer<std::size_t>(value);
    } else if (key == "residual_tol") {
      cfg.solver.residual_tol = rd.real(value);
    } else if (key == "stagnation_tol") {
      cfg.solver.stagnation_tol = rd.real(value);
    } else if (key == "delta") {
      cfg.solver.delta = rd.real(value);
    } else if (key == "stop_at_budget") {
      cfg.stop_at_budget = rd.boolean(value);
    } else if (key == "output") {
      cfg.output_path = value;
    } else {
      rd.fail("unknown key '" + key + "'");
    }
  }
  if (cfg.trials < 1) throw InputError(source + ": trials must be >= 1");
  if (cfg.analysis.kind == AnalysisMode::Kind::mc && cfg.analysis.trials < 1)
    throw InputError(source + ": analysis mc needs a trial count >= 1");
  cfg.problem.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  ExperimentConfig cfg = parse_config(in, path.string());
  const auto base = path.parent_path();
  auto resolve = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  resolve(cfg.problem.op.path);
  resolve(cfg.problem.signal.path);
  resolve(cfg.output_path);
  const std::string uos_prefix = "uos:";
  if (cfg.problem.set_descriptor.rfind(uos_prefix, 0) == 0) {
    std::filesystem::path manifest = cfg.problem.set_descriptor.substr(uos_prefix.size());
    resolve(manifest);
    cfg.problem.set_descriptor = uos_prefix + manifest.string();
  }
  return cfg;
}

TrialRow run_trial(const ExperimentConfig& config, std::size_t trial) {
  TrialRow row;
  row.trial = trial;
  row.seed = config.problem.seed + trial;
  try {
    ProblemSpec spec = config.problem;
    spec.seed = row.seed;
    const Problem p = generate_problem(spec);
    const double mu = config.mu ? *config.mu : default_step_size(p.op);
    row.mu = mu;

    const SignalVector f_a = p.set.project(p.f_true).point;
    const double etilde = (p.g.values() - p.op.forward(f_a.values())).norm();
    const double f_minus_fa = distance(p.f_true, f_a);

    std::optional<BiLipschitzEstimate> est;
    std::string analysis_status;
    try {
      if (config.analysis.kind == AnalysisMode::Kind::exact)
        est = exact_bilipschitz(p.op, p.set);
      else if (config.analysis.kind == AnalysisMode::Kind::mc)
        est = mc_bilipschitz(p.op, p.set, config.analysis.trials, row.seed);
    } catch (const InputError&) {
      analysis_status = "analysis_error";
    }

    std::optional<BoundReport> bounds;
    if (est) {
      row.alpha = est->alpha;
      row.beta = est->beta;
      bounds = evaluate_bounds(*est, BoundInputs{.mu = mu,
                                                 .delta = config.solver.delta,
                                                 .eps = config.solver.eps_schedule.sup(),
                                                 .proj_tol = 0.0,
                                                 .etilde_norm = etilde,
                                                 .f_minus_fA_norm = f_minus_fa,
                                                 .fA_norm = f_a.norm()});
      row.condition_pass = bounds->condition_pass;
    }
    const bool certified = bounds && bounds->condition_pass;

    SolverConfig solver = config.solver;
    solver.mu = mu;
    if (certified) {
      row.n_star = bounds->n_star;
      if (config.stop_at_budget && bounds->n_star) solver.iteration_budget = *bounds->n_star;
    }

    try {
      const SolverTrace trace = solve(p.g, p.op, p.set, solver, f_a);
      row.iters_used = trace.iterations();
      row.final_residual = trace.records.back().residual_norm;
      row.err_true = distance(p.f_true, trace.final_iterate);
      row.termination = trace.termination;
    } catch (const DivergenceError& e) {
      row.iters_used = e.iteration();
      row.status = "divergence";
      return row;
    }

    if (certified) {
      row.theorem4_rhs = bounds->theorem4_rhs;
      const double slack = 1e-9 * std::max(1.0, f_a.norm());
      row.bound_satisfied = *row.err_true <= *bounds->theorem4_rhs + slack;
    }

    const bool enumerable =
        std::holds_alternative<UnionOfSubspaces>(p.set.kind()) ||
        (std::holds_alternative<KSparse>(p.set.kind()) &&
         detail::binomial(p.set.ambient_dim(), std::get<KSparse>(p.set.kind()).k) <= kDefaultEnumerationCap);
    if (enumerable) {
      const OracleResult oracle = brute_force_fopt(p.g, p.op, p.set);
      row.oracle_residual = oracle.residual;
      if (certified) {
        row.lemma2_lhs = distance(f_a, oracle.f_opt);
        row.lemma2_rhs = bounds->lemma2_rhs;
      }
    }

    if (!analysis_status.empty())
      row.status = analysis_status;
    else if (!est)
      row.status = "uncertified";
    else if (!certified)
      row.status = "condition_fail";
    else
      row.status = "ok";
  } catch (const std::exception&) {
    row.status = "input_error";
  }
  return row;
}

std::vector<TrialRow> run_experiment(const ExperimentConfig& config, int threads) {
  std::vector<TrialRow> rows(config.trials);
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < rows.size(); t = next++) rows[t] = run_trial(config, t);
  };
  if (workers == 1) {
    work();
    return rows;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, rows.size()); ++w) pool.emplace_back(work);
  pool.clear();
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << "trial,seed,alpha,beta,mu,condition_pass,n_star,iters_used,final_residual,err_true,"
         "theorem4_rhs,bound_satisfied,oracle_residual,lemma2_lhs,lemma2_rhs,termination,status\n";
  for (const TrialRow& r : rows) {
    out << r.trial << ',' << r.seed << ',' << fmt(r.alpha) << ',' << fmt(r.beta) << ','
        << fmt(r.mu) << ',' << fmt(r.condition_pass) << ',' << fmt(r.n_star) << ','
        << fmt(r.iters_used) << ',' << fmt(r.final_residual) << ',' << fmt(r.err_true) << ','
        << fmt(r.theorem4_rhs) << ',' << fmt(r.bound_satisfied) << ','
        << fmt(r.oracle_residual) << ',' << fmt(r.lemma2_lhs) << ',' << fmt(r.lemma2_rhs) << ','
        << (r.termination ? to_string(*r.termination) : std::string()) << ',' << r.status << '\n';
  }
}

}  // namespace ipa
