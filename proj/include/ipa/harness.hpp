#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ipa/analysis.hpp"
#include "ipa/constraint_set.hpp"
#include "ipa/linear_operator.hpp"
#include "ipa/solver.hpp"

namespace ipa {

struct OperatorSpec {
  enum class Kind {
    gaussian_normalized,  // i.i.d. N(0,1), each column scaled to unit norm
    gaussian_raw,         // i.i.d. N(0,1)
    identity,             // requires M = N
    diagonal,             // requires M = N
    from_file,            // dense CSV
    near_identity,        // [I 0] + sigma G / sqrt(M), G i.i.d. N(0,1)
  };
  Kind kind = Kind::gaussian_normalized;
  Eigen::VectorXd diagonal_values;
  std::filesystem::path path;
  double sigma = 0.0;
};

struct SignalSpec {
  enum class Kind {
    in_set_random,  // sample_from_set
    near_set,       // project(f0) + perturbation * u, u a unit vector off the local subspace
    from_file,
  };
  Kind kind = Kind::in_set_random;
  double perturbation = 0.0;
  std::filesystem::path path;
};

struct ProblemSpec {
  Index n = 32;
  Index m = 28;
  OperatorSpec op;
  std::string set_descriptor = "ksparse:2";
  SignalSpec signal;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Problem {
  LinearOperator op;
  ConstraintSet set;
  SignalVector f_true;
  MeasurementVector e;
  MeasurementVector g;
};

// Deterministic in the seed. A single Rng(seed) is consumed in the order
// operator, signal, noise; g = T f_true + e.
Problem generate_problem(const ProblemSpec& spec);

struct AnalysisMode {
  enum class Kind { exact, mc, none };
  Kind kind = Kind::exact;
  int trials = 0;
};

struct ExperimentConfig {
  ProblemSpec problem;
  SolverConfig solver;
  std::optional<double> mu;  // empty: 0.99 / ||T||^2
  std::size_t trials = 1;
  AnalysisMode analysis;
  std::filesystem::path output_path;
  // Stop certified noisy runs at n* (the point where the terminal bound is claimed).
  bool stop_at_budget = true;
};

// Flat `key = value` text, one key per line, '#' comments. Unknown keys are
// an error. See README for the schema.
ExperimentConfig parse_config(std::istream& in, const std::string& source);
ExperimentConfig load_config(const std::filesystem::path& path);

struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> mu;
  std::optional<bool> condition_pass;
  std::optional<std::size_t> n_star;
  std::optional<std::size_t> iters_used;
  std::optional<double> final_residual;
  std::optional<double> err_true;
  std::optional<double> theorem4_rhs;
  std::optional<bool> bound_satisfied;
  std::optional<double> oracle_residual;
  std::optional<double> lemma2_lhs;
  std::optional<double> lemma2_rhs;
  std::optional<Termination> termination;
  std::string status;
};

// One trial with seed = base seed + trial. Failures are recorded in the
// status column, never thrown.
TrialRow run_trial(const ExperimentConfig& config, std::size_t trial);

// Runs every trial, on `threads` workers. Rows come back in trial order and
// do not depend on the thread count.
std::vector<TrialRow> run_experiment(const ExperimentConfig& config, int threads = 1);

void write_results_csv(std::ostream& out, const std::vector<TrialRow>& rows);

}  // namespace ipa
