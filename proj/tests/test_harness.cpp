#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ipa/csv.hpp"
#include "ipa/harness.hpp"

using ipa::ExperimentConfig;
using ipa::ProblemSpec;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return ipa::parse_config(in, "inline");
}

std::string csv_of(const std::vector<ipa::TrialRow>& rows) {
  std::ostringstream out;
  ipa::write_results_csv(out, rows);
  return out.str();
}

std::string bytes(const Eigen::VectorXd& v) {
  std::ostringstream out;
  ipa::csv::write_vector(out, v);
  return out.str();
}

ProblemSpec small_spec(std::uint64_t seed) {
  ProblemSpec spec;
  spec.n = 8;
  spec.m = 6;
  spec.noise_sigma = 0.1;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(GenerateProblem, ZeroNoiseGivesExactMeasurement) {
  auto spec = small_spec(3);
  spec.noise_sigma = 0.0;
  const auto p = ipa::generate_problem(spec);
  EXPECT_EQ(p.g, p.op.apply(p.f_true));
  EXPECT_EQ(p.e, ipa::MeasurementVector::zeros(6));
}

TEST(GenerateProblem, SeededDeterminism) {
  const auto a = ipa::generate_problem(small_spec(9));
  const auto b = ipa::generate_problem(small_spec(9));
  EXPECT_EQ(ipa::csv::format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(bytes(a.f_true.values()), bytes(b.f_true.values()));
  EXPECT_EQ(bytes(a.g.values()), bytes(b.g.values()));
  EXPECT_EQ(bytes(a.e.values()), bytes(b.e.values()));
  EXPECT_EQ(a.op.to_dense(), b.op.to_dense());
  EXPECT_NE(bytes(ipa::generate_problem(small_spec(10)).g.values()), bytes(a.g.values()));
}

TEST(GenerateProblem, InSetSignalAndNormalisedColumns) {
  const auto p = ipa::generate_problem(small_spec(1));
  EXPECT_TRUE(p.set.contains(p.f_true, 0.0));
  const Eigen::MatrixXd t = p.op.to_dense();
  for (Eigen::Index j = 0; j < t.cols(); ++j) EXPECT_NEAR(t.col(j).norm(), 1.0, 1e-14);
}

TEST(GenerateProblem, NearSetPerturbationHasKnownSize) {
  auto spec = small_spec(4);
  spec.signal.kind = ipa::SignalSpec::Kind::near_set;
  spec.signal.perturbation = 0.25;
  const auto p = ipa::generate_problem(spec);
  const auto fa = p.set.project(p.f_true).point;
  EXPECT_NEAR(distance(p.f_true, fa), 0.25, 1e-12);
}

TEST(GenerateProblem, FileOperatorShapeIsChecked) {
  const auto path = std::filesystem::temp_directory_path() / "ipa_harness_op.csv";
  ipa::csv::write_matrix(path, Eigen::MatrixXd::Ones(3, 4));
  auto spec = small_spec(0);
  spec.op.kind = ipa::OperatorSpec::Kind::from_file;
  spec.op.path = path;
  try {
    ipa::generate_problem(spec);
    FAIL();
  } catch (const ipa::InputError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
}

TEST(Config, ParsesEveryKey) {
  const auto cfg = parse(
      "# comment\n"
      "N = 12\nM = 10\noperator = near_identity:0.05\nset = ksparse:3\n"
      "signal = near_set:0.2\nnoise_sigma = 0.01\nseed = 77\ntrials = 4\n"
      "analysis = mc:500\nmu = 0.5\neps = geometric:0.1:0.5\nmax_iter = 50\n"
      "residual_tol = 1e-9\nstagnation_tol = 1e-14\ndelta = 0.2\nstop_at_budget = false\n"
      "output = out.csv\n");
  EXPECT_EQ(cfg.problem.n, 12);
  EXPECT_EQ(cfg.problem.m, 10);
  EXPECT_EQ(cfg.problem.op.kind, ipa::OperatorSpec::Kind::near_identity);
  EXPECT_EQ(cfg.problem.op.sigma, 0.05);
  EXPECT_EQ(cfg.problem.set_descriptor, "ksparse:3");
  EXPECT_EQ(cfg.problem.signal.kind, ipa::SignalSpec::Kind::near_set);
  EXPECT_EQ(cfg.problem.signal.perturbation, 0.2);
  EXPECT_EQ(cfg.problem.noise_sigma, 0.01);
  EXPECT_EQ(cfg.problem.seed, 77u);
  EXPECT_EQ(cfg.trials, 4u);
  EXPECT_EQ(cfg.analysis.kind, ipa::AnalysisMode::Kind::mc);
  EXPECT_EQ(cfg.analysis.trials, 500);
  EXPECT_EQ(cfg.mu, 0.5);
  EXPECT_TRUE(cfg.solver.eps_schedule.is_geometric());
  EXPECT_EQ(cfg.solver.max_iter, 50u);
  EXPECT_EQ(cfg.solver.residual_tol, 1e-9);
  EXPECT_EQ(cfg.solver.stagnation_tol, 1e-14);
  EXPECT_EQ(cfg.solver.delta, 0.2);
  EXPECT_FALSE(cfg.stop_at_budget);
  EXPECT_EQ(cfg.output_path, "out.csv");
}

TEST(Config, DefaultsAndErrors) {
  const auto cfg = parse("");
  EXPECT_EQ(cfg.problem.n, 32);
  EXPECT_EQ(cfg.problem.m, 28);
  EXPECT_FALSE(cfg.mu);
  EXPECT_THROW(parse("colour = red\n"), ipa::InputError);
  EXPECT_THROW(parse("n 5\n"), ipa::InputError);
  EXPECT_THROW(parse("trials = -1\n"), ipa::InputError);
  EXPECT_THROW(parse("trials = 0\n"), ipa::InputError);
  EXPECT_THROW(parse("analysis = sometimes\n"), ipa::InputError);
  try {
    parse("n = 4\nmu = fast\n");
    FAIL();
  } catch (const ipa::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("inline:2"), std::string::npos);
  }
}

TEST(Experiment, ConditionFailRowKeepsRunning) {
  auto cfg = parse("n = 8\nm = 6\nset = ksparse:1\nnoise_sigma = 0.01\ntrials = 2\n");
  const auto rows = ipa::run_experiment(cfg);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.status, "condition_fail");
    EXPECT_EQ(r.condition_pass, false);
    EXPECT_FALSE(r.theorem4_rhs);
    EXPECT_FALSE(r.bound_satisfied);
    EXPECT_FALSE(r.n_star);
    EXPECT_TRUE(r.iters_used);
  }
  EXPECT_EQ(rows[1].seed, rows[0].seed + 1);
}

TEST(Experiment, NoiselessCertifiedTrialsRecover) {
  auto cfg = parse("n = 16\nm = 16\noperator = near_identity:0.03\nset = ksparse:2\ntrials = 4\nseed = 5\n");
  for (const auto& r : ipa::run_experiment(cfg)) {
    ASSERT_EQ(r.status, "ok") << r.trial;
    EXPECT_TRUE(*r.bound_satisfied);
    EXPECT_LE(*r.err_true, 1e-6);
    EXPECT_LE(*r.oracle_residual, 1e-9);
  }
}

TEST(Experiment, DeterministicAndThreadInvariant) {
  auto cfg = parse("n = 10\nm = 10\noperator = near_identity:0.05\nset = ksparse:2\n"
                   "noise_sigma = 0.02\ntrials = 6\nseed = 40\n");
  const std::string one = csv_of(ipa::run_experiment(cfg, 1));
  EXPECT_EQ(csv_of(ipa::run_experiment(cfg, 1)), one);
  EXPECT_EQ(csv_of(ipa::run_experiment(cfg, 4)), one);
  EXPECT_EQ(one.substr(0, one.find('\n')),
            "trial,seed,alpha,beta,mu,condition_pass,n_star,iters_used,final_residual,err_true,"
            "theorem4_rhs,bound_satisfied,oracle_residual,lemma2_lhs,lemma2_rhs,termination,status");
  EXPECT_EQ(std::count(one.begin(), one.end(), '\n'), 7);
}

TEST(Csv, VectorRoundTripIsExact) {
  const auto p = ipa::generate_problem(small_spec(2));
  const auto path = std::filesystem::temp_directory_path() / "ipa_harness_g.csv";
  ipa::csv::write_vector(path, p.g.values());
  EXPECT_EQ(ipa::csv::read_vector(path), p.g.values());
}
