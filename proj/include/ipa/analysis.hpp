#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "ipa/constraint_set.hpp"
#include "ipa/linear_operator.hpp"
#include "ipa/solver.hpp"
#include "ipa/vector.hpp"

namespace ipa {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

enum class BiLipschitzMethod { exact_enumeration, monte_carlo };

std::string to_string(BiLipschitzMethod m);

// Constants alpha <= beta with
//   alpha ||f1 + f2||^2 <= ||T(f1 + f2)||^2 <= beta ||f1 + f2||^2
// for all f1, f2 in A. alpha <= 0 is a valid finding: T is then not
// bi-Lipschitz on A.
struct BiLipschitzEstimate {
  double alpha = 0.0;
  double beta = 0.0;
  BiLipschitzMethod method = BiLipschitzMethod::exact_enumeration;
  std::size_t trials_or_supports = 0;

  bool bilipschitz() const { return alpha > 0.0; }
};

// Sums of two K-sparse vectors are supported on at most 2K columns, and by
// interlacing the extremes over all supports of exactly 2K columns bound
// every smaller support. Enumerates all C(N, 2K) column supports (2K is
// capped at N) and takes the extreme eigenvalues of each Gram submatrix.
// Throws EnumerationLimitError above `cap` supports.
BiLipschitzEstimate exact_bilipschitz_sparse(const LinearOperator& op, Index k,
                                             std::size_t cap = kDefaultEnumerationCap);

// Extremes over all pairs i <= j of the Gram eigenvalues of T restricted to
// span(B_i, B_j).
BiLipschitzEstimate exact_bilipschitz_uos(const LinearOperator& op, const ConstraintSet& set,
                                          std::size_t cap = kDefaultEnumerationCap);

// Dispatches on the set family. low_rank is not enumerable.
BiLipschitzEstimate exact_bilipschitz(const LinearOperator& op, const ConstraintSet& set,
                                      std::size_t cap = kDefaultEnumerationCap);

// Min and max of ||T(f1+f2)||^2 / ||f1+f2||^2 over sampled pairs from the set
// (see sample_from_set). Pairs with ||f1+f2|| < 1e-12 are skipped. The result
// always lies inside the exact interval.
BiLipschitzEstimate mc_bilipschitz(const LinearOperator& op, const ConstraintSet& set, int trials,
                                   std::uint64_t seed);

struct ConditionCheck {
  bool pass = false;
  // min(1/mu - beta, 1.5 alpha - 1/mu)
  double margin = 0.0;
};

// beta <= 1/mu < 1.5 alpha
ConditionCheck condition_check(const BiLipschitzEstimate& est, double mu);

struct BoundInputs {
  double mu = 1.0;
  double delta = 0.1;       // accuracy parameter of n*
  double eps = 0.0;         // projection / optimality tolerance
  double proj_tol = 0.0;    // tolerance of the projection f_A of the true signal
  double etilde_norm = 0.0; // ||T(f - f_A) + e||
  double f_minus_fA_norm = 0.0;
  double fA_norm = 0.0;
};

struct BoundReport {
  bool condition_pass = false;
  double condition_margin = 0.0;

  // Filled only when the condition passes.
  std::optional<double> c;            // 4 / (3 alpha - 2/mu)
  std::optional<double> c_statement;  // 4 / (3 alpha - 2 mu), the variant that differs for mu != 1
  std::optional<std::size_t> n_star;  // empty when the budget is unbounded (no noise)
  std::optional<double> theorem4_rhs; // (sqrt(c) + delta)(||e~|| + sqrt(eps/2mu)) + ||f_A - f||

  // Filled whenever alpha > 0.
  std::optional<double> theorem2_rhs; // (2/sqrt a)||e~|| + ||f - f_A|| + sqrt(eps/a) + sqrt(proj_tol)
  std::optional<double> lemma2_rhs;   // (2||e~|| + sqrt(eps)) / sqrt(a)
};

BoundReport evaluate_bounds(const BiLipschitzEstimate& est, const BoundInputs& in);

struct OracleResult {
  SignalVector f_opt;
  double residual = 0.0;
  // Winning support, e.g. "{0,5}", or subspace index, e.g. "subspace:2".
  std::string support_or_index;
};

// Exhaustive minimiser of ||g - T f|| over the set: restricted least squares
// on every support of size K (lexicographic order) or every listed subspace.
// Rank-deficient restrictions use the minimum-norm solution. The first
// minimiser found wins ties.
OracleResult brute_force_fopt(const MeasurementVector& g, const LinearOperator& op,
                              const ConstraintSet& set, std::size_t cap = kDefaultEnumerationCap);

struct AuditReport {
  std::size_t iterations_checked = 0;
  std::size_t residual_violations = 0;
  std::size_t decay_violations = 0;
  // Largest (lhs - rhs) / scale seen; <= 0 when every inequality holds.
  double worst_residual = -std::numeric_limits<double>::infinity();
  double worst_decay = -std::numeric_limits<double>::infinity();
  double scale = 1.0;
  bool condition_pass = false;

  std::size_t violations() const { return residual_violations + decay_violations; }
};

// Re-evaluates, from the stored iterates, at every step n -> n+1:
//   residual decrease:  ||g-Tf^{n+1}||^2 - ||g-Tf^n||^2
//                         <= -<f_A - f^n, r> + ||f_A - f^n||^2 / mu + eps_n / mu
//   distance decay:     ||f_A - f^{n+1}||^2 <= 2(1/(mu a) - 1)||f_A - f^n||^2
//                         + (4/a)||e~||^2 + 2 eps_n / (mu a)
// with r = 2T*(g - Tf^n), e~ = g - T f_A and
// scale = max(1, ||g||^2, ||f_A||^2). A violation is lhs > rhs + slack * scale.
AuditReport audit_trace(const SolverTrace& trace, const BiLipschitzEstimate& est, double mu,
                        const EpsSchedule& eps_schedule, const SignalVector& reference,
                        const MeasurementVector& g, const LinearOperator& op, double slack = 1e-9);

struct NeighborhoodReport {
  double radius_sq = 0.0;  // c ||g - T f_opt||^2 + slack
  // First iteration from which every later record stays inside the radius.
  std::optional<std::size_t> entered_at;
  double final_dist_sq = 0.0;
};

// Checks that ||f_opt - f^n||^2 eventually stays below
// c ||T(f - f_opt) + e||^2 = c ||g - T f_opt||^2, plus slack * scale.
NeighborhoodReport neighborhood_check(const SolverTrace& trace, const SignalVector& f_opt, double c,
                                      const MeasurementVector& g, const LinearOperator& op,
                                      double slack = 1e-6);

}  // namespace ipa
