#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ipa/constraint_set.hpp"
#include "ipa/linear_operator.hpp"
#include "ipa/vector.hpp"

namespace ipa {

// Projection tolerance per iteration: eps_n = eps0 (constant) or
// eps_n = eps0 * rho^n (geometric, rho in (0,1), so eps_n -> 0).
class EpsSchedule {
 public:
  static EpsSchedule constant(double eps);
  static EpsSchedule geometric(double eps0, double rho);

  double at(std::size_t n) const;
  // sup_n eps_n, the eps that enters the iteration budget and error bound.
  double sup() const { return eps0_; }
  bool is_geometric() const { return geometric_; }
  double rho() const { return rho_; }

 private:
  EpsSchedule(double eps0, double rho, bool geometric) : eps0_(eps0), rho_(rho), geometric_(geometric) {}

  double eps0_;
  double rho_;
  bool geometric_;
};

struct SolverConfig {
  double mu = 1.0;
  EpsSchedule eps_schedule = EpsSchedule::constant(0.0);
  std::size_t max_iter = 500;
  double residual_tol = 1e-12;
  // Exit after 10 consecutive residual changes within this tolerance
  // (with 0, only an exact fixed point of the residual stops the run).
  double stagnation_tol = 0.0;
  // Accuracy parameter of the iteration budget n*. Distinct from the
  // projection tolerance of f_A.
  double delta = 0.1;
  // When set, stop once this many iterations have been taken (usually n*).
  std::optional<std::size_t> iteration_budget;

  void validate() const;
};

struct IPAStepRecord {
  std::size_t iter = 0;
  SignalVector iterate;             // f^n
  double residual_norm = 0.0;       // ||g - T f^n||
  double eps_used = 0.0;            // eps_n
  SignalVector gradient_direction;  // r = 2 T*(g - T f^n)
  std::optional<double> dist_to_reference;  // ||f_A - f^n||
};

enum class Termination { converged, max_iter, iteration_budget, stagnated };

std::string to_string(Termination t);

struct SolverTrace {
  std::vector<IPAStepRecord> records;
  SignalVector final_iterate;
  Termination termination = Termination::max_iter;

  // Number of update steps taken to reach final_iterate.
  std::size_t iterations() const { return records.back().iter; }
};

struct StepResult {
  SignalVector next;
  IPAStepRecord record;
};

// One update f^{n+1} = P_A^{eps_n}(f^n + mu T*(g - T f^n)). The record
// describes f^n. Throws DivergenceError if the update is non-finite.
StepResult ipa_step(const SignalVector& f_n, const MeasurementVector& g, const LinearOperator& op,
                    const ConstraintSet& set, double mu, double eps_n, std::size_t iter = 0,
                    const std::optional<SignalVector>& reference = std::nullopt);

// Runs the iteration from f^0 = 0. Exit checks after every record, in order:
// divergence (non-finite iterate, or residual above 1e6 times ||g||),
// residual_tol, iteration_budget, stagnation, max_iter.
SolverTrace solve(const MeasurementVector& g, const LinearOperator& op, const ConstraintSet& set,
                  const SolverConfig& config,
                  const std::optional<SignalVector>& reference = std::nullopt);

// mu = 0.99 / ||T||^2 estimated by power iteration, so that 1/mu bounds the
// set-restricted beta.
double default_step_size(const LinearOperator& op);

// Iteration budget
//   n* = ceil(2 ln(delta (||e~|| + sqrt(eps / 2mu)) / ||f_A||) / ln(2/(mu alpha) - 2))
// Returns 0 when the log argument is >= 1. When alpha = 1/mu the contraction
// factor is 0 and one step suffices, so 1 is returned.
// Throws ConditionError unless 2/(mu alpha) - 2 < 1, and InputError for
// fA_norm <= 0 or a zero noise level (the budget would be unbounded).
std::size_t iteration_budget(double alpha, double mu, double delta, double etilde_norm, double eps,
                             double fA_norm);

// Trace CSV: header, one row per record, then "# termination=<reason>".
// decay_ratio is ||f_A - f^n||^2 / ||f_A - f^{n-1}||^2 with a reference,
// otherwise the ratio of squared residuals; empty at iter 0 or when the
// previous value is zero.
void write_trace_csv(std::ostream& out, const SolverTrace& trace);

}  // namespace ipa
