#include "ipa/solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "ipa/csv.hpp"

namespace ipa {

namespace {

constexpr double kDivergenceGrowth = 1e6;
constexpr int kStagnationWindow = 10;

}  // namespace

EpsSchedule EpsSchedule::constant(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InputError("eps must be finite and >= 0");
  return EpsSchedule(eps, 1.0, false);
}

EpsSchedule EpsSchedule::geometric(double eps0, double rho) {
  if (!(eps0 >= 0.0) || !std::isfinite(eps0)) throw InputError("eps0 must be finite and >= 0");
  if (!(rho > 0.0 && rho < 1.0)) throw InputError("geometric eps schedule needs rho in (0,1)");
  return EpsSchedule(eps0, rho, true);
}

double EpsSchedule::at(std::size_t n) const {
  return geometric_ ? eps0_ * std::pow(rho_, static_cast<double>(n)) : eps0_;
}

void SolverConfig::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw InputError("mu must be finite and positive");
  if (!(residual_tol >= 0.0)) throw InputError("residual_tol must be >= 0");
  if (!(stagnation_tol >= 0.0)) throw InputError("stagnation_tol must be >= 0");
  if (!(delta > 0.0)) throw InputError("delta must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iter: return "max_iter";
    case Termination::iteration_budget: return "iteration_budget";
    case Termination::stagnated: return "stagnated";
  }
  return "unknown";
}

StepResult ipa_step(const SignalVector& f_n, const MeasurementVector& g, const LinearOperator& op,
                    const ConstraintSet& set, double mu, double eps_n, std::size_t iter,
                    const std::optional<SignalVector>& reference) {
  if (f_n.size() != op.domain_dim() || g.size() != op.codomain_dim() ||
      set.ambient_dim() != op.domain_dim()) {
    throw InputError("ipa_step: inconsistent dimensions");
  }
  const Eigen::VectorXd& f = f_n.values();
  const Eigen::VectorXd residual = g.values() - op.forward(f);
  const Eigen::VectorXd grad = op.adjoint(residual);
  const Eigen::VectorXd candidate = f + mu * grad;
  if (!candidate.allFinite()) {
    throw DivergenceError(iter + 1, "iteration " + std::to_string(iter + 1) +
                                        " produced a non-finite iterate; mu is likely too large");
  }

  ProjectionResult projected = set.project(SignalVector(candidate));
  if (projected.achieved_eps > eps_n) {
    throw InputError("projection achieved eps " + csv::format_real(projected.achieved_eps) +
                     " above the scheduled " + csv::format_real(eps_n));
  }

  IPAStepRecord record{
      .iter = iter,
      .iterate = f_n,
      .residual_norm = residual.norm(),
      .eps_used = eps_n,
      .gradient_direction = SignalVector(2.0 * grad),
      .dist_to_reference = std::nullopt,
  };
  if (reference) record.dist_to_reference = distance(*reference, f_n);
  return {std::move(projected.point), std::move(record)};
}

SolverTrace solve(const MeasurementVector& g, const LinearOperator& op, const ConstraintSet& set,
                  const SolverConfig& config, const std::optional<SignalVector>& reference) {
  config.validate();
  if (reference && reference->size() != op.domain_dim())
    throw InputError("reference length does not match the operator domain");

  const double initial_residual = g.norm();
  SignalVector f = SignalVector::zeros(op.domain_dim());
  std::vector<IPAStepRecord> records;
  int stagnant_run = 0;

  for (std::size_t n = 0;; ++n) {
    auto [next, record] =
        ipa_step(f, g, op, set, config.mu, config.eps_schedule.at(n), n, reference);
    const double res = record.residual_norm;
    const double prev_res = records.empty() ? res : records.back().residual_norm;
    records.push_back(std::move(record));

    if (!std::isfinite(res) || (initial_residual > 0.0 && res > kDivergenceGrowth * initial_residual)) {
      throw DivergenceError(n, "iteration " + std::to_string(n) + ": residual " +
                                   csv::format_real(res) + " exceeds 1e6 times the initial residual " +
                                   csv::format_real(initial_residual) + "; mu is likely too large");
    }

    std::optional<Termination> stop;
    if (res <= config.residual_tol) {
      stop = Termination::converged;
    } else if (config.iteration_budget && n >= *config.iteration_budget) {
      stop = Termination::iteration_budget;
    } else {
      if (n > 0 && std::abs(res - prev_res) <= config.stagnation_tol)
        ++stagnant_run;
      else
        stagnant_run = 0;
      if (stagnant_run >= kStagnationWindow)
        stop = Termination::stagnated;
      else if (n >= config.max_iter)
        stop = Termination::max_iter;
    }

    if (stop) return SolverTrace{std::move(records), std::move(f), *stop};
    f = std::move(next);
  }
}

double default_step_size(const LinearOperator& op) {
  const double beta_hat = spectral_norm_sq_estimate(op, 1000, 1e-12);
  if (!(beta_hat > 0.0)) throw InputError("cannot derive a step size from the zero operator");
  return 0.99 / beta_hat;
}

std::size_t iteration_budget(double alpha, double mu, double delta, double etilde_norm, double eps,
                             double fA_norm) {
  if (!(alpha > 0.0) || !(mu > 0.0)) throw ConditionError("condition beta <= 1/mu < 1.5 alpha not certifiable");
  const double factor = 2.0 / (mu * alpha) - 2.0;
  if (!(factor < 1.0)) throw ConditionError("condition beta <= 1/mu < 1.5 alpha not certifiable");
  if (!(fA_norm > 0.0)) throw InputError("iteration budget needs ||f_A|| > 0");
  if (!(delta > 0.0)) throw InputError("iteration budget needs delta > 0");
  const double noise = etilde_norm + std::sqrt(eps / (2.0 * mu));
  if (!(noise > 0.0))
    throw InputError("iteration budget is unbounded without noise or projection slack");

  const double ratio = delta * noise / fA_norm;
  if (ratio >= 1.0) return 0;
  if (factor <= 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(2.0 * std::log(ratio) / std::log(factor)));
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace) {
  out << "iter,residual_norm,eps_used,dist_to_reference,decay_ratio\n";
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IPAStepRecord& r = trace.records[i];
    out << r.iter << ',' << csv::format_real(r.residual_norm) << ',' << csv::format_real(r.eps_used)
        << ',';
    if (r.dist_to_reference) out << csv::format_real(*r.dist_to_reference);
    out << ',';
    if (i > 0) {
      const IPAStepRecord& p = trace.records[i - 1];
      const double prev = p.dist_to_reference ? *p.dist_to_reference : p.residual_norm;
      const double cur = r.dist_to_reference ? *r.dist_to_reference : r.residual_norm;
      if (prev > 0.0) out << csv::format_real((cur * cur) / (prev * prev));
    }
    out << '\n';
  }
  out << "# termination=" << to_string(trace.termination) << '\n';
}

}  // namespace ipa
