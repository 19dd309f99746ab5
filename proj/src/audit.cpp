#include <algorithm>
#include <cmath>

#include "ipa/analysis.hpp"

namespace ipa {

AuditReport audit_trace(const SolverTrace& trace, const BiLipschitzEstimate& est, double mu,
                        const EpsSchedule& eps_schedule, const SignalVector& reference,
                        const MeasurementVector& g, const LinearOperator& op, double slack) {
  AuditReport report;
  report.condition_pass = condition_check(est, mu).pass;
  const Eigen::VectorXd& fa = reference.values();
  const Eigen::VectorXd& y = g.values();
  report.scale = std::max({1.0, y.squaredNorm(), fa.squaredNorm()});
  const double tolerance = slack * report.scale;

  const double etilde_sq = (y - op.forward(fa)).squaredNorm();
  const double alpha = est.alpha;
  const double decay = 2.0 * (1.0 / (mu * alpha) - 1.0);

  // Iterates f^0 .. f^last as stored in the records.
  std::vector<const Eigen::VectorXd*> iterates;
  for (const auto& r : trace.records) iterates.push_back(&r.iterate.values());

  for (std::size_t n = 0; n + 1 < iterates.size(); ++n) {
    const Eigen::VectorXd& f = *iterates[n];
    const Eigen::VectorXd& next = *iterates[n + 1];
    const double eps_n = eps_schedule.at(trace.records[n].iter);

    const Eigen::VectorXd res_n = y - op.forward(f);
    const Eigen::VectorXd r = 2.0 * op.adjoint(res_n);
    const double dist_sq = (fa - f).squaredNorm();

    const double step_lhs = (y - op.forward(next)).squaredNorm() - res_n.squaredNorm();
    const double step_rhs = -(fa - f).dot(r) + dist_sq / mu + eps_n / mu;
    const double step_gap = (step_lhs - step_rhs) / report.scale;
    report.worst_residual = std::max(report.worst_residual, step_gap);
    if (step_lhs > step_rhs + tolerance) ++report.residual_violations;

    const double decay_lhs = (fa - next).squaredNorm();
    const double decay_rhs =
        decay * dist_sq + 4.0 / alpha * etilde_sq + 2.0 * eps_n / (mu * alpha);
    const double decay_gap = (decay_lhs - decay_rhs) / report.scale;
    report.worst_decay = std::max(report.worst_decay, decay_gap);
    if (!(decay_lhs <= decay_rhs + tolerance)) ++report.decay_violations;

    ++report.iterations_checked;
  }
  return report;
}

NeighborhoodReport neighborhood_check(const SolverTrace& trace, const SignalVector& f_opt, double c,
                                      const MeasurementVector& g, const LinearOperator& op,
                                      double slack) {
  const Eigen::VectorXd& fo = f_opt.values();
  const double scale = std::max({1.0, g.squared_norm(), fo.squaredNorm()});
  NeighborhoodReport report;
  report.radius_sq = c * (g.values() - op.forward(fo)).squaredNorm() + slack * scale;

  std::optional<std::size_t> entered;
  for (const auto& rec : trace.records) {
    const double d = (fo - rec.iterate.values()).squaredNorm();
    report.final_dist_sq = d;
    if (d <= report.radius_sq) {
      if (!entered) entered = rec.iter;
    } else {
      entered.reset();
    }
  }
  report.entered_at = entered;
  return report;
}

}  // namespace ipa
