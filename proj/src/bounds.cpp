#include <cmath>

#include "ipa/analysis.hpp"

namespace ipa {

BoundReport evaluate_bounds(const BiLipschitzEstimate& est, const BoundInputs& in) {
  BoundReport report;
  const ConditionCheck check = condition_check(est, in.mu);
  report.condition_pass = check.pass;
  report.condition_margin = check.margin;

  const double a = est.alpha;
  if (a > 0.0) {
    const double sa = std::sqrt(a);
    report.theorem2_rhs = 2.0 / sa * in.etilde_norm + in.f_minus_fA_norm +
                          std::sqrt(in.eps) / sa + std::sqrt(in.proj_tol);
    report.lemma2_rhs = (2.0 * in.etilde_norm + std::sqrt(in.eps)) / sa;
  }
  if (!check.pass) return report;

  const double c = 4.0 / (3.0 * a - 2.0 / in.mu);
  report.c = c;
  if (3.0 * a - 2.0 * in.mu > 0.0) report.c_statement = 4.0 / (3.0 * a - 2.0 * in.mu);

  const double noise = in.etilde_norm + std::sqrt(in.eps / (2.0 * in.mu));
  report.theorem4_rhs = (std::sqrt(c) + in.delta) * noise + in.f_minus_fA_norm;
  if (in.fA_norm <= 0.0)
    report.n_star = 0;
  else if (noise > 0.0)
    report.n_star = iteration_budget(a, in.mu, in.delta, in.etilde_norm, in.eps, in.fA_norm);
  return report;
}

}  // namespace ipa
