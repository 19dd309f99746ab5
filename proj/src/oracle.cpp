#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "combinations.hpp"
#include "ipa/analysis.hpp"

namespace ipa {

namespace {

// Minimum-norm least-squares coefficients of min ||g - A c||.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& g) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a).solve(g);
}

std::string support_label(const std::vector<Index>& support) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < support.size(); ++i) out << (i ? "," : "") << support[i];
  out << '}';
  return out.str();
}

}  // namespace

OracleResult brute_force_fopt(const MeasurementVector& g, const LinearOperator& op,
                              const ConstraintSet& set, std::size_t cap) {
  if (g.size() != op.codomain_dim() || set.ambient_dim() != op.domain_dim())
    throw InputError("oracle: inconsistent dimensions");
  const Eigen::MatrixXd t = op.to_dense();
  const Eigen::VectorXd& y = g.values();
  const Index n = op.domain_dim();

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_f = Eigen::VectorXd::Zero(n);
  std::string best_label;

  if (const auto* s = std::get_if<KSparse>(&set.kind())) {
    const Index k = s->k;
    if (k == 0) return {SignalVector::zeros(n), y.norm(), "{}"};
    const std::size_t count = detail::binomial(n, k);
    if (count > cap) {
      throw EnumerationLimitError("oracle needs C(" + std::to_string(n) + ", " + std::to_string(k) +
                                  ") = " + std::to_string(count) + " supports, above the cap of " +
                                  std::to_string(cap));
    }
    Eigen::MatrixXd cols(t.rows(), k);
    detail::for_each_combination(n, k, [&](const std::vector<Index>& support) {
      for (Index j = 0; j < k; ++j) cols.col(j) = t.col(support[static_cast<std::size_t>(j)]);
      const Eigen::VectorXd coef = least_squares(cols, y);
      const double res = (y - cols * coef).norm();
      if (res < best) {
        best = res;
        best_f.setZero();
        for (Index j = 0; j < k; ++j) best_f[support[static_cast<std::size_t>(j)]] = coef[j];
        best_label = support_label(support);
      }
    });
  } else if (const auto* u = std::get_if<UnionOfSubspaces>(&set.kind())) {
    if (u->bases.size() > cap) throw EnumerationLimitError("oracle: too many subspaces");
    for (std::size_t i = 0; i < u->bases.size(); ++i) {
      const Eigen::MatrixXd& b = u->bases[i];
      const Eigen::MatrixXd tb = t * b;
      const Eigen::VectorXd coef = least_squares(tb, y);
      const double res = (y - tb * coef).norm();
      if (res < best) {
        best = res;
        best_f = b * coef;
        best_label = "subspace:" + std::to_string(i);
      }
    }
  } else {
    throw InputError("oracle: low_rank sets are not enumerable");
  }
  return {SignalVector(std::move(best_f)), best, std::move(best_label)};
}

}  // namespace ipa
