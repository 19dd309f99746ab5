#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "combinations.hpp"
#include "ipa/analysis.hpp"
#include "ipa/random.hpp"

namespace ipa {

namespace {

struct Extremes {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(const Eigen::MatrixXd& gram) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();  // ascending
    lo = std::min(lo, ev[0]);
    hi = std::max(hi, ev[ev.size() - 1]);
  }
};

// Orthonormal basis of span(a, b).
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd joined(a.rows(), a.cols() + b.cols());
  joined << a, b;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(joined, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Index rank = 0;
  while (rank < s.size() && s[rank] > 1e-10 * s[0]) ++rank;
  return svd.matrixU().leftCols(rank);
}

}  // namespace

std::string to_string(BiLipschitzMethod m) {
  return m == BiLipschitzMethod::exact_enumeration ? "exact_enumeration" : "monte_carlo";
}

BiLipschitzEstimate exact_bilipschitz_sparse(const LinearOperator& op, Index k, std::size_t cap) {
  const Index n = op.domain_dim();
  if (k < 1 || k > n) throw InputError("exact constants need 1 <= K <= N");
  const Index width = std::min<Index>(2 * k, n);
  const std::size_t count = detail::binomial(n, width);
  if (count > cap) {
    throw EnumerationLimitError("exact enumeration needs C(" + std::to_string(n) + ", " +
                                std::to_string(width) + ") = " + std::to_string(count) +
                                " supports, above the cap of " + std::to_string(cap) +
                                "; use the monte_carlo mode");
  }

  const Eigen::MatrixXd t = op.to_dense();
  const Eigen::MatrixXd gram = t.transpose() * t;
  Extremes ext;
  Eigen::MatrixXd sub(width, width);
  detail::for_each_combination(n, width, [&](const std::vector<Index>& s) {
    for (Index i = 0; i < width; ++i)
      for (Index j = 0; j < width; ++j)
        sub(i, j) = gram(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(j)]);
    ext.add(sub);
  });
  return {ext.lo, ext.hi, BiLipschitzMethod::exact_enumeration, count};
}

BiLipschitzEstimate exact_bilipschitz_uos(const LinearOperator& op, const ConstraintSet& set,
                                          std::size_t cap) {
  const auto* u = std::get_if<UnionOfSubspaces>(&set.kind());
  if (u == nullptr) throw InputError("exact_bilipschitz_uos needs a union_of_subspaces set");
  if (set.ambient_dim() != op.domain_dim()) throw InputError("set and operator dimensions differ");
  const std::size_t m = u->bases.size();
  const std::size_t pairs = m * (m + 1) / 2;
  if (pairs > cap) {
    throw EnumerationLimitError(std::to_string(pairs) + " subspace pairs exceed the cap of " +
                                std::to_string(cap) + "; use the monte_carlo mode");
  }

  const Eigen::MatrixXd t = op.to_dense();
  Extremes ext;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const Eigen::MatrixXd q = i == j ? u->bases[i] : orthonormal_span(u->bases[i], u->bases[j]);
      const Eigen::MatrixXd tq = t * q;
      ext.add(tq.transpose() * tq);
    }
  }
  return {ext.lo, ext.hi, BiLipschitzMethod::exact_enumeration, pairs};
}

BiLipschitzEstimate exact_bilipschitz(const LinearOperator& op, const ConstraintSet& set,
                                      std::size_t cap) {
  if (set.ambient_dim() != op.domain_dim()) throw InputError("set and operator dimensions differ");
  if (const auto* s = std::get_if<KSparse>(&set.kind())) return exact_bilipschitz_sparse(op, s->k, cap);
  if (std::holds_alternative<UnionOfSubspaces>(set.kind())) return exact_bilipschitz_uos(op, set, cap);
  throw InputError("exact constants are not available for low_rank sets; use the monte_carlo mode");
}

BiLipschitzEstimate mc_bilipschitz(const LinearOperator& op, const ConstraintSet& set, int trials,
                                   std::uint64_t seed) {
  if (trials < 1) throw InputError("monte carlo constants need trials >= 1");
  if (set.ambient_dim() != op.domain_dim()) throw InputError("set and operator dimensions differ");
  Rng rng(seed);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (int t = 0; t < trials; ++t) {
    const SignalVector f1 = sample_from_set(set, rng);
    const SignalVector f2 = sample_from_set(set, rng);
    const Eigen::VectorXd sum = f1.values() + f2.values();
    const double denom = sum.squaredNorm();
    if (std::sqrt(denom) < 1e-12) continue;
    const double ratio = op.forward(sum).squaredNorm() / denom;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++used;
  }
  if (used == 0) throw InputError("every sampled pair was degenerate (||f1 + f2|| < 1e-12)");
  return {lo, hi, BiLipschitzMethod::monte_carlo, static_cast<std::size_t>(trials)};
}

ConditionCheck condition_check(const BiLipschitzEstimate& est, double mu) {
  const double inv_mu = 1.0 / mu;
  return {est.beta <= inv_mu && inv_mu < 1.5 * est.alpha,
          std::min(inv_mu - est.beta, 1.5 * est.alpha - inv_mu)};
}

}  // namespace ipa
