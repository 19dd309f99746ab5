#include "ipa/linear_operator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ipa/random.hpp"

namespace ipa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_length(Index actual, Index expected, const char* what) {
  if (actual != expected) {
    throw InputError(std::string(what) + ": expected length " + std::to_string(expected) +
                     ", got " + std::to_string(actual));
  }
}

}  // namespace

LinearOperator::LinearOperator(Index domain_dim, Index codomain_dim,
                               std::variant<Dense, Diagonal, MatrixFree> rep)
    : domain_dim_(domain_dim), codomain_dim_(codomain_dim), rep_(std::move(rep)) {
  if (domain_dim_ <= 0 || codomain_dim_ <= 0)
    throw InputError("operator dimensions must be positive");
}

LinearOperator LinearOperator::dense(Eigen::MatrixXd matrix) {
  if (!matrix.allFinite()) throw InputError("operator matrix has non-finite entries");
  const Index n = matrix.cols();
  const Index m = matrix.rows();
  return LinearOperator(n, m, Dense{std::move(matrix)});
}

LinearOperator LinearOperator::diagonal(Eigen::VectorXd entries) {
  if (!entries.allFinite()) throw InputError("diagonal operator has non-finite entries");
  const Index n = entries.size();
  return LinearOperator(n, n, Diagonal{std::move(entries)});
}

LinearOperator LinearOperator::identity(Index n) {
  return diagonal(Eigen::VectorXd::Ones(n));
}

LinearOperator LinearOperator::matrix_free(Index domain_dim, Index codomain_dim, Map forward,
                                           Map adjoint) {
  if (!forward || !adjoint)
    throw InputError("matrix-free operator needs both forward and adjoint maps");
  return LinearOperator(domain_dim, codomain_dim,
                        MatrixFree{std::move(forward), std::move(adjoint)});
}

LinearOperator::Kind LinearOperator::kind() const {
  return std::visit(Overloaded{[](const Dense&) { return Kind::dense; },
                               [](const Diagonal&) { return Kind::diagonal; },
                               [](const MatrixFree&) { return Kind::matrix_free; }},
                    rep_);
}

Eigen::VectorXd LinearOperator::forward(const Eigen::VectorXd& x) const {
  require_length(x.size(), domain_dim_, "operator apply");
  Eigen::VectorXd y = std::visit(
      Overloaded{[&](const Dense& d) -> Eigen::VectorXd { return d.matrix * x; },
                 [&](const Diagonal& d) -> Eigen::VectorXd {
                   return d.entries.cwiseProduct(x);
                 },
                 [&](const MatrixFree& f) -> Eigen::VectorXd { return f.forward(x); }},
      rep_);
  require_length(y.size(), codomain_dim_, "matrix-free forward result");
  return y;
}

Eigen::VectorXd LinearOperator::adjoint(const Eigen::VectorXd& y) const {
  require_length(y.size(), codomain_dim_, "operator adjoint apply");
  Eigen::VectorXd x = std::visit(
      Overloaded{[&](const Dense& d) -> Eigen::VectorXd { return d.matrix.transpose() * y; },
                 [&](const Diagonal& d) -> Eigen::VectorXd {
                   return d.entries.cwiseProduct(y);
                 },
                 [&](const MatrixFree& f) -> Eigen::VectorXd { return f.adjoint(y); }},
      rep_);
  require_length(x.size(), domain_dim_, "matrix-free adjoint result");
  return x;
}

MeasurementVector LinearOperator::apply(const SignalVector& x) const {
  return MeasurementVector(forward(x.values()));
}

SignalVector LinearOperator::adjoint_apply(const MeasurementVector& y) const {
  return SignalVector(adjoint(y.values()));
}

Eigen::MatrixXd LinearOperator::to_dense() const {
  if (const auto* d = std::get_if<Dense>(&rep_)) return d->matrix;
  if (const auto* d = std::get_if<Diagonal>(&rep_)) return d->entries.asDiagonal();
  Eigen::MatrixXd m(codomain_dim_, domain_dim_);
  for (Index j = 0; j < domain_dim_; ++j) m.col(j) = forward(Eigen::VectorXd::Unit(domain_dim_, j));
  return m;
}

AdjointReport adjoint_consistency_check(const LinearOperator& op, int trials, double tol,
                                        std::uint64_t seed) {
  if (trials < 1) throw InputError("adjoint check needs at least one trial");
  if (!(tol > 0.0)) throw InputError("adjoint check tolerance must be positive");
  Rng rng(seed);
  AdjointReport report;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd x = rng.normal_vector(op.domain_dim());
    const Eigen::VectorXd y = rng.normal_vector(op.codomain_dim());
    const double lhs = op.forward(x).dot(y);
    const double rhs = x.dot(op.adjoint(y));
    const double defect =
        std::abs(lhs - rhs) / (std::abs(lhs) + std::numeric_limits<double>::min());
    report.max_relative_defect = std::max(report.max_relative_defect, defect);
  }
  report.pass = report.max_relative_defect <= tol;
  return report;
}

LinearityReport linearity_check(const LinearOperator& op, int trials, double tol,
                                std::uint64_t seed) {
  if (trials < 1) throw InputError("linearity check needs at least one trial");
  Rng rng(seed);
  LinearityReport report;
  for (int t = 0; t < trials; ++t) {
    const Eigen::VectorXd x = rng.normal_vector(op.domain_dim());
    const Eigen::VectorXd y = rng.normal_vector(op.domain_dim());
    const Eigen::VectorXd tx = op.forward(x);
    const Eigen::VectorXd ty = op.forward(y);
    const double defect = (op.forward(2.0 * x + 3.0 * y) - 2.0 * tx - 3.0 * ty).norm();
    const double scale = tx.norm() + ty.norm();
    const double relative =
        scale > 0.0 ? defect / scale : (defect > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    report.max_relative_defect = std::max(report.max_relative_defect, relative);
  }
  report.pass = report.max_relative_defect <= tol;
  return report;
}

double spectral_norm_sq_estimate(const LinearOperator& op, int iters, double tol) {
  if (iters < 1) throw InputError("power iteration needs at least one iteration");
  constexpr std::uint64_t kStartSeed = 0x9e3779b97f4a7c15ULL;
  constexpr double kStagnantStart = 1e-12;

  Rng rng(kStartSeed);
  Eigen::VectorXd v = rng.uniform_vector(op.domain_dim(), -1.0, 1.0).normalized();
  if (op.forward(v).squaredNorm() < kStagnantStart)
    v = rng.uniform_vector(op.domain_dim(), -1.0, 1.0).normalized();

  double estimate = 0.0;
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd tv = op.forward(v);
    const double rayleigh = tv.squaredNorm();
    const Eigen::VectorXd w = op.adjoint(tv);
    const double w_norm = w.norm();
    const bool settled = k > 0 && std::abs(rayleigh - estimate) <= tol * rayleigh;
    estimate = std::max(estimate, rayleigh);
    if (w_norm == 0.0 || settled) break;
    v = w / w_norm;
  }
  return estimate;
}

}  // namespace ipa
