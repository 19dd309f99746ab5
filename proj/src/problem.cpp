#include <Eigen/SVD>

#include "ipa/csv.hpp"
#include "ipa/harness.hpp"
#include "ipa/random.hpp"

namespace ipa {

namespace {

LinearOperator make_operator(const ProblemSpec& spec, Rng& rng) {
  const OperatorSpec& o = spec.op;
  switch (o.kind) {
    case OperatorSpec::Kind::gaussian_normalized: {
      Eigen::MatrixXd t = rng.normal_matrix(spec.m, spec.n);
      for (Index j = 0; j < t.cols(); ++j) t.col(j) /= t.col(j).norm();
      return LinearOperator::dense(std::move(t));
    }
    case OperatorSpec::Kind::gaussian_raw:
      return LinearOperator::dense(rng.normal_matrix(spec.m, spec.n));
    case OperatorSpec::Kind::identity:
      return LinearOperator::identity(spec.n);
    case OperatorSpec::Kind::diagonal:
      return LinearOperator::diagonal(o.diagonal_values);
    case OperatorSpec::Kind::from_file: {
      Eigen::MatrixXd t = csv::read_matrix(o.path);
      if (t.rows() != spec.m || t.cols() != spec.n) {
        throw InputError(o.path.string() + ": operator is " + std::to_string(t.rows()) + "x" +
                         std::to_string(t.cols()) + ", expected " + std::to_string(spec.m) + "x" +
                         std::to_string(spec.n));
      }
      return LinearOperator::dense(std::move(t));
    }
    case OperatorSpec::Kind::near_identity: {
      Eigen::MatrixXd t = Eigen::MatrixXd::Identity(spec.m, spec.n);
      t += (o.sigma / std::sqrt(static_cast<double>(spec.m))) * rng.normal_matrix(spec.m, spec.n);
      return LinearOperator::dense(std::move(t));
    }
  }
  throw InputError("unknown operator kind");
}

// Unit vector orthogonal to the piece of the set that contains `base`.
Eigen::VectorXd off_set_direction(const ConstraintSet& set, const ProjectionResult& base, Rng& rng) {
  const Index n = set.ambient_dim();
  Eigen::VectorXd z = rng.normal_vector(n);
  const Eigen::VectorXd& b = base.point.values();
  if (std::holds_alternative<KSparse>(set.kind())) {
    for (Index i = 0; i < n; ++i)
      if (b[i] != 0.0) z[i] = 0.0;
  } else if (const auto* u = std::get_if<UnionOfSubspaces>(&set.kind())) {
    const Eigen::MatrixXd& basis = u->bases[base.subspace.value_or(0)];
    z -= basis * (basis.transpose() * z);
  } else {
    const auto& lr = std::get<LowRank>(set.kind());
    const Eigen::Map<const Eigen::MatrixXd> a(b.data(), lr.rows, lr.cols);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd col_basis = svd.matrixU().leftCols(lr.rank);
    const Eigen::MatrixXd row_basis = svd.matrixV().leftCols(lr.rank);
    Eigen::Map<Eigen::MatrixXd> zm(z.data(), lr.rows, lr.cols);
    const Eigen::MatrixXd left = zm - col_basis * (col_basis.transpose() * zm);
    zm = left - (left * row_basis) * row_basis.transpose();
  }
  const double norm = z.norm();
  return norm > 0.0 ? Eigen::VectorXd(z / norm) : Eigen::VectorXd::Zero(n);
}

SignalVector make_signal(const ProblemSpec& spec, const ConstraintSet& set, Rng& rng) {
  switch (spec.signal.kind) {
    case SignalSpec::Kind::in_set_random:
      return sample_from_set(set, rng);
    case SignalSpec::Kind::near_set: {
      const ProjectionResult base = set.project(SignalVector(rng.normal_vector(spec.n)));
      const Eigen::VectorXd u = off_set_direction(set, base, rng);
      return SignalVector(base.point.values() + spec.signal.perturbation * u);
    }
    case SignalSpec::Kind::from_file: {
      Eigen::VectorXd f = csv::read_vector(spec.signal.path);
      if (f.size() != spec.n) {
        throw InputError(spec.signal.path.string() + ": signal has length " +
                         std::to_string(f.size()) + ", expected " + std::to_string(spec.n));
      }
      return SignalVector(std::move(f));
    }
  }
  throw InputError("unknown signal kind");
}

}  // namespace

void ProblemSpec::validate() const {
  if (n < 1 || m < 1) throw InputError("problem dimensions N and M must be >= 1");
  if (!(noise_sigma >= 0.0)) throw InputError("noise_sigma must be >= 0");
  if ((op.kind == OperatorSpec::Kind::identity || op.kind == OperatorSpec::Kind::diagonal) && m != n)
    throw InputError("identity and diagonal operators need M = N");
  if (op.kind == OperatorSpec::Kind::diagonal && op.diagonal_values.size() != n)
    throw InputError("diagonal operator needs N values, got " + std::to_string(op.diagonal_values.size()));
  if (signal.kind == SignalSpec::Kind::near_set && !(signal.perturbation >= 0.0))
    throw InputError("near_set perturbation must be >= 0");
}

Problem generate_problem(const ProblemSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  LinearOperator op = make_operator(spec, rng);
  ConstraintSet set = parse_constraint_set(spec.set_descriptor, spec.n);
  SignalVector f = make_signal(spec, set, rng);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(spec.m);
  if (spec.noise_sigma > 0.0) e = spec.noise_sigma * rng.normal_vector(spec.m);
  Eigen::VectorXd g = op.forward(f.values()) + e;
  return Problem{std::move(op), std::move(set), std::move(f), MeasurementVector(std::move(e)),
                 MeasurementVector(std::move(g))};
}

}  // namespace ipa
