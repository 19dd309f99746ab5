#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include <Eigen/Core>

#include "ipa/vector.hpp"

namespace ipa {

// Bounded linear map T : R^N -> R^M together with its adjoint T*.
//
// Three representations are supported: a dense M x N matrix, a diagonal
// (M = N), and a matrix-free pair of callables. Matrix-free operators must
// supply their own adjoint; nothing is synthesised. Instances are immutable
// and application is pure, so an operator may be shared across threads.
class LinearOperator {
 public:
  using Map = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  enum class Kind { dense, diagonal, matrix_free };

  static LinearOperator dense(Eigen::MatrixXd matrix);
  static LinearOperator diagonal(Eigen::VectorXd entries);
  static LinearOperator identity(Index n);
  static LinearOperator matrix_free(Index domain_dim, Index codomain_dim, Map forward,
                                    Map adjoint);

  Index domain_dim() const { return domain_dim_; }
  Index codomain_dim() const { return codomain_dim_; }
  Kind kind() const;

  MeasurementVector apply(const SignalVector& x) const;
  SignalVector adjoint_apply(const MeasurementVector& y) const;

  // Unchecked-value versions used inside iterations, where a non-finite
  // result must be observed rather than rejected. Lengths are still checked.
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const;

  // Dense M x N matrix of the operator. Matrix-free operators are
  // materialised column by column.
  Eigen::MatrixXd to_dense() const;

 private:
  struct Dense {
    Eigen::MatrixXd matrix;
  };
  struct Diagonal {
    Eigen::VectorXd entries;
  };
  struct MatrixFree {
    Map forward;
    Map adjoint;
  };

  LinearOperator(Index domain_dim, Index codomain_dim,
                 std::variant<Dense, Diagonal, MatrixFree> rep);

  Index domain_dim_;
  Index codomain_dim_;
  std::variant<Dense, Diagonal, MatrixFree> rep_;
};

struct AdjointReport {
  double max_relative_defect = 0.0;
  bool pass = false;
};

// Seeded random probes of <Tx, y> = <x, T*y>. The defect of one probe is
// |<Tx,y> - <x,T*y>| / (|<Tx,y>| + DBL_MIN).
AdjointReport adjoint_consistency_check(const LinearOperator& op, int trials, double tol,
                                        std::uint64_t seed = 42);

struct LinearityReport {
  double max_relative_defect = 0.0;
  bool pass = false;
};

// Seeded probes of ||T(2x+3y) - 2Tx - 3Ty|| / (||Tx|| + ||Ty||).
LinearityReport linearity_check(const LinearOperator& op, int trials, double tol,
                                std::uint64_t seed = 42);

// Power iteration on T*T. Returns the Rayleigh quotient ||T v||^2 of the
// final normalised iterate, an estimate of ||T||^2 from below that is
// non-decreasing in the iteration count. Stops early once the relative change
// drops to tol. The start vector is uniform in [-1,1]^N from a fixed seed and
// is re-drawn once if its Rayleigh quotient is below 1e-12. The zero operator
// yields 0.
double spectral_norm_sq_estimate(const LinearOperator& op, int iters, double tol);

}  // namespace ipa
