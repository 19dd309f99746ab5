#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ipa/random.hpp"
#include "ipa/vector.hpp"

namespace ipa {

// Vectors with at most k non-zero entries.
struct KSparse {
  Index k;
};

// Union of the ranges of the listed N x d_i bases, each with orthonormal
// columns.
struct UnionOfSubspaces {
  std::vector<Eigen::MatrixXd> bases;
};

// rows x cols matrices of rank at most `rank`, vectorised column-major.
struct LowRank {
  Index rows;
  Index cols;
  Index rank;
};

// Outcome of an epsilon-projection: a point of the set and a certified bound
// on ||v - point||^2 - inf_{w in A} ||v - w||^2.
struct ProjectionResult {
  SignalVector point;
  double achieved_eps = 0.0;
  // Index of the winning subspace for unions of subspaces.
  std::optional<std::size_t> subspace;
};

// A non-convex constraint set A in R^N. Every family here is symmetric
// (A = -A), contains 0 and admits an exact projection.
//
// Ties in the projection are resolved deterministically, which fixes the
// selection among equally near points: lowest index first for equal
// magnitudes, first-listed subspace for equal distances, and the SVD's
// non-increasing order for equal singular values.
class ConstraintSet {
 public:
  using Kind = std::variant<KSparse, UnionOfSubspaces, LowRank>;

  static ConstraintSet k_sparse(Index ambient_dim, Index k);
  // Bases are validated orthonormal (Gram within 1e-10 of identity); they
  // are not orthonormalised here.
  static ConstraintSet union_of_subspaces(std::vector<Eigen::MatrixXd> bases);
  static ConstraintSet low_rank(Index rows, Index cols, Index rank);

  Index ambient_dim() const { return ambient_dim_; }
  const Kind& kind() const { return kind_; }

  ProjectionResult project(const SignalVector& v) const;
  bool contains(const SignalVector& v, double tol) const;

  // Canonical descriptor, e.g. "ksparse:2" or "lowrank:3x4:1".
  std::string describe() const;

 private:
  ConstraintSet(Index ambient_dim, Kind kind) : ambient_dim_(ambient_dim), kind_(std::move(kind)) {}

  Index ambient_dim_;
  Kind kind_;
};

// Keeps the k largest-magnitude entries, ties to the lowest index.
ProjectionResult project_ksparse(const SignalVector& v, Index k);
ProjectionResult project_union_subspaces(const SignalVector& v, const ConstraintSet& set);
ProjectionResult project_lowrank(const SignalVector& v, const ConstraintSet& set);

// Support size <= k (entries with magnitude above tol count as non-zero);
// distance to the nearest subspace <= tol; singular values past the rank <= tol.
bool membership_check(const SignalVector& v, const ConstraintSet& set, double tol);

// Random element of the set: ksparse draws a uniform support with standard
// normal entries; uos a uniform subspace with normal coefficients; low_rank
// the product of rows x r and r x cols standard normal factors.
SignalVector sample_from_set(const ConstraintSet& set, Rng& rng);

// Parses `ksparse:K`, `uos:PATH` or `lowrank:ROWSxCOLS:R`. The ambient
// dimension is needed for ksparse and is checked against the others.
//
// A uos manifest lists one basis CSV per line (relative paths resolve
// against the manifest's directory); '#' starts a comment line.
ConstraintSet parse_constraint_set(const std::string& descriptor, Index ambient_dim);
ConstraintSet load_subspace_manifest(const std::filesystem::path& manifest);

}  // namespace ipa
