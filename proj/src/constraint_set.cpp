#include "ipa/constraint_set.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "ipa/csv.hpp"

namespace ipa {

namespace {

// A point already in the set up to rounding is returned unchanged. This
// keeps projections idempotent bit for bit, since re-projecting through
// B B^T or an SVD would otherwise perturb the last few bits.
constexpr double kInSetFloor = 256.0 * std::numeric_limits<double>::epsilon();

constexpr double kOrthonormalTol = 1e-10;

const LowRank& as_low_rank(const ConstraintSet& set) {
  const auto* lr = std::get_if<LowRank>(&set.kind());
  if (lr == nullptr) throw InputError("constraint set is not low_rank");
  return *lr;
}

const UnionOfSubspaces& as_union(const ConstraintSet& set) {
  const auto* u = std::get_if<UnionOfSubspaces>(&set.kind());
  if (u == nullptr) throw InputError("constraint set is not union_of_subspaces");
  return *u;
}

void require_dim(const SignalVector& v, const ConstraintSet& set) {
  if (v.size() != set.ambient_dim()) {
    throw InputError("vector length " + std::to_string(v.size()) +
                     " does not match constraint set dimension " +
                     std::to_string(set.ambient_dim()));
  }
}

Index parse_count(std::string_view text, const std::string& descriptor) {
  Index value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || value < 0)
    throw InputError("bad count '" + std::string(text) + "' in set descriptor '" + descriptor + "'");
  return value;
}

}  // namespace

ConstraintSet ConstraintSet::k_sparse(Index ambient_dim, Index k) {
  if (ambient_dim <= 0) throw InputError("ksparse: ambient dimension must be positive");
  if (k < 0 || k > ambient_dim) {
    throw InputError("ksparse: K=" + std::to_string(k) + " outside [0, " +
                     std::to_string(ambient_dim) + "]");
  }
  return ConstraintSet(ambient_dim, KSparse{k});
}

ConstraintSet ConstraintSet::union_of_subspaces(std::vector<Eigen::MatrixXd> bases) {
  if (bases.empty()) throw InputError("uos: basis list is empty");
  const Index n = bases.front().rows();
  if (n <= 0) throw InputError("uos: ambient dimension must be positive");
  for (std::size_t i = 0; i < bases.size(); ++i) {
    const Eigen::MatrixXd& b = bases[i];
    const std::string which = "uos: basis " + std::to_string(i);
    if (b.rows() != n) throw InputError(which + " has " + std::to_string(b.rows()) + " rows, expected " + std::to_string(n));
    if (b.cols() < 1 || b.cols() > n) throw InputError(which + " has an invalid column count");
    if (!b.allFinite()) throw InputError(which + " has non-finite entries");
    const double defect =
        (b.transpose() * b - Eigen::MatrixXd::Identity(b.cols(), b.cols())).cwiseAbs().maxCoeff();
    if (defect > kOrthonormalTol) throw InputError(which + " does not have orthonormal columns");
  }
  return ConstraintSet(n, UnionOfSubspaces{std::move(bases)});
}

ConstraintSet ConstraintSet::low_rank(Index rows, Index cols, Index rank) {
  if (rows <= 0 || cols <= 0) throw InputError("lowrank: shape must be positive");
  if (rank < 0 || rank > std::min(rows, cols)) {
    throw InputError("lowrank: r=" + std::to_string(rank) + " outside [0, min(rows, cols)]");
  }
  return ConstraintSet(rows * cols, LowRank{rows, cols, rank});
}

ProjectionResult ConstraintSet::project(const SignalVector& v) const {
  require_dim(v, *this);
  if (const auto* s = std::get_if<KSparse>(&kind_)) return project_ksparse(v, s->k);
  if (std::holds_alternative<UnionOfSubspaces>(kind_)) return project_union_subspaces(v, *this);
  return project_lowrank(v, *this);
}

bool ConstraintSet::contains(const SignalVector& v, double tol) const {
  return membership_check(v, *this, tol);
}

std::string ConstraintSet::describe() const {
  if (const auto* s = std::get_if<KSparse>(&kind_)) return "ksparse:" + std::to_string(s->k);
  if (const auto* u = std::get_if<UnionOfSubspaces>(&kind_))
    return "uos:" + std::to_string(u->bases.size()) + "_subspaces";
  const auto& lr = std::get<LowRank>(kind_);
  return "lowrank:" + std::to_string(lr.rows) + "x" + std::to_string(lr.cols) + ":" +
         std::to_string(lr.rank);
}

ProjectionResult project_ksparse(const SignalVector& v, Index k) {
  const Index n = v.size();
  if (k < 0 || k > n) {
    throw InputError("ksparse: K=" + std::to_string(k) + " exceeds vector length " +
                     std::to_string(n));
  }
  if (k == n) return {v, 0.0, std::nullopt};

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Eigen::VectorXd& x = v.values();
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
    const double ma = std::abs(x[a]);
    const double mb = std::abs(x[b]);
    return ma > mb || (ma == mb && a < b);
  });

  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Index i = 0; i < k; ++i) {
    const Index j = order[static_cast<std::size_t>(i)];
    out[j] = x[j];
  }
  return {SignalVector(std::move(out)), 0.0, std::nullopt};
}

ProjectionResult project_union_subspaces(const SignalVector& v, const ConstraintSet& set) {
  const auto& bases = as_union(set).bases;
  require_dim(v, set);
  const Eigen::VectorXd& x = v.values();

  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_point;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    Eigen::VectorXd p = bases[i] * (bases[i].transpose() * x);
    const double dist = (x - p).squaredNorm();
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
      best_point = std::move(p);
    }
  }
  if (std::sqrt(best_dist) <= kInSetFloor * x.norm()) return {v, 0.0, best};
  return {SignalVector(std::move(best_point)), 0.0, best};
}

ProjectionResult project_lowrank(const SignalVector& v, const ConstraintSet& set) {
  const auto& lr = as_low_rank(set);
  require_dim(v, set);
  const Index full = std::min(lr.rows, lr.cols);
  if (lr.rank > full) throw InputError("lowrank: r exceeds min(rows, cols)");
  if (lr.rank == full) return {v, 0.0, std::nullopt};

  const Eigen::Map<const Eigen::MatrixXd> a(v.values().data(), lr.rows, lr.cols);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s[lr.rank] <= kInSetFloor * s[0]) return {v, 0.0, std::nullopt};

  const Index r = lr.rank;
  Eigen::MatrixXd approx = svd.matrixU().leftCols(r) * s.head(r).asDiagonal() *
                           svd.matrixV().leftCols(r).transpose();
  return {SignalVector(Eigen::Map<const Eigen::VectorXd>(approx.data(), approx.size())), 0.0,
          std::nullopt};
}

bool membership_check(const SignalVector& v, const ConstraintSet& set, double tol) {
  if (v.size() != set.ambient_dim()) return false;
  const Eigen::VectorXd& x = v.values();
  if (const auto* s = std::get_if<KSparse>(&set.kind())) {
    return (x.array().abs() > tol).count() <= s->k;
  }
  if (const auto* u = std::get_if<UnionOfSubspaces>(&set.kind())) {
    for (const auto& b : u->bases)
      if ((x - b * (b.transpose() * x)).norm() <= tol) return true;
    return false;
  }
  const auto& lr = std::get<LowRank>(set.kind());
  const Eigen::Map<const Eigen::MatrixXd> a(x.data(), lr.rows, lr.cols);
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  return (s.tail(s.size() - lr.rank).array() <= tol).all();
}

SignalVector sample_from_set(const ConstraintSet& set, Rng& rng) {
  const Index n = set.ambient_dim();
  if (const auto* s = std::get_if<KSparse>(&set.kind())) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Index i : rng.subset(n, s->k)) x[i] = rng.normal();
    return SignalVector(std::move(x));
  }
  if (const auto* u = std::get_if<UnionOfSubspaces>(&set.kind())) {
    const auto& b = u->bases[static_cast<std::size_t>(rng.below(u->bases.size()))];
    return SignalVector(b * rng.normal_vector(b.cols()));
  }
  const auto& lr = std::get<LowRank>(set.kind());
  const Eigen::MatrixXd left = rng.normal_matrix(lr.rows, lr.rank);
  const Eigen::MatrixXd right = rng.normal_matrix(lr.rank, lr.cols);
  const Eigen::MatrixXd product = left * right;
  return SignalVector(Eigen::Map<const Eigen::VectorXd>(product.data(), product.size()));
}

ConstraintSet load_subspace_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw InputError("cannot open subspace manifest " + manifest.string());
  std::vector<Eigen::MatrixXd> bases;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::filesystem::path entry = line.substr(first, last - first + 1);
    if (entry.is_relative()) entry = manifest.parent_path() / entry;
    bases.push_back(csv::read_matrix(entry));
  }
  return ConstraintSet::union_of_subspaces(std::move(bases));
}

ConstraintSet parse_constraint_set(const std::string& descriptor, Index ambient_dim) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos) throw InputError("bad set descriptor '" + descriptor + "'");
  const std::string family = descriptor.substr(0, colon);
  const std::string rest = descriptor.substr(colon + 1);

  if (family == "ksparse") return ConstraintSet::k_sparse(ambient_dim, parse_count(rest, descriptor));

  if (family == "uos") {
    ConstraintSet set = load_subspace_manifest(rest);
    if (set.ambient_dim() != ambient_dim) {
      throw InputError("uos manifest " + rest + " has dimension " +
                       std::to_string(set.ambient_dim()) + ", expected " +
                       std::to_string(ambient_dim));
    }
    return set;
  }

  if (family == "lowrank") {
    const auto x = rest.find('x');
    const auto c2 = rest.find(':');
    if (x == std::string::npos || c2 == std::string::npos || x > c2)
      throw InputError("lowrank descriptor must be lowrank:ROWSxCOLS:r, got '" + descriptor + "'");
    const Index rows = parse_count(std::string_view(rest).substr(0, x), descriptor);
    const Index cols = parse_count(std::string_view(rest).substr(x + 1, c2 - x - 1), descriptor);
    const Index rank = parse_count(std::string_view(rest).substr(c2 + 1), descriptor);
    ConstraintSet set = ConstraintSet::low_rank(rows, cols, rank);
    if (set.ambient_dim() != ambient_dim) {
      throw InputError("lowrank shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                       " does not match dimension " + std::to_string(ambient_dim));
    }
    return set;
  }

  throw InputError("unknown set family '" + family + "' in descriptor '" + descriptor + "'");
}

}  // namespace ipa
