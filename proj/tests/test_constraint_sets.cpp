#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "ipa/constraint_set.hpp"
#include "ipa/csv.hpp"
#include "ipa/random.hpp"
#include "oracles.hpp"

using ipa::ConstraintSet;
using ipa::SignalVector;
using Eigen::Index;

namespace {

ConstraintSet axes_2d() {
  return ConstraintSet::union_of_subspaces({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)});
}

ConstraintSet random_uos(Index n, int count, Index dim, ipa::Rng& rng) {
  std::vector<Eigen::MatrixXd> bases;
  for (int i = 0; i < count; ++i) bases.push_back(oracle::random_orthonormal(n, dim, rng));
  return ConstraintSet::union_of_subspaces(std::move(bases));
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace

TEST(KSparse, KeepsLargestMagnitudes) {
  EXPECT_EQ(ipa::project_ksparse(SignalVector{3, 1, -4, 0}, 2).point, (SignalVector{3, 0, -4, 0}));
  EXPECT_EQ(ipa::project_ksparse(SignalVector{3, 1, -4, 0}, 4).point, (SignalVector{3, 1, -4, 0}));
}

TEST(KSparse, TiesGoToLowestIndex) {
  EXPECT_EQ(ipa::project_ksparse(SignalVector{1, 1, 1}, 2).point, (SignalVector{1, 1, 0}));
  EXPECT_EQ(ipa::project_ksparse(SignalVector{-2, 1, 2, 2}, 2).point, (SignalVector{-2, 0, 2, 0}));
}

TEST(KSparse, KAboveLengthIsInputError) {
  EXPECT_THROW(ipa::project_ksparse(SignalVector{1, 2}, 3), ipa::InputError);
  EXPECT_THROW(ConstraintSet::k_sparse(2, 3), ipa::InputError);
}

TEST(KSparse, ZeroKGivesZero) {
  const auto r = ipa::project_ksparse(SignalVector{1, -2}, 0);
  EXPECT_EQ(r.point, SignalVector::zeros(2));
  EXPECT_EQ(r.achieved_eps, 0.0);
}

TEST(Uos, DominantAxisAndFirstListedTie) {
  EXPECT_EQ(ipa::project_union_subspaces(SignalVector{3, 1}, axes_2d()).point, (SignalVector{3, 0}));
  const auto tie = ipa::project_union_subspaces(SignalVector{1, 1}, axes_2d());
  EXPECT_EQ(tie.point, (SignalVector{1, 0}));
  EXPECT_EQ(tie.subspace, std::size_t{0});
}

TEST(Uos, WholeSpaceIsIdentity) {
  const auto set = ConstraintSet::union_of_subspaces({Eigen::Matrix2d::Identity()});
  EXPECT_EQ(ipa::project_union_subspaces(SignalVector{5, -2}, set).point, (SignalVector{5, -2}));
}

TEST(Uos, ValidatesBases) {
  EXPECT_THROW(ConstraintSet::union_of_subspaces({}), ipa::InputError);
  EXPECT_THROW(ConstraintSet::union_of_subspaces({Eigen::Vector2d(1, 1)}), ipa::InputError);
  EXPECT_THROW(ConstraintSet::union_of_subspaces({Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)}),
               ipa::InputError);
}

TEST(Uos, WrongFamilyIsInputError) {
  EXPECT_THROW(ipa::project_union_subspaces(SignalVector{1, 2}, ConstraintSet::k_sparse(2, 1)),
               ipa::InputError);
}

TEST(LowRank, KeepsDominantSingularValue) {
  const Eigen::Matrix2d d = Eigen::Vector2d(3, 1).asDiagonal();
  const auto set = ConstraintSet::low_rank(2, 2, 1);
  const auto r = ipa::project_lowrank(SignalVector(vec(d)), set);
  EXPECT_NEAR((r.point.values() - Eigen::Vector4d(3, 0, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(LowRank, FullRankIsUnchanged) {
  const SignalVector v{1.5, -2, 0.25, 7};
  EXPECT_EQ(ipa::project_lowrank(v, ConstraintSet::low_rank(2, 2, 2)).point, v);
}

TEST(LowRank, MatchesIndependentSvd) {
  const Eigen::MatrixXd a = oracle::seeded_gaussian(3, 3, 17, false);
  const Eigen::MatrixXd expected = oracle::best_rank_r(a, 1);
  const auto r = ipa::project_lowrank(SignalVector(vec(a)), ConstraintSet::low_rank(3, 3, 1));
  const Eigen::Map<const Eigen::MatrixXd> got(r.point.values().data(), 3, 3);
  EXPECT_LE((got - expected).norm(), 1e-9);
}

TEST(LowRank, ColumnMajorVectorisation) {
  // 2x3 matrix [[1,2,3],[2,4,6]] is rank one; column-major gives 1,2,2,4,3,6.
  const SignalVector v{1, 2, 2, 4, 3, 6};
  EXPECT_TRUE(ipa::membership_check(v, ConstraintSet::low_rank(2, 3, 1), 1e-10));
  EXPECT_FALSE(ipa::membership_check(SignalVector{1, 2, 2, 4, 3, 7}, ConstraintSet::low_rank(2, 3, 1), 1e-10));
}

TEST(LowRank, RankAboveMinDimIsInputError) {
  EXPECT_THROW(ConstraintSet::low_rank(2, 3, 3), ipa::InputError);
}

TEST(Membership, Examples) {
  const auto ks = ConstraintSet::k_sparse(4, 2);
  EXPECT_TRUE(ipa::membership_check(SignalVector{3, 0, -4, 0}, ks, 0.0));
  EXPECT_FALSE(ipa::membership_check(SignalVector{3, 1, -4, 0}, ks, 0.0));
  EXPECT_TRUE(ipa::membership_check(SignalVector::zeros(4), ks, 0.0));
  EXPECT_TRUE(ipa::membership_check(SignalVector::zeros(2), axes_2d(), 0.0));
  EXPECT_TRUE(ipa::membership_check(SignalVector::zeros(6), ConstraintSet::low_rank(2, 3, 1), 0.0));
}

TEST(Descriptor, ParsesAllFamilies) {
  EXPECT_EQ(ipa::parse_constraint_set("ksparse:3", 8).describe(), "ksparse:3");
  const auto lr = ipa::parse_constraint_set("lowrank:3x4:2", 12);
  EXPECT_EQ(lr.describe(), "lowrank:3x4:2");
  EXPECT_EQ(lr.ambient_dim(), 12);

  const auto dir = std::filesystem::temp_directory_path() / "ipa_uos_manifest_test";
  std::filesystem::create_directories(dir);
  ipa::csv::write_matrix(dir / "b0.csv", Eigen::MatrixXd(Eigen::Vector3d(1, 0, 0)));
  Eigen::MatrixXd b1(3, 2);
  b1 << 0, 0, 1, 0, 0, 1;
  ipa::csv::write_matrix(dir / "b1.csv", b1);
  std::ofstream(dir / "set.txt") << "# two subspaces\nb0.csv\nb1.csv\n";
  const auto uos = ipa::parse_constraint_set("uos:" + (dir / "set.txt").string(), 3);
  EXPECT_EQ(std::get<ipa::UnionOfSubspaces>(uos.kind()).bases.size(), 2u);
  EXPECT_THROW(ipa::parse_constraint_set("uos:" + (dir / "set.txt").string(), 4), ipa::InputError);
}

TEST(Descriptor, RejectsMalformed) {
  EXPECT_THROW(ipa::parse_constraint_set("ksparse", 4), ipa::InputError);
  EXPECT_THROW(ipa::parse_constraint_set("ksparse:x", 4), ipa::InputError);
  EXPECT_THROW(ipa::parse_constraint_set("lowrank:2:1", 4), ipa::InputError);
  EXPECT_THROW(ipa::parse_constraint_set("lowrank:2x2:1", 5), ipa::InputError);
  EXPECT_THROW(ipa::parse_constraint_set("ball:1", 4), ipa::InputError);
}

// Exhaustive support enumeration never beats hard thresholding.
TEST(KSparseProperty, OptimalAgainstEnumeration) {
  ipa::Rng rng(100);
  for (int t = 0; t < 200; ++t) {
    const Index n = 4 + static_cast<Index>(rng.below(9));
    const Index k = static_cast<Index>(rng.below(4));
    const SignalVector v(rng.normal_vector(n));
    const double got = (v.values() - ipa::project_ksparse(v, k).point.values()).squaredNorm();
    EXPECT_LE(got, oracle::best_ksparse_distance_sq(v.values(), k) + 1e-12);
  }
}

TEST(ProjectionProperty, IdempotentNonExpansiveDeterministic) {
  ipa::Rng rng(7);
  const std::vector<ConstraintSet> sets = {ConstraintSet::k_sparse(9, 3), random_uos(9, 4, 2, rng),
                                           ConstraintSet::low_rank(3, 3, 1)};
  for (const auto& set : sets) {
    for (int t = 0; t < 20; ++t) {
      const SignalVector v(rng.normal_vector(9));
      const auto p = set.project(v);
      EXPECT_EQ(set.project(p.point).point, p.point) << set.describe();
      EXPECT_EQ(set.project(v).point, p.point) << set.describe();
      EXPECT_TRUE(set.contains(p.point, 1e-10)) << set.describe();
      EXPECT_TRUE(std::isfinite(p.achieved_eps) && p.achieved_eps >= 0.0);
      const double d = distance(v, p.point);
      for (int s = 0; s < 100; ++s) {
        const SignalVector w = ipa::sample_from_set(set, rng);
        EXPECT_LE(d, distance(v, w) + 1e-12) << set.describe();
      }
    }
  }
}

TEST(Sampler, DrawsLieInTheSet) {
  ipa::Rng rng(3);
  const std::vector<ConstraintSet> sets = {ConstraintSet::k_sparse(8, 2), random_uos(8, 3, 2, rng),
                                           ConstraintSet::low_rank(2, 4, 1)};
  for (const auto& set : sets)
    for (int t = 0; t < 20; ++t) EXPECT_TRUE(set.contains(ipa::sample_from_set(set, rng), 1e-10));
}
