#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "lrpgd/linalg.hpp"
#include "lrpgd/random.hpp"

using namespace lrpgd;

TEST(SplitSeed, DependsOnlyOnMasterAndIndex) {
  EXPECT_EQ(split_seed(1, 2), split_seed(1, 2));
  EXPECT_NE(split_seed(1, 2), split_seed(1, 3));
  EXPECT_NE(split_seed(1, 2), split_seed(2, 2));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(split_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(9), b(9);
  EXPECT_EQ(a.gaussian(5, 3), b.gaussian(5, 3));
  EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Rng, SampleWithoutReplacementIsSortedAndDistinct) {
  Rng rng(3);
  const auto s = rng.sample_without_replacement(50, 20);
  ASSERT_EQ(s.size(), 20u);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1], s[i]);
  EXPECT_LT(s.back(), 50u);
}

TEST(RandomOrthonormal, ColumnsOrthonormal) {
  const Factor q = random_orthonormal(50, 5, std::uint64_t{1});
  EXPECT_LT((q.transpose() * q - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RandomOrthonormal, BitwiseDeterministic) {
  EXPECT_EQ(random_orthonormal(30, 4, std::uint64_t{17}), random_orthonormal(30, 4, std::uint64_t{17}));
}

TEST(RandomOrthonormal, FirstNonzeroEntryPositive) {
  const Factor q = random_orthonormal(10, 3, std::uint64_t{5});
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_GT(q(0, j), 0.0);
}

TEST(RandomOrthonormal, RejectsRankAboveDimension) {
  EXPECT_THROW(random_orthonormal(3, 4, std::uint64_t{1}), DimensionError);
}

// ||Q^T u||^2 has mean r/d under the Haar measure.
TEST(RandomOrthonormal, ProjectionMomentMatchesHaar) {
  const Eigen::Index d = 12, r = 3;
  Vector u = Vector::Zero(d);
  u(0) = 0.6;
  u(4) = 0.8;
  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int s = 0; s < n; ++s) {
    const Factor q = random_orthonormal(d, r, split_seed(77, static_cast<std::uint64_t>(s)));
    const double v = (q.transpose() * u).squaredNorm();
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LT(std::abs(mean - static_cast<double>(r) / d), 3.0 * se);
}
