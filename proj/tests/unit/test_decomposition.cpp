#include <gtest/gtest.h>

#include "lrpgd/gradcheck.hpp"
#include "lrpgd/models/matrix_decomposition.hpp"
#include "support/oracles.hpp"

using namespace lrpgd;

TEST(MatrixDecomposition, LossIsSumOfColumnDistancesToL1Balls) {
  const auto prob = generate_decomposition(12, 2, 3, 1.0, 0.0, 1);
  const MatrixDecomposition model(prob.data, RowClipSpec{10.0});
  Rng rng(2);
  const Factor f = rng.gaussian(12, 2);
  const Matrix resid = prob.data.y - f * f.transpose();
  double expect = 0.0;
  for (Eigen::Index c = 0; c < 12; ++c)
    expect += 0.5 * (resid.col(c) - oracle::l1_ball(resid.col(c), prob.data.radii(c))).squaredNorm();
  EXPECT_NEAR(model.loss_grad(f).loss, expect, 1e-9 * std::max(1.0, expect));
}

TEST(MatrixDecomposition, HugeRadiiGiveZeroLoss) {
  auto prob = generate_decomposition(10, 2, 2, 1.0, 0.0, 3);
  prob.data.radii.setConstant(1e6);
  Rng rng(4);
  EXPECT_NEAR(MatrixDecomposition(prob.data, RowClipSpec{10.0}).loss_grad(rng.gaussian(10, 2)).loss, 0.0,
              1e-20);
}

TEST(MatrixDecomposition, NoCorruption) {
  const auto prob = generate_decomposition(15, 2, 0, 1.0, 0.0, 5);
  const Matrix m = prob.truth.factor * prob.truth.factor.transpose();
  EXPECT_LT((prob.data.y - m).norm(), 1e-14);
  EXPECT_EQ(prob.sparse.cwiseAbs().sum(), 0.0);
  EXPECT_NEAR(MatrixDecomposition(prob.data, RowClipSpec{10.0}).loss_grad(prob.truth.factor).loss, 0.0,
              1e-28);
}

TEST(MatrixDecomposition, CorruptionRespectsRowBudget) {
  Rng rng(6);
  const Matrix s = sample_sparse_corruption(40, 5, 1.0, rng);
  EXPECT_LT((s - s.transpose()).norm(), 1e-300);
  EXPECT_EQ(s.diagonal().cwiseAbs().sum(), 0.0);
  for (Eigen::Index i = 0; i < 40; ++i) EXPECT_LE((s.row(i).array() != 0.0).count(), 5);
  EXPECT_EQ((s.array() != 0.0).count(), 5 * 40);
  EXPECT_THROW(sample_sparse_corruption(5, 5, 1.0, rng), ParameterError);
}

TEST(MatrixDecomposition, InnerMinimizerSatisfiesVariationalInequality) {
  const auto prob = generate_decomposition(10, 2, 2, 1.0, 0.0, 7);
  const MatrixDecomposition model(prob.data, RowClipSpec{10.0});
  Rng rng(8);
  const Factor f = rng.gaussian(10, 2);
  const Matrix resid = prob.data.y - f * f.transpose();
  const Matrix s = model.inner_minimizer(f);
  for (int trial = 0; trial < 20; ++trial) {
    // A feasible competitor, column by column.
    Matrix z = rng.gaussian(10, 10);
    z = project_columns_l1(z, prob.data.radii);
    EXPECT_LE(((resid - s).cwiseProduct(z - s)).sum(), 1e-10);
  }
}

TEST(MatrixDecomposition, GradientMatchesFiniteDifferences) {
  const auto prob = generate_decomposition(10, 2, 2, 1.0, 0.01, 9);
  const MatrixDecomposition model(prob.data, RowClipSpec{10.0});
  Rng rng(10);
  EXPECT_LT(gradcheck(model, {prob.truth.factor + 0.3 * rng.gaussian(10, 2)}), 1e-5);
}

TEST(MatrixDecomposition, HardThresholdInitIsClipped) {
  const auto prob = generate_decomposition(50, 2, 2, 5.0, 0.0, 11);
  const ClippedInit init = init_hard_threshold(prob.data, 2, prob.truth.incoherence);
  EXPECT_LE(init.factor.rowwise().norm().maxCoeff(), init.spec.radius * (1 + 1e-12));
}
