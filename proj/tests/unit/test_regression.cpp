#include <gtest/gtest.h>

#include "lrpgd/gradcheck.hpp"
#include "lrpgd/models/matrix_regression.hpp"
#include "lrpgd/solver.hpp"

using namespace lrpgd;

TEST(MatrixRegression, ScalarHandExample) {
  SensingData data{1, Matrix::Ones(1, 1), Vector::Ones(1), 0.0};
  const MatrixRegression model(data);
  const LossGrad lg = model.loss_grad(Factor::Constant(1, 1, 2.0));
  EXPECT_DOUBLE_EQ(lg.loss, 4.5);
  EXPECT_DOUBLE_EQ(lg.grad(0, 0), 12.0);
}

TEST(MatrixRegression, GradientMatchesFiniteDifferences) {
  const auto prob = generate_sensing(8, 2, 200, 0.1, 3);
  const MatrixRegression model(prob.data);
  Rng rng(4);
  EXPECT_LT(gradcheck(model, {rng.gaussian(8, 2), rng.gaussian(8, 2)}), 1e-6);
}

TEST(MatrixRegression, NoiselessLossVanishesAtTruth) {
  const auto prob = generate_sensing(10, 2, 300, 0.0, 5);
  EXPECT_LT(MatrixRegression(prob.data).loss_grad(prob.truth.factor).loss, 1e-24);
}

// Designs are symmetrized Gaussians: E <X, M>^2 = ||M||_F^2 for symmetric M.
TEST(MatrixRegression, DesignSecondMoment) {
  const auto prob = generate_sensing(6, 1, 40000, 0.0, 6);
  Matrix m = Matrix::Zero(6, 6);
  m(0, 0) = 1.0;
  m(1, 2) = m(2, 1) = 1.0;
  const double mean = sensing_operator(prob.data, m).squaredNorm() / prob.data.n();
  EXPECT_NEAR(mean / m.squaredNorm(), 1.0, 0.03);
}

TEST(MatrixRegression, RestrictedIsometryAtLargeSample) {
  const auto prob = generate_sensing(20, 2, 8000, 0.0, 7);
  EXPECT_LT(rip_estimate(prob.data, 2, 20, 8), 0.2);
}

TEST(MatrixRegression, NoiselessRecovery) {
  int ok = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto prob = generate_sensing(60, 2, 720, 0.0, split_seed(90, s));
    const MatrixRegression model(prob.data);
    const Factor f0 = init_svd(prob.data, 2);
    SolverOptions o;
    o.max_iters = 600;
    o.stop_rel_change = 1e-10;
    const SolverResult r = pgd(model, f0, constant_step(MatrixRegression::default_step(f0)), o);
    ok += factor_dist(r.factor, prob.truth) < 1e-6 ? 1 : 0;
  }
  EXPECT_GE(ok, 8);
}

TEST(MatrixRegression, ShapeMismatchThrows) {
  const auto prob = generate_sensing(5, 1, 10, 0.0, 1);
  EXPECT_THROW(MatrixRegression(prob.data).loss_grad(Factor::Zero(4, 1)), DimensionError);
}
