#include <gtest/gtest.h>

#include <cmath>

#include "lrpgd/linalg.hpp"
#include "lrpgd/models/quadratic.hpp"
#include "lrpgd/solver.hpp"

using namespace lrpgd;

namespace {

GroundTruth toy_truth() { return make_ground_truth(random_orthonormal(10, 2, std::uint64_t{3})); }

// Blows up the gradient so every iterate grows.
struct Exploding {
  LossGrad loss_grad(const Factor& f) const { return {f.squaredNorm(), -1e200 * f, 0}; }
  Factor project(const Factor& f) const { return f; }
};

struct UnitBall {
  LossGrad loss_grad(const Factor& f) const { return {f.squaredNorm(), 2.0 * f, 0}; }
  Factor project(const Factor& f) const { return f.norm() > 1.0 ? Factor(f / f.norm()) : f; }
};

}  // namespace

TEST(Pgd, ToyConvergesWithQuarterStep) {
  const GroundTruth gt = toy_truth();
  const QuadraticToy toy(gt.factor);
  SolverOptions o;
  o.max_iters = 200;
  o.ground_truth = gt;
  const SolverResult r = pgd(toy, Factor::Zero(10, 2), constant_step(0.25), o);
  EXPECT_LT(r.trace.back().dist, 1e-10);
  EXPECT_LE(r.iterations, 200u);
}

TEST(Pgd, TruthIsFixedPoint) {
  const GroundTruth gt = toy_truth();
  const SolverResult r = pgd(QuadraticToy(gt.factor), gt.factor, constant_step(0.1));
  EXPECT_EQ(r.factor, gt.factor);
}

TEST(Pgd, StopsEarlyOnSmallChange) {
  const GroundTruth gt = toy_truth();
  SolverOptions o;
  o.max_iters = 1000;
  o.stop_rel_change = 1e-12;
  const SolverResult r = pgd(QuadraticToy(gt.factor), Factor::Zero(10, 2), constant_step(0.25), o);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_LT(r.iterations, 1000u);
}

TEST(Pgd, OptErrorEndsAtZero) {
  const GroundTruth gt = toy_truth();
  SolverOptions o;
  o.max_iters = 20;
  o.store_factors = true;
  const SolverResult r = pgd(QuadraticToy(gt.factor), Factor::Zero(10, 2), constant_step(0.1), o);
  ASSERT_EQ(r.factors.size(), r.trace.size());
  EXPECT_EQ(r.trace.back().opt_err, 0.0);
  EXPECT_GT(r.trace.front().opt_err, 0.0);
  EXPECT_EQ(r.trace.back().ms, 0.0);
}

TEST(Pgd, RecordEveryKeepsFinalRow) {
  const GroundTruth gt = toy_truth();
  SolverOptions o;
  o.max_iters = 25;
  o.record_every = 10;
  const SolverResult r = pgd(QuadraticToy(gt.factor), Factor::Zero(10, 2), constant_step(0.1), o);
  ASSERT_EQ(r.trace.size(), 4u);
  EXPECT_EQ(r.trace[2].t, 20u);
  EXPECT_EQ(r.trace[3].t, 25u);
}

TEST(Pgd, DivergenceReported) {
  EXPECT_THROW(pgd(Exploding{}, Factor::Ones(3, 1), constant_step(1e200)), DivergenceError);
}

TEST(Pgd, InfeasibleStartRejected) {
  EXPECT_THROW(pgd(UnitBall{}, Factor::Constant(3, 1, 2.0), constant_step(0.1)), PreconditionError);
  Factor bad = Factor::Zero(3, 1);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(pgd(UnitBall{}, bad, constant_step(0.1)), PreconditionError);
}

TEST(Schedules, Theorem1UnitConstants) {
  const StepSchedule s = theorem1_schedule(1.0, 1.0, 1.0);
  for (std::size_t t : {0u, 1u, 7u, 100u}) EXPECT_DOUBLE_EQ(step_size(s, t), 1.0 / (t + 20.0));
}

TEST(Schedules, Theorem1StrictlyDecreasingWithHarmonicSum) {
  const StepSchedule s = theorem1_schedule(0.5, 2.0, 1.5);
  const double gamma = 20.0 * 1.5 * 1.5 * 4.0 / 0.25;
  double sum = 0.0, prev = 1e300;
  const std::size_t n = 100000;
  for (std::size_t t = 0; t < n; ++t) {
    const double eta = step_size(s, t);
    EXPECT_LT(eta, prev);
    prev = eta;
    sum += eta;
  }
  const double approx = std::log((n + gamma) / gamma) / 0.5;
  EXPECT_NEAR(sum / approx, 1.0, 0.05);
}

TEST(Schedules, Theorem1Preconditions) {
  EXPECT_THROW(theorem1_schedule(2.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(theorem1_schedule(1.0, 1.0, 0.5), ParameterError);
  EXPECT_THROW(theorem1_schedule(0.0, 1.0, 1.0), ParameterError);
}

TEST(Schedules, Theorem2Step) {
  const StepSchedule s = theorem2_step(0.5, 2.0, 4.0, 1.0);
  EXPECT_DOUBLE_EQ(step_size(s, 0), 0.5 * 2.0 / 16.0);
  EXPECT_DOUBLE_EQ(step_size(s, 123), step_size(s, 0));
  EXPECT_THROW(theorem2_step(1.0, 2.0, 4.0, 1.0), ParameterError);
  EXPECT_THROW(constant_step(0.0), ParameterError);
}

TEST(Pgd, EveryRecordedIterateIsFeasible) {
  SolverOptions o;
  o.max_iters = 30;
  o.store_factors = true;
  const UnitBall ball;
  Rng rng(5);
  Factor f0 = rng.gaussian(4, 2);
  f0 /= 2.0 * f0.norm();
  const SolverResult r = pgd(ball, f0, constant_step(0.7), o);
  for (const Factor& f : r.factors) EXPECT_LE((f - ball.project(f)).norm(), 1e-8);
}
