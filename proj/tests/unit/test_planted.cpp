#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "lrpgd/gradcheck.hpp"
#include "lrpgd/models/planted_subgraph.hpp"

using namespace lrpgd;

TEST(PlantedSubgraph, LossMatchesDenseForm) {
  const auto prob = generate_planted(30, 10, 0.7, 0.2, 1);
  const PlantedSubgraph model(prob.graph);
  Rng rng(2);
  const Factor f = rng.gaussian(30, 1);
  const Matrix s = prob.graph.adjacency.dense() - prob.graph.shift() * Matrix::Ones(30, 30);
  EXPECT_NEAR(model.loss_grad(f).loss, -(f.transpose() * s * f)(0, 0), 1e-10);
  EXPECT_LT(prob.graph.adjacency.dense().diagonal().cwiseAbs().sum(), 1e-300);
}

TEST(PlantedSubgraph, GradientAndCurvature) {
  const auto prob = generate_planted(20, 6, 0.8, 0.2, 3);
  const PlantedSubgraph model(prob.graph);
  Rng rng(4);
  const Factor f = rng.gaussian(20, 1);
  EXPECT_LT(gradcheck(model, {f}), 1e-6);
  // Quadratic loss: L(f + h e) - 2 L(f) + L(f - h e) = -2 h^2 e^T S e exactly.
  const Factor e = rng.gaussian(20, 1);
  const double h = 0.3;
  const double second = model.loss_grad(f + h * e).loss - 2 * model.loss_grad(f).loss +
                        model.loss_grad(f - h * e).loss;
  const Matrix s = prob.graph.adjacency.dense() - prob.graph.shift() * Matrix::Ones(20, 20);
  EXPECT_NEAR(second, -2 * h * h * (e.transpose() * s * e)(0, 0), 1e-9);
}

TEST(PlantedSubgraph, SpectralInitNearIndicator) {
  const auto prob = generate_planted(300, 60, 0.5, 0.05, 5);
  const Factor f0 = init_svd(prob.graph, 6);
  EXPECT_LE(factor_dist(f0, prob.truth), std::sqrt(60.0) / 5.0);
  EXPECT_NEAR(f0.sum(), 60.0, 1e-8);
}

TEST(PlantedSubgraph, IndicatorIsStationaryWhenSeparated) {
  const auto prob = generate_planted(100, 30, 0.9, 0.05, 6);
  const PlantedSubgraph model(prob.graph);
  const Factor step = model.project(prob.truth.factor - 0.01 * model.loss_grad(prob.truth.factor).grad);
  EXPECT_TRUE(exact_recovery(step, prob.truth));
}

TEST(PlantedSubgraph, ParameterChecks) {
  EXPECT_THROW(generate_planted(10, 3, 0.2, 0.2, 1), ParameterError);
  EXPECT_THROW(generate_planted(10, 3, 0.1, 0.3, 1), ParameterError);
  EXPECT_THROW(PlantedSubgraph(generate_planted(10, 3, 0.5, 0.1, 1).graph).loss_grad(Factor::Zero(10, 2)),
               DimensionError);
}

TEST(EdgeList, ParsesCommentsLoopsAndDuplicates) {
  std::istringstream in("# header\n0 1\n1 0\n2 2\n1 3  # trailing\n\n");
  const Adjacency a = load_edge_list(in);
  EXPECT_EQ(a.d, 4);
  EXPECT_EQ(a.edge_count(), 2u);
  EXPECT_EQ(a.dense()(3, 1), 1.0);
  std::istringstream bad("0\n");
  EXPECT_THROW(load_edge_list(bad), ParameterError);
  std::istringstream big("0 9\n");
  EXPECT_THROW(load_edge_list(big, 5), DimensionError);
}
