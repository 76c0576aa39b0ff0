#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lrpgd/gradcheck.hpp"
#include "lrpgd/models/one_bit.hpp"

using namespace lrpgd;

TEST(OneBit, EntryAtZero) {
  const LinkFunction logistic{LinkKind::logistic};
  for (double sigma : {0.5, 1.0, 3.0}) {
    const auto [loss, grad] = one_bit_entry(logistic, sigma, 0.0, 1.0);
    EXPECT_NEAR(loss, 2.0 * std::numbers::ln2, 1e-14);
    EXPECT_NEAR(grad, -1.0 / sigma, 1e-14);
  }
}

TEST(OneBit, LinkDerivativesMatchFiniteDifferences) {
  for (LinkKind k : {LinkKind::logistic, LinkKind::probit, LinkKind::laplace}) {
    const LinkFunction link{k};
    for (double x : {-2.0, -0.3, 0.4, 1.7}) {
      const double h = 1e-6;
      EXPECT_NEAR(link.d1(x), (link.f(x + h) - link.f(x - h)) / (2 * h), 1e-7);
      EXPECT_NEAR(link.d2(x), (link.d1(x + h) - link.d1(x - h)) / (2 * h), 1e-6);
    }
  }
}

TEST(OneBit, ParseLink) {
  EXPECT_EQ(parse_link("probit"), LinkKind::probit);
  EXPECT_THROW(parse_link("cauchy"), ParameterError);
}

TEST(OneBit, LogisticFlatnessConstants) {
  const LinkFunction logistic{LinkKind::logistic};
  const FlatnessConstants near_zero = flatness_constants(logistic, 1e-8);
  EXPECT_NEAR(near_zero.lower, 4.0, 1e-6);
  EXPECT_NEAR(near_zero.upper, 1.0, 1e-6);
  const FlatnessConstants one = flatness_constants(logistic, 1.0);
  EXPECT_NEAR(one.lower, (1 + std::numbers::e) * (1 + std::numbers::e) / std::numbers::e, 1e-9);
  EXPECT_THROW(flatness_constants(logistic, 0.0), ParameterError);
}

TEST(OneBit, FlatnessMonotoneInRadius) {
  for (LinkKind k : {LinkKind::logistic, LinkKind::probit, LinkKind::laplace}) {
    const LinkFunction link{k};
    double prev_u = 0.0, prev_l = 0.0;
    for (double a : {0.5, 1.0, 2.0, 4.0}) {
      const FlatnessConstants c = flatness_constants(link, a);
      EXPECT_GE(c.upper, prev_u - 1e-12);
      EXPECT_GE(c.lower, prev_l - 1e-12);
      prev_u = c.upper;
      prev_l = c.lower;
    }
  }
}

TEST(OneBit, ObservedSignsFollowLink) {
  const auto prob = generate_one_bit(60, 1, 1.0, 0.05, LinkKind::logistic, 11);
  const Matrix m = prob.truth.factor * prob.truth.factor.transpose();
  double expected = 0.0, observed = 0.0;
  for (const Entry& e : prob.data.entries) {
    expected += prob.data.link.f(m(e.i, e.j) / 0.05);
    observed += e.value > 0 ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(prob.data.entries.size());
  EXPECT_LT(std::abs(observed - expected), 4.0 * std::sqrt(n / 4.0));
}

TEST(OneBit, GradientMatchesFiniteDifferences) {
  for (LinkKind k : {LinkKind::logistic, LinkKind::probit, LinkKind::laplace}) {
    const auto prob = generate_one_bit(10, 2, 0.6, 1.0, k, 12);
    const OneBitCompletion model(prob.data, RowClipSpec{10.0});
    Rng rng(13);
    EXPECT_LT(gradcheck(model, {0.5 * rng.gaussian(10, 2)}), 1e-6) << to_string(k);
  }
}

TEST(OneBit, ExtremeMarginsAreClamped) {
  const LinkFunction probit{LinkKind::probit};
  const auto [loss, grad] = one_bit_entry(probit, 0.01, 10.0, -1.0);
  EXPECT_TRUE(std::isfinite(loss));
  EXPECT_TRUE(std::isfinite(grad));
  EXPECT_THROW(generate_one_bit(10, 1, 0.5, 0.0, LinkKind::logistic, 1), ParameterError);
}
