#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/models/common.hpp"
#include "lrpgd/projections.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

enum class LinkKind { logistic, probit, laplace };

inline LinkKind parse_link(const std::string& name) {
  if (name == "logistic") return LinkKind::logistic;
  if (name == "probit") return LinkKind::probit;
  if (name == "laplace") return LinkKind::laplace;
  throw ParameterError("unknown link function: " + name);
}

inline const char* to_string(LinkKind k) {
  switch (k) {
    case LinkKind::logistic: return "logistic";
    case LinkKind::probit: return "probit";
    case LinkKind::laplace: return "laplace";
  }
  return "?";
}

/// A CDF-type link f with its first two derivatives.
struct LinkFunction {
  LinkKind kind = LinkKind::logistic;

  double f(double x) const {
    switch (kind) {
      case LinkKind::logistic:
        return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      case LinkKind::probit: return 0.5 * std::erfc(-x / std::numbers::sqrt2);
      case LinkKind::laplace: return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
    }
    return 0.0;
  }
  double d1(double x) const {
    switch (kind) {
      case LinkKind::logistic: {
        const double e = std::exp(-std::abs(x));
        return e / ((1.0 + e) * (1.0 + e));
      }
      case LinkKind::probit: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      case LinkKind::laplace: return 0.5 * std::exp(-std::abs(x));
    }
    return 0.0;
  }
  double d2(double x) const {
    switch (kind) {
      case LinkKind::logistic: return d1(x) * (1.0 - 2.0 * f(x));
      case LinkKind::probit: return -x * d1(x);
      case LinkKind::laplace: return x == 0.0 ? 0.0 : (x > 0.0 ? -1.0 : 1.0) * 0.5 * std::exp(-std::abs(x));
    }
    return 0.0;
  }
};

inline constexpr double kProbClamp = 1e-12;

/// Sign observations on a symmetric Bernoulli mask; value holds Y in {-1, +1}.
struct BinaryObservations {
  Eigen::Index d = 0;
  double p = 1.0;
  double noise_sd = 1.0;
  LinkFunction link;
  std::vector<Entry> entries;  // i >= j
};

struct OneBitProblem {
  BinaryObservations data;
  GroundTruth truth;
};

inline OneBitProblem generate_one_bit(Eigen::Index d, Eigen::Index r, double p, double sigma,
                                      LinkKind link, std::uint64_t seed) {
  detail::require(sigma > 0.0, "generate_one_bit: sigma must be positive");
  Rng rng(seed);
  GroundTruth gt = make_ground_truth(random_orthonormal(d, r, rng));
  BinaryObservations data{d, p, sigma, LinkFunction{link}, sample_symmetric_mask(d, p, rng)};
  for (Entry& e : data.entries) {
    const double m = gt.factor.row(e.i).dot(gt.factor.row(e.j));
    e.value = rng.uniform() < data.link.f(m / sigma) ? 1.0 : -1.0;
  }
  return {std::move(data), std::move(gt)};
}

namespace detail {

struct EntryTerm {
  double loss = 0.0;
  double grad = 0.0;  // d loss / d M_ij
  bool clamped = false;
};

inline EntryTerm one_bit_term(const LinkFunction& link, double sigma, double m, double y) {
  const double x = m / sigma;
  double fx, d1;
  if (link.kind == LinkKind::logistic) {
    // f and f' share one exponential.
    const double e = std::exp(-std::abs(x));
    fx = x >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    d1 = e / ((1.0 + e) * (1.0 + e));
  } else {
    fx = link.f(x);
    d1 = link.d1(x);
  }
  EntryTerm t;
  if (fx < kProbClamp || fx > 1.0 - kProbClamp) {
    fx = std::clamp(fx, kProbClamp, 1.0 - kProbClamp);
    t.clamped = true;
  }
  if (y == 1.0)
    t.loss = -2.0 * std::log(fx);
  else if (y == -1.0)
    t.loss = -2.0 * std::log1p(-fx);
  else
    t.loss = -((1.0 + y) * std::log(fx) + (1.0 - y) * std::log1p(-fx));
  t.grad = -(1.0 / sigma) * d1 * (y - 2.0 * fx + 1.0) / (fx * (1.0 - fx));
  return t;
}

}  // namespace detail

/// Loss and d/dM of one observed entry, exposed for hand checks.
inline std::pair<double, double> one_bit_entry(const LinkFunction& link, double sigma, double m,
                                               double y) {
  const auto t = detail::one_bit_term(link, sigma, m, y);
  return {t.loss, t.grad};
}

/// Negative log-likelihood L(M) = -sum_Omega [(1+Y) log f(M/s) + (1-Y) log(1 - f(M/s))]
/// over a row-clipped set.
class OneBitCompletion {
 public:
  OneBitCompletion(BinaryObservations data, RowClipSpec spec)
      : data_(std::move(data)), spec_(spec) {}

  LossGrad loss_grad(const Factor& f) const {
    detail::require_dims(f.rows() == data_.d, "OneBitCompletion: shape mismatch");
    const RowMajorMatrix fr = f;
    RowMajorMatrix g = RowMajorMatrix::Zero(f.rows(), f.cols());
    LossGrad out;
    for (const Entry& e : data_.entries) {
      const double m = fr.row(e.i).dot(fr.row(e.j));
      const auto t = detail::one_bit_term(data_.link, data_.noise_sd, m, e.value);
      out.clamps += t.clamped ? 1 : 0;
      if (e.i == e.j) {
        out.loss += t.loss;
        g.row(e.i) += t.grad * fr.row(e.i);
      } else {
        out.loss += 2.0 * t.loss;
        g.row(e.i) += t.grad * fr.row(e.j);
        g.row(e.j) += t.grad * fr.row(e.i);
      }
    }
    out.grad = 2.0 * Factor(g);
    return out;
  }

  Factor project(const Factor& f) const { return clip_rows(f, spec_); }

  double caption_step() const { return 0.5 * data_.noise_sd * data_.noise_sd / data_.p; }
  double step_unit() const { return 1.0; }

  const BinaryObservations& data() const { return data_; }
  const RowClipSpec& spec() const { return spec_; }

 private:
  BinaryObservations data_;
  RowClipSpec spec_;
};

struct FlatnessConstants {
  double upper = 0.0;  // L_a
  double lower = 0.0;  // gamma_a
};

/// Suprema over |x| < a of the three L-ratios and f(1-f)/f'^2, on a uniform grid
/// of 10^4 points over [-a, a] plus x = 0 (endpoints included as the limit of the open interval).
inline FlatnessConstants flatness_constants(const LinkFunction& link, double a,
                                            int grid = 10000) {
  detail::require(a > 0.0, "flatness_constants: a must be positive");
  FlatnessConstants c;
  // x = 0 is added so the Laplace kink is always sampled; the sup is then monotone in a.
  for (int k = 0; k <= grid; ++k) {
    const double x = k == grid ? 0.0 : -a + 2.0 * a * static_cast<double>(k) / static_cast<double>(grid - 1);
    const double fx = link.f(x);
    const double v = fx * (1.0 - fx);
    const double f1 = link.d1(x);
    const double r1 = std::abs(f1) / v;
    c.upper = std::max({c.upper, r1, r1 * r1, std::abs(link.d2(x)) / v});
    c.lower = std::max(c.lower, v / (f1 * f1));
  }
  return c;
}

inline ClippedInit init_random(const BinaryObservations& data, Eigen::Index r, double mu,
                               std::uint64_t seed) {
  return clipped_random_init(data.d, r, mu, seed);
}

}  // namespace lrpgd
