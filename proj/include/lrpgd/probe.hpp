#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/random.hpp"
#include "lrpgd/solver.hpp"

namespace lrpgd {

struct ProbeConfig {
  double radius = 0.1;
  double tau = 0.5;
  int samples = 200;
  std::uint64_t seed = 0;
};

/// Empirical constants of the local descent, Lipschitz and smoothness conditions.
struct ProbeReport {
  double alpha = std::nan("");
  double epsilon = std::nan("");
  double lipschitz = std::nan("");       // max ||grad L(F)||_F / ||theta*||_op
  double weak_lipschitz = std::nan("");  // relaxed form with ||theta*||_op^2 + ||theta*||_op ||F - F'||
  double beta = std::nan("");
  std::size_t samples = 0;
  std::size_t violations = 0;  // samples with <grad, F - theta*_pi> <= 0
  std::size_t skipped = 0;     // alignment failures
};

namespace detail {

inline void check_probe_config(const GroundTruth& gt, const ProbeConfig& cfg) {
  require(cfg.samples >= 1, "probe: samples must be >= 1");
  require(cfg.tau > 0.0 && cfg.tau < 1.0, "probe: tau must lie in (0, 1)");
  require(cfg.radius > 0.0, "probe: radius must be positive");
  if (cfg.radius >= gt.sigma_r())
    throw ParameterError("probe: radius must be below sigma_r(theta*) for a unique alignment");
}

inline Matrix unit_direction(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix e = rng.gaussian(rows, cols);
  return e / e.norm();
}

/// F = P(theta* + radius u E), u ~ U(0,1), E uniform on the unit Frobenius sphere.
template <LossModel Model>
Factor sample_ball_point(const Model& model, const GroundTruth& gt, double radius, Rng& rng) {
  const double u = rng.uniform();
  return model.project(gt.factor + radius * u * unit_direction(gt.rows(), gt.rank(), rng));
}

}  // namespace detail

/// Fits g >= alpha (||F - theta*_pi||^2 - eps^2) with g = <grad L(F), F - theta*_pi>.
/// eps is the smallest radius outside which every sample has g > 0; alpha is then
/// the largest slope consistent with all samples.
template <LossModel Model>
ProbeReport probe_descent(const Model& model, const GroundTruth& gt, const ProbeConfig& cfg) {
  detail::check_probe_config(gt, cfg);
  Rng rng(split_seed(cfg.seed, 1));
  ProbeReport rep;
  std::vector<double> g, x;
  for (int s = 0; s < cfg.samples; ++s) {
    const Factor f = detail::sample_ball_point(model, gt, cfg.radius, rng);
    Factor anchor;
    try {
      anchor = aligned_representative(f, gt, AlignmentMode::strict).representative;
    } catch (const NonUniqueAlignmentError&) {
      ++rep.skipped;
      continue;
    }
    const Factor diff = f - anchor;
    const double xi = diff.squaredNorm();
    if (xi == 0.0) continue;
    g.push_back(model.loss_grad(f).grad.cwiseProduct(diff).sum());
    x.push_back(xi);
  }
  rep.samples = g.size();
  double eps_sq = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i] <= 0.0) {
      ++rep.violations;
      eps_sq = std::max(eps_sq, x[i]);
    }
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double gap = x[i] - eps_sq;
    if (gap > 0.0) alpha = std::min(alpha, g[i] / gap);
    else if (gap < 0.0 && g[i] < 0.0) alpha = std::min(alpha, g[i] / gap);
  }
  rep.alpha = std::isfinite(alpha) ? alpha : 0.0;
  rep.epsilon = std::sqrt(eps_sq);
  return rep;
}

/// Lipschitz, relaxed Lipschitz and smoothness constants over sampled pairs.
/// The smoothness slack alpha * eps is taken from `descent` when supplied.
template <LossModel Model>
ProbeReport probe_smooth_lipschitz(const Model& model, const GroundTruth& gt,
                                   const ProbeConfig& cfg, const ProbeReport* descent = nullptr) {
  detail::check_probe_config(gt, cfg);
  Rng rng(split_seed(cfg.seed, 2));
  const double op = gt.op_norm();
  const double slack =
      descent && std::isfinite(descent->alpha) ? descent->alpha * descent->epsilon : 0.0;
  ProbeReport rep;
  double lip = 0.0, weak = 0.0, beta = 0.0;
  for (int s = 0; s < cfg.samples; ++s) {
    const Factor f = detail::sample_ball_point(model, gt, cfg.radius, rng);
    Factor anchor;
    try {
      anchor = aligned_representative(f, gt, AlignmentMode::strict).representative;
    } catch (const NonUniqueAlignmentError&) {
      ++rep.skipped;
      continue;
    }
    // Partner point: a step toward theta*_pi plus a small isotropic jitter.
    const double t = rng.uniform();
    const Factor f2 = model.project(f - t * (f - anchor) +
                                   0.1 * cfg.radius * rng.uniform() *
                                       detail::unit_direction(gt.rows(), gt.rank(), rng));
    const Factor g1 = model.loss_grad(f).grad;
    const Factor g2 = model.loss_grad(f2).grad;
    const double step = (f - f2).norm();
    const double to_truth = (f - anchor).norm();

    lip = std::max({lip, g1.norm() / op, g2.norm() / op});
    weak = std::max(weak, std::abs(g1.cwiseProduct(f - f2).sum()) / (op * op + op * step));
    if (step > 0.0 && to_truth > 0.0) {
      const double lhs = std::abs((g1 - g2).cwiseProduct(f - anchor).sum()) / to_truth;
      beta = std::max(beta, (lhs - slack) / step);
    }
    ++rep.samples;
  }
  rep.lipschitz = lip;
  rep.weak_lipschitz = weak;
  rep.beta = std::max(beta, 0.0);
  return rep;
}

template <LossModel Model>
ProbeReport probe(const Model& model, const GroundTruth& gt, const ProbeConfig& cfg) {
  ProbeReport out = probe_descent(model, gt, cfg);
  const ProbeReport sm = probe_smooth_lipschitz(model, gt, cfg, &out);
  out.lipschitz = sm.lipschitz;
  out.weak_lipschitz = sm.weak_lipschitz;
  out.beta = sm.beta;
  out.skipped += sm.skipped;
  return out;
}

}  // namespace lrpgd
