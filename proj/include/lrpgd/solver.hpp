#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"

namespace lrpgd {

struct ConstantStep {
  double eta = 0.0;
};

/// eta_t = 1 / (alpha (t + gamma))
struct DiminishingStep {
  double alpha = 1.0;
  double gamma = 1.0;
};

using StepSchedule = std::variant<ConstantStep, DiminishingStep>;

inline double step_size(const StepSchedule& s, std::size_t t) {
  if (const auto* c = std::get_if<ConstantStep>(&s)) return c->eta;
  const auto& d = std::get<DiminishingStep>(s);
  return 1.0 / (d.alpha * (static_cast<double>(t) + d.gamma));
}

inline StepSchedule constant_step(double eta) {
  detail::require(eta > 0.0 && std::isfinite(eta), "constant step must be positive");
  return ConstantStep{eta};
}

/// Diminishing schedule with gamma = 20 kappa^2 L^2 / alpha^2.
inline StepSchedule theorem1_schedule(double alpha, double lipschitz, double kappa) {
  detail::require(alpha > 0.0 && lipschitz > 0.0 && kappa > 0.0,
                  "theorem1_schedule: alpha, L, kappa must be positive");
  detail::require(kappa >= 1.0, "theorem1_schedule: kappa must be >= 1");
  detail::require(alpha <= lipschitz, "theorem1_schedule: need alpha <= L");
  return DiminishingStep{alpha, 20.0 * kappa * kappa * lipschitz * lipschitz / (alpha * alpha)};
}

/// Constant step c_tau * alpha / (kappa^6 beta^2); c_tau has no default.
inline StepSchedule theorem2_step(double c_tau, double alpha, double beta, double kappa) {
  detail::require(c_tau > 0.0 && c_tau < 1.0, "theorem2_step: c_tau must lie in (0,1)");
  detail::require(alpha > 0.0 && beta > 0.0 && kappa >= 1.0,
                  "theorem2_step: alpha, beta positive and kappa >= 1");
  return ConstantStep{c_tau * alpha / (std::pow(kappa, 6) * beta * beta)};
}

/// A factorized loss over a constraint set.
template <class M>
concept LossModel = requires(const M& m, const Factor& f) {
  { m.loss_grad(f) } -> std::convertible_to<LossGrad>;
  { m.project(f) } -> std::convertible_to<Factor>;
};

struct SolverOptions {
  std::size_t max_iters = 500;
  double stop_rel_change = 0.0;
  std::size_t record_every = 1;
  std::optional<GroundTruth> ground_truth;
  bool store_factors = false;  // needed for the opt_err column
  bool wall_clock = false;     // fill the ms column (otherwise 0, for reproducible output)
  double feasibility_tol = 1e-8;
};

struct TraceRow {
  std::size_t t = 0;
  double loss = 0.0;
  double step = 0.0;
  double dist = std::nan("");
  double sin_sq = std::nan("");
  double opt_err = std::nan("");
  double ms = 0.0;
};

struct SolverResult {
  Factor factor;
  std::vector<TraceRow> trace;
  std::vector<Factor> factors;  // aligned with trace when store_factors
  std::size_t iterations = 0;
  std::size_t clamps = 0;
  bool stopped_early = false;
};

namespace detail {

inline void fill_metrics(TraceRow& row, const Factor& f, const SolverOptions& opts) {
  if (!opts.ground_truth) return;
  row.dist = factor_dist(f, *opts.ground_truth);
  try {
    row.sin_sq = subspace_sin_dist(f, opts.ground_truth->factor);
  } catch (const DegenerateError&) {
    row.sin_sq = std::nan("");
  }
}

}  // namespace detail

/// Projected gradient descent: F <- P(F - eta_t grad L(F)).
template <LossModel Model>
SolverResult pgd(const Model& model, const Factor& f0, const StepSchedule& schedule,
                 const SolverOptions& opts = {}) {
  detail::require(opts.max_iters >= 1, "pgd: max_iters must be >= 1");
  detail::require(opts.stop_rel_change >= 0.0, "pgd: stop_rel_change must be >= 0");
  detail::require(opts.record_every >= 1, "pgd: record_every must be >= 1");
  if (!f0.allFinite()) throw PreconditionError("pgd: initial factor has non-finite entries");
  if ((model.project(f0) - f0).norm() > opts.feasibility_tol * std::max(1.0, f0.norm()))
    throw PreconditionError("pgd: initial factor is not feasible");

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  SolverResult res;
  Factor f = f0;

  auto record = [&](std::size_t t, double loss, double eta) {
    TraceRow row;
    row.t = t;
    row.loss = loss;
    row.step = eta;
    detail::fill_metrics(row, f, opts);
    if (opts.wall_clock)
      row.ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    res.trace.push_back(row);
    if (opts.store_factors) res.factors.push_back(f);
  };

  std::size_t t = 0;
  for (; t < opts.max_iters; ++t) {
    LossGrad lg = model.loss_grad(f);
    res.clamps += lg.clamps;
    if (!std::isfinite(lg.loss) || !lg.grad.allFinite())
      throw DivergenceError("pgd: non-finite loss or gradient", t);
    const double eta = step_size(schedule, t);
    if (t % opts.record_every == 0) record(t, lg.loss, eta);

    Factor next = model.project(f - eta * lg.grad);
    if (!next.allFinite()) throw DivergenceError("pgd: non-finite iterate", t);
    const double change = (next - f).norm();
    const double scale = std::max(1.0, f.norm());
    f = std::move(next);
    if (change <= opts.stop_rel_change * scale) {
      ++t;
      res.stopped_early = true;
      break;
    }
  }

  // Final iterate is always recorded.
  LossGrad last = model.loss_grad(f);
  if (!std::isfinite(last.loss)) throw DivergenceError("pgd: non-finite final loss", t);
  if (res.trace.empty() || res.trace.back().t != t) record(t, last.loss, step_size(schedule, t));
  res.iterations = t;
  res.factor = f;

  if (opts.store_factors) {
    for (std::size_t i = 0; i < res.trace.size(); ++i)
      res.trace[i].opt_err = procrustes_dist(res.factors[i], res.factor);
  }
  return res;
}

}  // namespace lrpgd
