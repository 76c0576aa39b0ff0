#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/experiment/config.hpp"
#include "lrpgd/gradcheck.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/models/matrix_completion.hpp"
#include "lrpgd/models/matrix_decomposition.hpp"
#include "lrpgd/models/matrix_regression.hpp"
#include "lrpgd/models/one_bit.hpp"
#include "lrpgd/models/planted_subgraph.hpp"
#include "lrpgd/models/sparse_pca.hpp"
#include "lrpgd/probe.hpp"
#include "lrpgd/random.hpp"
#include "lrpgd/solver.hpp"

namespace lrpgd::experiment {

enum class ModelKind { mc, regression, one_bit, sparse_pca, planted, decomposition };

inline ModelKind parse_model(const std::string& s) {
  if (s == "mc" || s == "matrix-completion") return ModelKind::mc;
  if (s == "regression" || s == "matrix-regression") return ModelKind::regression;
  if (s == "one-bit" || s == "ob") return ModelKind::one_bit;
  if (s == "sparse-pca" || s == "spca") return ModelKind::sparse_pca;
  if (s == "planted" || s == "planted-subgraph") return ModelKind::planted;
  if (s == "decomposition" || s == "ls") return ModelKind::decomposition;
  throw ConfigError("unknown model '" + s + "'");
}

using AnyModel = std::variant<MatrixCompletion, MatrixRegression, OneBitCompletion, SparsePca,
                              PlantedSubgraph, MatrixDecomposition>;

/// A generated problem with its model, ground truth and initial factor.
struct Instance {
  ModelKind kind = ModelKind::mc;
  AnyModel model;
  std::optional<GroundTruth> truth;
  Factor init;
};

// ---------------------------------------------------------------------------
// Parameter resolution

namespace detail {

inline Eigen::Index positive_index(const Config& c, const std::string& key) {
  const long long v = c.integer(key);
  if (v < 1) throw ConfigError("config key '" + key + "' must be >= 1");
  return static_cast<Eigen::Index>(v);
}

/// sigma, or sigma_scale * r / d.
inline double noise_level(const Config& c, Eigen::Index d, Eigen::Index r, double fallback) {
  if (c.has("sigma")) return c.num("sigma");
  if (c.has("sigma_scale"))
    return c.num("sigma_scale") * static_cast<double>(r) / static_cast<double>(d);
  return fallback;
}

/// k, or round(k_frac * d).
inline Eigen::Index cluster_size(const Config& c, Eigen::Index d) {
  if (c.has("k")) return static_cast<Eigen::Index>(c.integer("k"));
  if (c.has("k_frac"))
    return static_cast<Eigen::Index>(std::llround(c.num("k_frac") * static_cast<double>(d)));
  throw ConfigError("missing config key 'k' (or 'k_frac')");
}

inline double incoherence_for(const Config& c, const GroundTruth& gt) {
  return c.num("mu", gt.incoherence);
}

template <class... Allowed>
void require_init(const std::string& init, Allowed... allowed) {
  if (((init == allowed) || ...)) return;
  throw ConfigError("init '" + init + "' is not supported by this model");
}

}  // namespace detail

/// Generates the problem for one seed and computes its initial factor.
inline Instance build_instance(const Config& c, std::uint64_t seed) {
  const ModelKind kind = parse_model(c.str("model"));
  const std::uint64_t data_seed = split_seed(seed, 1);
  const std::uint64_t init_seed = split_seed(seed, 2);
  const Eigen::Index d = detail::positive_index(c, "d");
  const Eigen::Index r = c.has("r") ? detail::positive_index(c, "r") : 1;
  if (r > d) throw ConfigError("need r <= d");

  switch (kind) {
    case ModelKind::mc: {
      const std::string init = c.str("init", "svd");
      detail::require_init(init, "svd", "random");
      auto prob = generate_completion(d, r, c.num("p"), detail::noise_level(c, d, r, 0.0), data_seed);
      const double mu = detail::incoherence_for(c, prob.truth);
      ClippedInit ci = init == "svd" ? init_svd(prob.data, r, mu)
                                     : clipped_random_init(d, r, mu, init_seed);
      return {kind, MatrixCompletion(std::move(prob.data), ci.spec), std::move(prob.truth),
              std::move(ci.factor)};
    }
    case ModelKind::regression: {
      const std::string init = c.str("init", "svd");
      detail::require_init(init, "svd", "random");
      const Eigen::Index n = c.has("n") ? detail::positive_index(c, "n")
                                        : static_cast<Eigen::Index>(c.integer("n_factor", 10) * d * r);
      auto prob = generate_sensing(d, r, n, c.num("sigma", 0.0), data_seed);
      Factor f0 = init == "svd" ? init_svd(prob.data, r) : random_orthonormal(d, r, init_seed);
      return {kind, MatrixRegression(std::move(prob.data)), std::move(prob.truth), std::move(f0)};
    }
    case ModelKind::one_bit: {
      const std::string init = c.str("init", "random");
      detail::require_init(init, "random");
      const double sigma = detail::noise_level(c, d, r, -1.0);
      if (!(sigma > 0.0)) throw ConfigError("one-bit model needs sigma > 0 (sigma or sigma_scale)");
      auto prob = generate_one_bit(d, r, c.num("p"), sigma, parse_link(c.str("link", "logistic")),
                                   data_seed);
      ClippedInit ci = init_random(prob.data, r, detail::incoherence_for(c, prob.truth), init_seed);
      return {kind, OneBitCompletion(std::move(prob.data), ci.spec), std::move(prob.truth),
              std::move(ci.factor)};
    }
    case ModelKind::sparse_pca: {
      const std::string init = c.str("init", "diag-threshold");
      detail::require_init(init, "diag-threshold", "perturbed");
      auto prob = generate_spiked(d, r, detail::cluster_size(c, d), c.num("gamma"),
                                  detail::positive_index(c, "n"), data_seed);
      SpectralL21Spec spec = sparse_pca_spec(prob.truth);
      if (c.has("l21_radius")) spec.l21_radius = c.num("l21_radius");
      Factor f0 = init == "diag-threshold" ? init_diag_threshold(prob.data, r, spec)
                                           : init_perturbed(prob.data, prob.truth, spec, init_seed);
      return {kind, SparsePca(std::move(prob.data), spec), std::move(prob.truth), std::move(f0)};
    }
    case ModelKind::planted: {
      const std::string init = c.str("init", "svd");
      detail::require_init(init, "svd");
      if (r != 1) throw ConfigError("planted model has rank 1");
      const double p = c.has("p") ? c.num("p") : c.num("pd") / static_cast<double>(d);
      const double q = c.has("q") ? c.num("q") : p * c.num("q_ratio");
      const Eigen::Index k = detail::cluster_size(c, d);
      if (c.has("edge_list")) {
        PlantedGraph g{load_edge_list(c.str("edge_list"), d), k, p, q};
        if (!(p > q)) throw ParameterError("planted model needs p > q");
        Factor f0 = init_svd(g, init_seed);
        return {kind, PlantedSubgraph(std::move(g)), std::nullopt, std::move(f0)};
      }
      auto prob = generate_planted(d, k, p, q, data_seed);
      Factor f0 = init_svd(prob.graph, init_seed);
      return {kind, PlantedSubgraph(std::move(prob.graph)), std::move(prob.truth), std::move(f0)};
    }
    case ModelKind::decomposition: {
      const std::string init = c.str("init", "hard-threshold");
      detail::require_init(init, "hard-threshold", "random");
      auto prob = generate_decomposition(d, r, detail::cluster_size(c, d), c.num("spike_scale", 10.0),
                                         detail::noise_level(c, d, r, 0.0), data_seed);
      const double mu = detail::incoherence_for(c, prob.truth);
      ClippedInit ci = init == "hard-threshold" ? init_hard_threshold(prob.data, r, mu)
                                                : clipped_random_init(d, r, mu, init_seed);
      return {kind, MatrixDecomposition(std::move(prob.data), ci.spec), std::move(prob.truth),
              std::move(ci.factor)};
    }
  }
  throw ConfigError("unreachable model kind");
}

/// Step schedule on the loss_grad scale. "step = caption" uses the reference step;
/// a number is read in the same units as the reference step.
inline StepSchedule build_schedule(const Config& c, const Instance& inst) {
  const std::string kind = c.str("schedule", "constant");
  if (kind == "theorem1")
    return theorem1_schedule(c.num("alpha"), c.num("lipschitz"), c.num("kappa", 1.0));
  if (kind == "theorem2")
    return theorem2_step(c.num("c_tau"), c.num("alpha"), c.num("beta"), c.num("kappa", 1.0));
  if (kind != "constant") throw ConfigError("unknown schedule '" + kind + "'");
  return std::visit(
      [&](const auto& m) -> StepSchedule {
        using M = std::decay_t<decltype(m)>;
        const std::string step = c.str("step", "caption");
        if constexpr (std::is_same_v<M, MatrixRegression>) {
          if (step == "caption") return constant_step(M::default_step(inst.init, c.num("step_c", 0.25)));
          return constant_step(c.num("step"));
        } else {
          const double eta = step == "caption" ? m.caption_step() : c.num("step");
          return constant_step(eta * m.step_unit());
        }
      },
      inst.model);
}

// ---------------------------------------------------------------------------
// Single runs

struct RunOptions {
  bool keep_trace = false;
  bool store_factors = false;
  bool wall_clock = false;
};

struct RunOutcome {
  std::uint64_t seed = 0;
  std::string status = "ok";  // ok | diverged | init-failed
  std::string message;
  double dist = std::nan("");
  double sin_sq = std::nan("");
  double per_entry = std::nan("");
  double loss = std::nan("");
  double init_dist = std::nan("");
  bool recovered = false;
  std::size_t iterations = 0;
  std::size_t clamps = 0;
  double ms = 0.0;
  std::vector<TraceRow> trace;
};

inline SolverOptions solver_options(const Config& c, const std::optional<GroundTruth>& gt,
                                    const RunOptions& ro) {
  SolverOptions o;
  const long long iters = c.integer("iters", 500);
  if (iters < 1) throw ConfigError("iters must be >= 1");
  o.max_iters = static_cast<std::size_t>(iters);
  o.stop_rel_change = c.num("stop_rel_change", 0.0);
  const long long every = c.integer("record_every", 1);
  if (every < 1) throw ConfigError("record_every must be >= 1");
  o.record_every = static_cast<std::size_t>(every);
  o.ground_truth = gt;
  o.store_factors = ro.store_factors;
  o.wall_clock = ro.wall_clock;
  return o;
}

/// Runs one seed. Invalid configuration propagates; a degenerate initializer or a
/// diverging solver is recorded in the outcome status.
inline RunOutcome run_one(const Config& c, std::uint64_t seed, const RunOptions& ro = {}) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  RunOutcome out;
  out.seed = seed;
  std::optional<Instance> inst;
  try {
    inst.emplace(build_instance(c, seed));
  } catch (const DegenerateError& e) {
    out.status = "init-failed";
    out.message = e.what();
    return out;
  }
  const StepSchedule schedule = build_schedule(c, *inst);
  const SolverOptions opts = solver_options(c, inst->truth, ro);
  if (inst->truth) out.init_dist = factor_dist(inst->init, *inst->truth);
  try {
    SolverResult res = std::visit(
        [&](const auto& m) { return pgd(m, inst->init, schedule, opts); }, inst->model);
    out.iterations = res.iterations;
    out.clamps = res.clamps;
    out.loss = res.trace.back().loss;
    if (inst->truth) {
      out.dist = factor_dist(res.factor, *inst->truth);
      out.sin_sq = res.trace.back().sin_sq;
      out.per_entry = per_entry_error(res.factor, *inst->truth);
      out.recovered = out.dist <= kExactRecoveryTol;
    }
    if (ro.keep_trace) out.trace = std::move(res.trace);
  } catch (const DivergenceError& e) {
    out.status = "diverged";
    out.message = e.what();
    out.iterations = e.iteration();
  }
  if (ro.wall_clock)
    out.ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// The configured model shrunk to ambient dimension `d_small` (if larger), keeping
/// the ratios k/d and n/(d r) so that finite differences stay cheap.
inline Config shrink_config(const Config& c, Eigen::Index d_small) {
  Config out = c;
  const Eigen::Index d = detail::positive_index(c, "d");
  if (d <= d_small) return out;
  const double ratio = static_cast<double>(d_small) / static_cast<double>(d);
  const Eigen::Index r = c.has("r") ? detail::positive_index(c, "r") : 1;
  out.set("d", std::to_string(d_small));
  if (r > d_small) out.set("r", std::to_string(d_small));
  if (c.has("k")) {
    const long long k = std::llround(static_cast<double>(c.integer("k")) * ratio);
    out.set("k", std::to_string(std::clamp<long long>(k, r, d_small - 1)));
  }
  if (c.has("n")) out.set("n", std::to_string(std::max<long long>(10 * d_small * r, 1)));
  out.erase("edge_list");
  return out;
}

struct GradcheckReport {
  double max_rel_error = 0.0;
  std::vector<double> errors;  // one per point
};

/// Central finite differences at `points` random feasible points near theta*.
inline GradcheckReport model_gradcheck(const Config& c, std::uint64_t seed, int points = 10) {
  const Instance inst = build_instance(c, seed);
  if (!inst.truth) throw ConfigError("gradcheck needs a generated instance");
  Rng rng(split_seed(seed, 3));
  const GroundTruth& gt = *inst.truth;
  GradcheckReport rep;
  std::visit(
      [&](const auto& m) {
        for (int i = 0; i < points; ++i) {
          Matrix e = rng.gaussian(gt.rows(), gt.rank());
          e *= 0.3 * gt.factor.norm() / e.norm();
          const Factor f = m.project(gt.factor + e);
          const double err = gradcheck(m, std::vector<Factor>{f});
          rep.errors.push_back(err);
          rep.max_rel_error = std::max(rep.max_rel_error, err);
        }
      },
      inst.model);
  return rep;
}

/// Condition probe of the configured model at radius `fraction * sigma_r(theta*)`.
inline ProbeReport model_probe(const Config& c, std::uint64_t seed, ProbeConfig pc,
                               double fraction) {
  const Instance inst = build_instance(c, seed);
  if (!inst.truth) throw ConfigError("probe needs a generated instance");
  pc.radius = fraction * inst.truth->sigma_r();
  return std::visit([&](const auto& m) { return probe(m, *inst.truth, pc); }, inst.model);
}

// ---------------------------------------------------------------------------
// Grids and parallel execution

/// Number of worker threads: LRPGD_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("LRPGD_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, n) on a pool; results land in slot i.
template <class Result>
std::vector<Result> parallel_map(std::size_t n, const std::function<Result(std::size_t)>& task,
                                 unsigned threads = worker_count()) {
  std::vector<Result> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

struct GridPoint {
  std::map<std::string, std::string> values;  // grid key -> value
  Config config;
};

/// Expands grid.* keys: "zip" pairs equal-length lists, "product" takes all combinations.
inline std::vector<GridPoint> expand_grid(const Config& c, const std::string& default_mode) {
  const auto grid = c.with_prefix("grid.");
  Config base;
  for (const auto& [k, v] : c.values())
    if (k.rfind("grid.", 0) != 0 && k != "grid_mode") base.set(k, v);
  if (grid.empty()) return {GridPoint{{}, base}};

  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& [k, v] : grid) {
    auto items = ::lrpgd::experiment::detail::split_list(v);
    if (items.empty()) throw ConfigError("grid." + k + " is empty");
    axes.emplace_back(k, std::move(items));
  }
  const std::string mode = c.str("grid_mode", default_mode);
  std::vector<GridPoint> points;
  if (mode == "zip") {
    const std::size_t len = axes.front().second.size();
    for (const auto& a : axes)
      if (a.second.size() != len) throw ConfigError("zip grid lists must have equal length");
    for (std::size_t i = 0; i < len; ++i) {
      GridPoint gp{{}, base};
      for (const auto& [k, items] : axes) {
        gp.values[k] = items[i];
        gp.config.set(k, items[i]);
      }
      points.push_back(std::move(gp));
    }
  } else if (mode == "product") {
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
      GridPoint gp{{}, base};
      for (std::size_t a = 0; a < axes.size(); ++a) {
        gp.values[axes[a].first] = axes[a].second[idx[a]];
        gp.config.set(axes[a].first, axes[a].second[idx[a]]);
      }
      points.push_back(std::move(gp));
      std::size_t a = axes.size();
      while (a > 0) {
        --a;
        if (++idx[a] < axes[a].second.size()) break;
        idx[a] = 0;
        if (a == 0) return points;
      }
      if (axes.empty()) break;
    }
  } else {
    throw ConfigError("grid_mode must be 'zip' or 'product'");
  }
  return points;
}

/// Seed of replicate j under the master seed.
inline std::uint64_t replicate_seed(std::uint64_t master, std::size_t j) {
  return split_seed(master, j);
}

struct SweepRow {
  std::size_t point = 0;
  std::size_t replicate = 0;
  RunOutcome outcome;
};

/// All (grid point, replicate) runs, in point-major order.
inline std::vector<SweepRow> run_grid(const std::vector<GridPoint>& points, std::size_t replicates,
                                      std::uint64_t master, const RunOptions& ro = {}) {
  const std::size_t n = points.size() * replicates;
  return parallel_map<SweepRow>(n, [&](std::size_t i) {
    const std::size_t p = i / replicates, j = i % replicates;
    return SweepRow{p, j, run_one(points[p].config, replicate_seed(master, j), ro)};
  });
}

// ---------------------------------------------------------------------------
// Formatting

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

struct Summary {
  std::size_t count = 0;
  double mean = std::nan("");
  double se = std::nan("");
};

/// Mean and standard error of the finite values.
inline Summary summarize(const std::vector<double>& xs) {
  Summary s;
  double sum = 0.0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++s.count;
    }
  if (s.count == 0) return s;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : xs)
      if (std::isfinite(x)) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(s.count - 1) / static_cast<double>(s.count));
  }
  return s;
}

inline const char* kTraceHeader = "iter,loss,step,dist,sin_sq,opt_err,ms";

inline std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const TraceRow& r : trace)
    out += std::to_string(r.t) + "," + fmt(r.loss) + "," + fmt(r.step) + "," + fmt(r.dist) + "," +
           fmt(r.sin_sq) + "," + fmt(r.opt_err) + "," + fmt(r.ms) + "\n";
  return out;
}

inline std::vector<std::string> grid_keys(const std::vector<GridPoint>& points) {
  std::vector<std::string> keys;
  if (!points.empty())
    for (const auto& [k, v] : points.front().values) keys.push_back(k);
  return keys;
}

inline std::string sweep_rows_csv(const std::vector<GridPoint>& points,
                                  const std::vector<SweepRow>& rows) {
  const auto keys = grid_keys(points);
  std::string out = "point,replicate,seed";
  for (const auto& k : keys) out += "," + k;
  out += ",status,dist,sin_sq,per_entry,loss,recovered,iters,clamps\n";
  for (const SweepRow& row : rows) {
    const RunOutcome& o = row.outcome;
    out += std::to_string(row.point) + "," + std::to_string(row.replicate) + "," + fmt(o.seed);
    for (const auto& k : keys) out += "," + points[row.point].values.at(k);
    out += "," + o.status + "," + fmt(o.dist) + "," + fmt(o.sin_sq) + "," + fmt(o.per_entry) + "," +
           fmt(o.loss) + "," + (o.recovered ? "1" : "0") + "," + std::to_string(o.iterations) +
           "," + std::to_string(o.clamps) + "\n";
  }
  return out;
}

inline std::string sweep_summary_csv(const std::vector<GridPoint>& points,
                                     const std::vector<SweepRow>& rows) {
  const auto keys = grid_keys(points);
  std::string out = "point";
  for (const auto& k : keys) out += "," + k;
  out += ",runs,ok,mean_dist,se_dist,mean_sin_sq,se_sin_sq,mean_per_entry,se_per_entry,"
         "mean_loss,se_loss,recovery_freq\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<double> dist, sin_sq, per_entry, loss;
    std::size_t runs = 0, ok = 0, recovered = 0;
    for (const SweepRow& row : rows) {
      if (row.point != p) continue;
      ++runs;
      if (row.outcome.status != "ok") continue;
      ++ok;
      recovered += row.outcome.recovered ? 1 : 0;
      dist.push_back(row.outcome.dist);
      sin_sq.push_back(row.outcome.sin_sq);
      per_entry.push_back(row.outcome.per_entry);
      loss.push_back(row.outcome.loss);
    }
    out += std::to_string(p);
    for (const auto& k : keys) out += "," + points[p].values.at(k);
    out += "," + std::to_string(runs) + "," + std::to_string(ok);
    for (const auto* xs : {&dist, &sin_sq, &per_entry, &loss}) {
      const Summary s = summarize(*xs);
      out += "," + fmt(s.mean) + "," + fmt(s.se);
    }
    out += "," + fmt(runs ? static_cast<double>(recovered) / static_cast<double>(runs) : std::nan(""));
    out += "\n";
  }
  return out;
}

/// Recovery frequency per cell; failed runs count as not recovered.
inline std::string phase_csv(const std::vector<GridPoint>& points, const std::vector<SweepRow>& rows) {
  const auto keys = grid_keys(points);
  std::string out = "cell";
  for (const auto& k : keys) out += "," + k;
  out += ",trials,recovered,frequency\n";
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::size_t trials = 0, recovered = 0;
    for (const SweepRow& row : rows)
      if (row.point == p) {
        ++trials;
        recovered += row.outcome.status == "ok" && row.outcome.recovered ? 1 : 0;
      }
    out += std::to_string(p);
    for (const auto& k : keys) out += "," + points[p].values.at(k);
    out += "," + std::to_string(trials) + "," + std::to_string(recovered) + "," +
           fmt(trials ? static_cast<double>(recovered) / static_cast<double>(trials) : 0.0) + "\n";
  }
  return out;
}

}  // namespace lrpgd::experiment
