// Command-line front end: lrpgd run|sweep|phase|gradcheck|probe

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lrpgd/experiment/config.hpp"
#include "lrpgd/experiment/presets.hpp"
#include "lrpgd/experiment/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lrpgd;
using namespace lrpgd::experiment;

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitInitFailed = 4;
constexpr double kGradcheckTol = 1e-4;

struct CommonArgs {
  std::string preset;
  std::string config_file;
  std::vector<std::string> assignments;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = ".";
  bool desk = false;
  bool store_factors = false;
  bool wall_clock = false;
};

/// Preset, then config file, then --set, then --seed.
Config resolve(const CommonArgs& a) {
  Config c;
  if (!a.preset.empty()) c = load_preset(a.preset);
  if (!a.config_file.empty()) c.merge(Config::load(a.config_file));
  for (const auto& s : a.assignments) c.set_assignment(s);
  c = resolve_desk(c, a.desk);
  if (a.seed_given) c.set("seed", std::to_string(a.seed));
  if (!c.has("model")) throw ConfigError("no model given (use --preset or --config)");
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

json outcome_json(const RunOutcome& o, const Config& c, bool wall_clock) {
  json j;
  j["config_hash"] = hex64(c.hash());
  j["seed"] = o.seed;
  j["status"] = o.status;
  if (!o.message.empty()) j["message"] = o.message;
  j["dist"] = o.dist;
  j["init_dist"] = o.init_dist;
  j["sin_sq"] = o.sin_sq;
  j["per_entry_error"] = o.per_entry;
  j["loss"] = o.loss;
  j["recovered"] = o.recovered;
  j["iterations"] = o.iterations;
  j["clamps"] = o.clamps;
  j["wall_ms"] = wall_clock ? o.ms : 0.0;
  return j;
}

std::uint64_t master_seed(const Config& c) { return c.seed("seed", 0); }

std::size_t replicates(const Config& c) {
  const long long n = c.integer("seeds", 1);
  if (n < 1) throw ConfigError("seeds must be >= 1");
  return static_cast<std::size_t>(n);
}

int cmd_run(const CommonArgs& a) {
  const Config c = resolve(a);
  if (!c.with_prefix("grid.").empty())
    throw ConfigError("run takes a single configuration; this one has grid.* keys (use sweep or phase)");
  RunOptions ro{true, a.store_factors, a.wall_clock};
  const RunOutcome o = run_one(c, replicate_seed(master_seed(c), 0), ro);
  const fs::path dir(a.out);
  json rec = outcome_json(o, c, a.wall_clock);
  if (o.status == "ok") {
    write_file(dir / "trace.csv", trace_csv(o.trace));
    rec["trace_file"] = "trace.csv";  // relative to the output directory
  }
  write_file(dir / "run.json", rec.dump(2) + "\n");
  std::cout << rec.dump() << "\n";
  if (o.status == "diverged") {
    std::cerr << "lrpgd: solver diverged: " << o.message << "\n";
    return kExitDiverged;
  }
  if (o.status == "init-failed") {
    std::cerr << "lrpgd: initialization failed: " << o.message << "\n";
    return kExitInitFailed;
  }
  return 0;
}

int cmd_sweep(const CommonArgs& a) {
  const Config c = resolve(a);
  const auto points = expand_grid(c, "zip");
  const auto rows = run_grid(points, replicates(c), master_seed(c), RunOptions{});
  const fs::path dir(a.out);
  write_file(dir / "sweep.csv", sweep_rows_csv(points, rows));
  const std::string summary = sweep_summary_csv(points, rows);
  write_file(dir / "sweep_summary.csv", summary);
  std::cout << summary;
  return 0;
}

int cmd_phase(const CommonArgs& a) {
  const Config c = resolve(a);
  const auto points = expand_grid(c, "product");
  const auto rows = run_grid(points, replicates(c), master_seed(c), RunOptions{});
  const std::string table = phase_csv(points, rows);
  write_file(fs::path(a.out) / "phase.csv", table);
  std::cout << table;
  return 0;
}

int cmd_gradcheck(const CommonArgs& a, long long d_small) {
  const Config c = shrink_config(resolve(a), d_small);
  const GradcheckReport rep = model_gradcheck(c, replicate_seed(master_seed(c), 0));
  for (std::size_t i = 0; i < rep.errors.size(); ++i)
    std::cout << "point " << i << " rel_error " << fmt(rep.errors[i]) << "\n";
  std::cout << "max_rel_error " << fmt(rep.max_rel_error) << "\n";
  return rep.max_rel_error <= kGradcheckTol ? 0 : 1;
}

int cmd_probe(const CommonArgs& a, double fraction, int samples, double tau) {
  const Config c = resolve(a);
  ProbeConfig pc;
  pc.samples = samples;
  pc.tau = tau;
  pc.seed = split_seed(master_seed(c), 7);
  const ProbeReport r = model_probe(c, replicate_seed(master_seed(c), 0), pc, fraction);
  json j;
  j["config_hash"] = hex64(c.hash());
  j["radius_fraction"] = fraction;
  j["tau"] = tau;
  j["alpha"] = r.alpha;
  j["epsilon"] = r.epsilon;
  j["lipschitz"] = r.lipschitz;
  j["weak_lipschitz"] = r.weak_lipschitz;
  j["beta"] = r.beta;
  j["samples"] = r.samples;
  j["violations"] = r.violations;
  j["skipped"] = r.skipped;
  write_file(fs::path(a.out) / "probe.json", j.dump(2) + "\n");
  std::cout << j.dump() << "\n";
  return 0;
}

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--preset", a.preset, "Named preset (see 'lrpgd presets')");
  sub->add_option("--config", a.config_file, "key = value configuration file");
  sub->add_option("--set", a.assignments, "Override a key: --set key=value (repeatable)");
  sub->add_option("--seed", a.seed, "Master seed")->each([&a](const std::string&) { a.seed_given = true; });
  sub->add_option("--out", a.out, "Output directory");
  sub->add_flag("--desk", a.desk, "Apply the preset's desk-scale parameters");
  sub->add_flag("--store-factors", a.store_factors, "Keep iterates (fills the opt_err column)");
  sub->add_flag("--wall-clock", a.wall_clock, "Record wall time (output is then not reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projected gradient descent for factorized low-rank estimation"};
  app.require_subcommand(1);
  CommonArgs args;

  auto* run = app.add_subcommand("run", "Single run; writes trace.csv and run.json");
  auto* sweep = app.add_subcommand("sweep", "Zipped grid x seeds; writes sweep.csv and sweep_summary.csv");
  auto* phase = app.add_subcommand("phase", "Product grid of exact-recovery frequencies; writes phase.csv");
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  auto* prb = app.add_subcommand("probe", "Empirical descent/Lipschitz/smoothness constants");
  auto* list = app.add_subcommand("presets", "List presets");
  for (auto* s : {run, sweep, phase, grad, prb}) add_common(s, args);

  long long gradcheck_d = 30;
  grad->add_option("--dim", gradcheck_d, "Ambient dimension of the checked instance");
  double probe_fraction = 0.2;
  int probe_samples = 200;
  double probe_tau = 0.5;
  prb->add_option("--radius-fraction", probe_fraction, "Probe radius as a fraction of sigma_r");
  prb->add_option("--samples", probe_samples, "Sampled points");
  prb->add_option("--tau", probe_tau, "Radius parameter tau in (0,1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
    if (*run) return cmd_run(args);
    if (*sweep) return cmd_sweep(args);
    if (*phase) return cmd_phase(args);
    if (*grad) return cmd_gradcheck(args, gradcheck_d);
    if (*prb) return cmd_probe(args, probe_fraction, probe_samples, probe_tau);
  } catch (const ConfigError& e) {
    std::cerr << "lrpgd: invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const ParameterError& e) {
    std::cerr << "lrpgd: invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const DimensionError& e) {
    std::cerr << "lrpgd: invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "lrpgd: solver diverged: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "lrpgd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
