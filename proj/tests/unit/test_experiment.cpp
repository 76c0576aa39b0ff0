#include <gtest/gtest.h>

#include "lrpgd/experiment/config.hpp"
#include "lrpgd/experiment/presets.hpp"
#include "lrpgd/experiment/runner.hpp"

using namespace lrpgd;
using namespace lrpgd::experiment;

TEST(Config, HashIgnoresOrderAndWhitespace) {
  const Config a = Config::parse_string("d = 10\nr=2\n# comment\n");
  const Config b = Config::parse_string("r = 2\n\n  d=10   # trailing\n");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.canonical(), "d = 10\nr = 2\n");
  EXPECT_EQ(hex64(a.hash()).size(), 16u);
  Config c = a;
  c.set("d", "11");
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, ParseErrors) {
  EXPECT_THROW(Config::parse_string("no equals sign\n"), ConfigError);
  EXPECT_THROW(Config::parse_string(" = 3\n"), ConfigError);
  const Config c = Config::parse_string("d = ten\nseed = -1\n");
  EXPECT_THROW(c.integer("d"), ConfigError);
  EXPECT_THROW(c.seed("seed", 0), ConfigError);
  EXPECT_THROW(c.num("missing"), ConfigError);
  Config s;
  EXPECT_THROW(s.set_assignment("novalue"), ConfigError);
}

TEST(Grid, ZipAndProduct) {
  const Config c = Config::parse_string("model = mc\ngrid.d = 10, 20\ngrid.r = 1, 2\n");
  const auto zip = expand_grid(c, "zip");
  ASSERT_EQ(zip.size(), 2u);
  EXPECT_EQ(zip[1].config.str("d"), "20");
  EXPECT_EQ(zip[1].config.str("r"), "2");
  EXPECT_FALSE(zip[0].config.has("grid.d"));
  EXPECT_EQ(expand_grid(c, "product").size(), 4u);

  Config bad = c;
  bad.set("grid.r", "1, 2, 3");
  EXPECT_THROW(expand_grid(bad, "zip"), ConfigError);
  EXPECT_EQ(expand_grid(bad, "product").size(), 6u);
}

TEST(Presets, DeskResolution) {
  const Config full = resolve_desk(load_preset("fig-mc-scale"), false);
  EXPECT_EQ(full.str("grid.d"), "500, 1000, 2000");
  EXPECT_TRUE(full.with_prefix("desk.").empty());
  const Config desk = resolve_desk(load_preset("fig-mc-scale"), true);
  EXPECT_EQ(desk.str("grid.d"), "100, 200, 400");
  EXPECT_THROW(load_preset("no-such-preset"), ConfigError);
  for (const Preset& p : presets()) EXPECT_NO_THROW(resolve_desk(load_preset(p.name), true));
}

TEST(Seeds, ReplicateSeedsAreDistinct) {
  EXPECT_EQ(replicate_seed(5, 3), split_seed(5, 3));
  EXPECT_NE(replicate_seed(5, 3), replicate_seed(5, 4));
}

TEST(Runner, SmallCompletionRun) {
  const Config c = Config::parse_string("model = mc\nd = 40\nr = 2\np = 0.5\nsigma = 0\niters = 200\n");
  const RunOutcome o = run_one(c, 1, RunOptions{true, false, false});
  EXPECT_EQ(o.status, "ok");
  EXPECT_LT(o.dist, 1e-6);
  EXPECT_FALSE(o.trace.empty());
  EXPECT_EQ(trace_csv(o.trace).substr(0, trace_csv(o.trace).find('\n')), kTraceHeader);
}

TEST(Runner, InvalidConfigsRejected) {
  EXPECT_THROW(run_one(Config::parse_string("model = nope\nd = 10\nr = 1\n"), 1), ConfigError);
  EXPECT_THROW(run_one(Config::parse_string("model = mc\nd = 5\nr = 6\np = 0.5\n"), 1), ConfigError);
}

TEST(Sweep, SinglePointMatchesRun) {
  const Config c = Config::parse_string("model = mc\nd = 30\nr = 2\np = 0.6\nsigma = 0.01\niters = 50\n");
  const auto points = expand_grid(c, "zip");
  ASSERT_EQ(points.size(), 1u);
  const auto rows = run_grid(points, 2, 7, RunOptions{});
  ASSERT_EQ(rows.size(), 2u);
  const RunOutcome single = run_one(c, replicate_seed(7, 1));
  EXPECT_EQ(rows[1].outcome.dist, single.dist);
  EXPECT_EQ(rows[1].outcome.seed, single.seed);
}

TEST(Output, CsvHeaders) {
  const Config c = Config::parse_string("model = ls\nd = 20\nr = 1\nk = 1\nsigma = 0\niters = 20\ngrid.k = 1, 2\n");
  const auto points = expand_grid(c, "product");
  const auto rows = run_grid(points, 1, 3, RunOptions{});
  const std::string sweep = sweep_rows_csv(points, rows);
  EXPECT_EQ(sweep.substr(0, sweep.find('\n')),
            "point,replicate,seed,k,status,dist,sin_sq,per_entry,loss,recovered,iters,clamps");
  const std::string phase = phase_csv(points, rows);
  EXPECT_EQ(phase.substr(0, phase.find('\n')), "cell,k,trials,recovered,frequency");
  const std::string summary = sweep_summary_csv(points, rows);
  EXPECT_EQ(summary.substr(0, summary.find(',')), "point");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 3);
}

TEST(Gradcheck, ShrunkPresetsPass) {
  for (const char* name : {"fig-mc-conv", "fig-spca-conv"}) {
    const Config c = shrink_config(resolve_desk(load_preset(name), true), 20);
    EXPECT_LT(model_gradcheck(c, 3, 3).max_rel_error, 1e-4) << name;
  }
}
