#pragma once

#include <string>
#include <vector>

#include "lrpgd/experiment/config.hpp"

namespace lrpgd::experiment {

struct Preset {
  const char* name;
  const char* description;
  const char* body;  // full-size parameters; desk.* keys hold the scaled-down values
};

// Each body stores the full-size simulation parameters. Keys prefixed "desk."
// replace their unprefixed counterpart under --desk.
inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"fig-mc-conv", "matrix completion convergence, SVD init",
       R"(model = mc
d = 1000
r = 10
p = 0.1
sigma_scale = 0.01
init = svd
step = caption
iters = 50
seeds = 1
desk.d = 200
desk.r = 5
desk.p = 0.2
desk.iters = 150
)"},
      {"fig-mc-scale", "matrix completion per-entry error versus r/d",
       R"(model = mc
p = 0.1
sigma = 0.001
init = svd
step = caption
iters = 500
seeds = 20
grid.d = 500, 1000, 2000
grid.r = 5, 10, 20
desk.grid.d = 100, 200, 400
desk.grid.r = 2, 4, 8
)"},
      {"fig-spca-conv", "sparse PCA convergence, diagonal thresholding init",
       R"(model = sparse-pca
d = 5000
r = 1
k = 5
gamma = 4
n = 4000
init = diag-threshold
step = caption
iters = 100
seeds = 1
desk.d = 500
)"},
      {"fig-spca-scale", "sparse PCA error versus k/n",
       R"(model = sparse-pca
d = 5000
r = 1
k = 5
gamma = 4
init = diag-threshold
step = caption
iters = 100
seeds = 20
grid.n = 1000, 2000, 4000
desk.d = 500
)"},
      {"fig-planted-conv", "planted densest subgraph convergence, SVD init",
       R"(model = planted
d = 8000
k = 2000
p = 0.13
q = 0.05
init = svd
step = caption
iters = 300
seeds = 1
desk.d = 400
desk.k = 200
)"},
      {"fig-planted-phase", "planted densest subgraph exact recovery versus p d",
       R"(model = planted
d = 2000
k_frac = 0.5
q_ratio = 0.25
init = svd
step = caption
iters = 300
seeds = 20
grid.pd = 4, 8, 16, 32, 64, 128
desk.d = 400
desk.grid.pd = 2, 4, 8, 16, 40, 80, 120
)"},
      {"fig-ob-conv", "one-bit matrix completion convergence, random init",
       R"(model = one-bit
d = 1000
r = 3
p = 0.5
sigma_scale = 0.5
link = logistic
init = random
step = caption
iters = 1000
seeds = 1
desk.d = 200
)"},
      {"fig-ob-scale", "one-bit matrix completion per-entry error versus (r/d)^3",
       R"(model = one-bit
p = 0.5
sigma_scale = 0.5
link = logistic
init = random
step = caption
iters = 1000
seeds = 20
grid.d = 1000, 2000, 3000
grid.r = 3, 4, 5
desk.grid.d = 400, 800
desk.grid.r = 2, 2
)"},
      {"fig-ls-conv", "matrix decomposition convergence, hard-threshold init",
       R"(model = decomposition
d = 600
r = 5
k = 100
spike_scale = 10
sigma_scale = 0.1
init = hard-threshold
step = caption
iters = 300
seeds = 1
desk.d = 300
desk.k = 50
)"},
      {"fig-ls-phase", "matrix decomposition exact recovery versus k/d",
       R"(model = decomposition
d = 600
r = 6
sigma = 0
spike_scale = 10
init = hard-threshold
step = caption
iters = 300
seeds = 20
grid.k_frac = 0.01, 0.02, 0.05, 0.1, 0.2, 0.5
desk.d = 200
desk.grid.k_frac = 0.02, 0.05, 0.1, 0.2, 0.5
)"},
  };
  return all;
}

inline const Preset* find_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (name == p.name) return &p;
  return nullptr;
}

/// Moves desk.* keys over their counterparts (desk = true) or drops them.
inline Config resolve_desk(const Config& cfg, bool desk) {
  Config out;
  for (const auto& [k, v] : cfg.values())
    if (k.rfind("desk.", 0) != 0) out.set(k, v);
  if (desk) {
    // A desk grid replaces the whole full-size grid.
    const auto overrides = cfg.with_prefix("desk.");
    bool desk_grid = false;
    for (const auto& [k, v] : overrides) desk_grid = desk_grid || k.rfind("grid.", 0) == 0;
    if (desk_grid)
      for (const auto& [k, v] : cfg.with_prefix("grid.")) out.erase("grid." + k);
    for (const auto& [k, v] : overrides) out.set(k, v);
  }
  return out;
}

inline Config load_preset(const std::string& name) {
  const Preset* p = find_preset(name);
  if (!p) throw ConfigError("unknown preset '" + name + "'");
  return Config::parse_string(p->body, name);
}

}  // namespace lrpgd::experiment
