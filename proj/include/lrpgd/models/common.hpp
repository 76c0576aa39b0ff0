#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/projections.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

/// One observed symmetric pair, stored with i >= j.
struct Entry {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double value = 0.0;
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Each pair i >= j is included independently with probability p (column by column).
inline std::vector<Entry> sample_symmetric_mask(Eigen::Index d, double p, Rng& rng) {
  detail::require(p > 0.0 && p <= 1.0, "observation probability must lie in (0, 1]");
  std::vector<Entry> out;
  out.reserve(static_cast<std::size_t>(p * static_cast<double>(d) * (d + 1) / 2 * 1.1) + 16);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = j; i < d; ++i)
      if (rng.bernoulli(p)) out.push_back({i, j, 0.0});
  return out;
}

/// Dense symmetric matrix with `scale * value` on the mask and 0 elsewhere.
inline Matrix densify(Eigen::Index d, const std::vector<Entry>& entries, double scale = 1.0) {
  Matrix m = Matrix::Zero(d, d);
  for (const Entry& e : entries) {
    m(e.i, e.j) = scale * e.value;
    m(e.j, e.i) = scale * e.value;
  }
  return m;
}

/// An initial factor together with the row-clipping set it defines.
struct ClippedInit {
  Factor factor;
  RowClipSpec spec;
};

/// P_F(U S^{1/2}) with rho = sqrt(2 mu / d) ||U S^{1/2}||_F.
inline ClippedInit clipped_spectral_init(const Matrix& sym, Eigen::Index r, double mu,
                                         Eigen::Index min_positive) {
  const Factor raw = sqrt_factor(top_eigenpairs(sym, r), min_positive);
  const RowClipSpec spec = row_clip_radius(mu, sym.rows(), raw.norm());
  return {clip_rows(raw, spec), spec};
}

/// P_F(random orthonormal) with rho = sqrt(2 mu / d) sqrt(r).
inline ClippedInit clipped_random_init(Eigen::Index d, Eigen::Index r, double mu,
                                       std::uint64_t seed) {
  const Factor raw = random_orthonormal(d, r, seed);
  const RowClipSpec spec = row_clip_radius(mu, d, raw.norm());
  return {clip_rows(raw, spec), spec};
}

}  // namespace lrpgd
