#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/models/common.hpp"
#include "lrpgd/projections.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

/// Y = theta* theta*^T + S* + W with column l1 budgets R_j.
struct CorruptedMatrix {
  Eigen::Index d = 0;
  Matrix y;
  Vector radii;
  double noise_sd = 0.0;
};

struct DecompositionProblem {
  CorruptedMatrix data;
  GroundTruth truth;
  Matrix sparse;  // S*
};

/// Symmetric sparse corruption with k d / 2 off-diagonal pairs and at most k
/// nonzeros per row. Pairs are drawn uniformly with rejection; if that stalls, the
/// remaining budget is filled by a scan from a random starting row.
inline Matrix sample_sparse_corruption(Eigen::Index d, Eigen::Index k, double max_value,
                                       Rng& rng) {
  if (k < 0 || k > d - 1)
    throw ParameterError("sparse corruption: need 0 <= k <= d - 1 nonzeros per row");
  Matrix s = Matrix::Zero(d, d);
  std::vector<Eigen::Index> count(static_cast<std::size_t>(d), 0);
  const Eigen::Index target = k * d / 2;
  Eigen::Index placed = 0;
  auto try_place = [&](Eigen::Index i, Eigen::Index j) {
    if (i == j || s(i, j) != 0.0 || count[i] >= k || count[j] >= k) return;
    const double v = rng.uniform(0.0, max_value);
    if (v == 0.0) return;
    s(i, j) = s(j, i) = v;
    ++count[i];
    ++count[j];
    ++placed;
  };
  const std::size_t dd = static_cast<std::size_t>(d);
  for (Eigen::Index tries = 0; placed < target && tries < 100 * target; ++tries)
    try_place(static_cast<Eigen::Index>(rng.index(dd)), static_cast<Eigen::Index>(rng.index(dd)));
  const Eigen::Index start = static_cast<Eigen::Index>(d > 0 ? rng.index(dd) : 0);
  for (Eigen::Index a = 0; a < d && placed < target; ++a)
    for (Eigen::Index j = 0; j < d && placed < target; ++j) try_place((start + a) % d, j);
  return s;
}

inline DecompositionProblem generate_decomposition(Eigen::Index d, Eigen::Index r, Eigen::Index k,
                                                   double spike_scale, double sigma,
                                                   std::uint64_t seed) {
  detail::require(sigma >= 0.0 && spike_scale >= 0.0,
                  "generate_decomposition: sigma and spike_scale must be >= 0");
  Rng rng(seed);
  GroundTruth gt = make_ground_truth(random_orthonormal(d, r, rng));
  Matrix s = sample_sparse_corruption(d, k, spike_scale * static_cast<double>(r) / d, rng);
  Matrix y = gt.factor * gt.factor.transpose() + s;
  if (sigma > 0.0)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index i = j; i < d; ++i) {
        const double w = sigma * rng.normal();
        y(i, j) += w;
        if (i != j) y(j, i) += w;
      }
  Vector radii = s.cwiseAbs().colwise().sum().transpose();
  return {CorruptedMatrix{d, std::move(y), std::move(radii), sigma}, std::move(gt), std::move(s)};
}

/// L(F) = 1/2 min_{S in S} ||Y - F F^T - S||_F^2 over a row-clipped set, where S
/// bounds the l1 norm of every column.
class MatrixDecomposition {
 public:
  MatrixDecomposition(CorruptedMatrix data, RowClipSpec spec)
      : data_(std::move(data)), spec_(spec) {}

  /// Minimizing S for the current residual.
  Matrix inner_minimizer(const Factor& f) const {
    return project_columns_l1(data_.y - f * f.transpose(), data_.radii);
  }

  LossGrad loss_grad(const Factor& f) const {
    detail::require_dims(f.rows() == data_.d, "MatrixDecomposition: shape mismatch");
    const Matrix resid = data_.y - f * f.transpose();
    const Matrix gm = project_columns_l1(resid, data_.radii) - resid;  // grad in M
    // The column projection of a symmetric residual need not be symmetric.
    return {0.5 * gm.squaredNorm(), (gm + gm.transpose()) * f, 0};
  }

  Factor project(const Factor& f) const { return clip_rows(f, spec_); }

  /// The reference step 1 multiplies grad_M L * F; loss_grad returns twice that.
  double caption_step() const { return 1.0; }
  double step_unit() const { return 0.5; }

  const CorruptedMatrix& data() const { return data_; }
  const RowClipSpec& spec() const { return spec_; }

 private:
  CorruptedMatrix data_;
  RowClipSpec spec_;
};

/// Clip Y entrywise at mu r / d, then take the clipped top-r spectral factor.
inline ClippedInit init_hard_threshold(const CorruptedMatrix& data, Eigen::Index r, double mu) {
  detail::require(mu > 0.0, "init_hard_threshold: mu must be positive");
  const double level = mu * static_cast<double>(r) / static_cast<double>(data.d);
  const Matrix clipped = data.y.cwiseMax(-level).cwiseMin(level);
  return clipped_spectral_init(clipped, r, mu, 1);
}

}  // namespace lrpgd
