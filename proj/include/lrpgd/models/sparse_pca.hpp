#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/projections.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

/// Sample covariance of n draws from N(0, gamma theta* theta*^T + I).
struct SpikedModel {
  Eigen::Index d = 0;
  Eigen::Index k = 0;
  double snr = 1.0;
  Eigen::Index n = 0;
  std::vector<Eigen::Index> support;  // sorted
  Matrix sample_cov;
};

struct SpikedProblem {
  SpikedModel data;
  GroundTruth truth;
};

inline double l21_norm(const Factor& f) { return f.rowwise().norm().sum(); }

inline SpikedProblem generate_spiked(Eigen::Index d, Eigen::Index r, Eigen::Index k, double snr,
                                     Eigen::Index n, std::uint64_t seed) {
  if (k < r) throw ParameterError("generate_spiked: need k >= r for an orthonormal support");
  detail::require_dims(k <= d, "generate_spiked: need k <= d");
  detail::require(snr > 0.0, "generate_spiked: snr must be positive");
  detail::require_dims(n >= 1, "generate_spiked: need n >= 1");
  Rng rng(seed);
  SpikedModel m;
  m.d = d;
  m.k = k;
  m.snr = snr;
  m.n = n;
  for (std::size_t idx : rng.sample_without_replacement(static_cast<std::size_t>(d),
                                                        static_cast<std::size_t>(k)))
    m.support.push_back(static_cast<Eigen::Index>(idx));
  const Factor block = random_orthonormal(k, r, rng);
  Factor theta = Factor::Zero(d, r);
  for (Eigen::Index a = 0; a < k; ++a) theta.row(m.support[a]) = block.row(a);

  // x = z + sqrt(gamma) theta w with z ~ N(0, I_d), w ~ N(0, I_r); accumulated in blocks.
  const Eigen::Index block_rows = 256;
  const double s = std::sqrt(snr);
  m.sample_cov = Matrix::Zero(d, d);
  for (Eigen::Index start = 0; start < n; start += block_rows) {
    const Eigen::Index b = std::min(block_rows, n - start);
    Matrix x(b, d);
    for (Eigen::Index i = 0; i < b; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.normal();
      Vector w(r);
      for (Eigen::Index j = 0; j < r; ++j) w(j) = rng.normal();
      x.row(i) += s * (theta * w).transpose();
    }
    m.sample_cov.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  }
  m.sample_cov.triangularView<Eigen::StrictlyUpper>() = m.sample_cov.transpose();
  m.sample_cov /= static_cast<double>(n);
  return {std::move(m), make_ground_truth(std::move(theta))};
}

/// L(F) = -<Sigma_hat, F F^T> over {||F||_op <= 1} n {||F||_{2,1} <= R}.
class SparsePca {
 public:
  SparsePca(SpikedModel data, SpectralL21Spec spec) : data_(std::move(data)), spec_(spec) {}

  LossGrad loss_grad(const Factor& f) const {
    detail::require_dims(f.rows() == data_.d, "SparsePca: shape mismatch");
    const Matrix sf = data_.sample_cov * f;
    return {-(f.cwiseProduct(sf)).sum(), -2.0 * sf, 0};
  }

  Factor project(const Factor& f) const { return project_spectral_l21(f, spec_).point; }

  double caption_step() const { return 0.5 * data_.snr / ((data_.snr + 1.0) * (data_.snr + 1.0)); }
  double step_unit() const { return 1.0; }

  const SpikedModel& data() const { return data_; }
  const SpectralL21Spec& spec() const { return spec_; }

 private:
  SpikedModel data_;
  SpectralL21Spec spec_;
};

/// Constraint set with the l21 radius set to the true ||theta*||_{2,1}.
inline SpectralL21Spec sparse_pca_spec(const GroundTruth& gt) {
  SpectralL21Spec spec;
  spec.spectral_radius = 1.0;
  spec.l21_radius = l21_norm(gt.factor);
  return spec;
}

/// Top-r eigenvectors of the principal submatrix on the k largest diagonal entries.
inline Factor init_diag_threshold(const SpikedModel& m, Eigen::Index r,
                                  const SpectralL21Spec& spec) {
  detail::require_dims(r >= 1 && r <= m.k, "init_diag_threshold: need 1 <= r <= k");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Vector diag = m.sample_cov.diagonal();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return diag(a) > diag(b); });
  order.resize(static_cast<std::size_t>(m.k));
  std::sort(order.begin(), order.end());

  Matrix sub(m.k, m.k);
  for (Eigen::Index a = 0; a < m.k; ++a)
    for (Eigen::Index b = 0; b < m.k; ++b) sub(a, b) = m.sample_cov(order[a], order[b]);
  const EigenPairs top = top_eigenpairs(sub, r);
  if ((top.values.array() > 0.0).count() < r)
    throw DegenerateError("init_diag_threshold: fewer than r positive eigenvalues");
  Factor f = Factor::Zero(m.d, r);
  for (Eigen::Index a = 0; a < m.k; ++a) f.row(order[a]) = top.vectors.row(a);
  return project_spectral_l21(f, spec).point;
}

/// theta0_R = theta*_R + E1/sqrt(2), theta0_{R^c} = E2/sqrt(2) with unit-Frobenius E1, E2.
inline Factor init_perturbed(const SpikedModel& m, const GroundTruth& gt,
                             const SpectralL21Spec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index r = gt.rank();
  Matrix e1 = rng.gaussian(m.k, r);
  Matrix e2 = rng.gaussian(m.d - m.k, r);
  e1 /= e1.norm();
  if (e2.size() > 0) e2 /= e2.norm();
  Factor f = gt.factor;
  std::vector<bool> on(static_cast<std::size_t>(m.d), false);
  for (Eigen::Index a = 0; a < m.k; ++a) {
    on[m.support[a]] = true;
    f.row(m.support[a]) += e1.row(a) / std::numbers::sqrt2;
  }
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < m.d; ++i)
    if (!on[i]) f.row(i) += e2.row(c++) / std::numbers::sqrt2;
  return project_spectral_l21(f, spec).point;
}

}  // namespace lrpgd
