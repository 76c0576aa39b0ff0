#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/models/common.hpp"
#include "lrpgd/projections.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

/// Symmetric Bernoulli-masked observations Y = Theta* + W on Omega.
struct MaskedMatrix {
  Eigen::Index d = 0;
  double p = 1.0;
  double noise_sd = 0.0;
  std::vector<Entry> entries;  // i >= j; (j, i) implied
};

struct CompletionProblem {
  MaskedMatrix data;
  GroundTruth truth;
};

inline CompletionProblem generate_completion(Eigen::Index d, Eigen::Index r, double p,
                                             double sigma, std::uint64_t seed) {
  detail::require(sigma >= 0.0, "generate_completion: sigma must be >= 0");
  Rng rng(seed);
  GroundTruth gt = make_ground_truth(random_orthonormal(d, r, rng));
  MaskedMatrix data{d, p, sigma, sample_symmetric_mask(d, p, rng)};
  for (Entry& e : data.entries) {
    e.value = gt.factor.row(e.i).dot(gt.factor.row(e.j));
    if (sigma > 0.0) e.value += sigma * rng.normal();
  }
  return {std::move(data), std::move(gt)};
}

/// L(F) = (1/2p) sum_{(i,j) in Omega} ((F F^T)_ij - Y_ij)^2 over a row-clipped set.
class MatrixCompletion {
 public:
  MatrixCompletion(MaskedMatrix data, RowClipSpec spec)
      : data_(std::move(data)), spec_(spec) {}

  LossGrad loss_grad(const Factor& f) const {
    detail::require_dims(f.rows() == data_.d, "MatrixCompletion: shape mismatch");
    const RowMajorMatrix fr = f;
    RowMajorMatrix g = RowMajorMatrix::Zero(f.rows(), f.cols());
    double sq = 0.0;
    for (const Entry& e : data_.entries) {
      const double res = fr.row(e.i).dot(fr.row(e.j)) - e.value;
      if (e.i == e.j) {
        sq += res * res;
        g.row(e.i) += res * fr.row(e.i);
      } else {
        sq += 2.0 * res * res;
        g.row(e.i) += res * fr.row(e.j);
        g.row(e.j) += res * fr.row(e.i);
      }
    }
    return {0.5 * sq / data_.p, (2.0 / data_.p) * Factor(g), 0};
  }

  Factor project(const Factor& f) const { return clip_rows(f, spec_); }

  /// The reference step 0.5/p multiplies P_Omega(F F^T - Y) F; on the gradient above,
  /// which carries an extra 2/p, the same update has step (0.5/p) * (p/2).
  double caption_step() const { return 0.5 / data_.p; }
  double step_unit() const { return 0.5 * data_.p; }

  const MaskedMatrix& data() const { return data_; }
  const RowClipSpec& spec() const { return spec_; }

 private:
  MaskedMatrix data_;
  RowClipSpec spec_;
};

/// Top-r spectral factor of (1/p) P_Omega(Y), clipped to the row set it defines.
inline ClippedInit init_svd(const MaskedMatrix& data, Eigen::Index r, double mu) {
  detail::require(!data.entries.empty(), "init_svd: empty observation set");
  return clipped_spectral_init(densify(data.d, data.entries, 1.0 / data.p), r, mu, r);
}

/// (1/d^2) ||F F^T - theta* theta*^T||_F^2
inline double per_entry_error(const Factor& f, const GroundTruth& gt) {
  detail::require_dims(f.rows() == gt.rows(), "per_entry_error: shape mismatch");
  const double d = static_cast<double>(f.rows());
  const Matrix diff = f * f.transpose() - gt.factor * gt.factor.transpose();
  return diff.squaredNorm() / (d * d);
}

}  // namespace lrpgd
