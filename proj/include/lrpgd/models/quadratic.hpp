#pragma once

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"

namespace lrpgd {

/// L(F) = ||F - target||_F^2 with no constraint; a strongly convex test model.
class QuadraticToy {
 public:
  explicit QuadraticToy(Factor target) : target_(std::move(target)) {}

  LossGrad loss_grad(const Factor& f) const {
    detail::require_dims(f.rows() == target_.rows() && f.cols() == target_.cols(),
                         "QuadraticToy: shape mismatch");
    const Factor diff = f - target_;
    return {diff.squaredNorm(), 2.0 * diff, 0};
  }
  Factor project(const Factor& f) const { return f; }

  const Factor& target() const { return target_; }

 private:
  Factor target_;
};

}  // namespace lrpgd
