#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrpgd/core.hpp"
#include "lrpgd/solver.hpp"

namespace lrpgd {

/// Central finite-difference gradient of the model loss, one coordinate at a time.
template <LossModel Model>
Factor finite_difference_grad(const Model& model, const Factor& f, double h = 1e-5) {
  Factor g(f.rows(), f.cols());
  Factor probe = f;
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      const double step = h * std::max(1.0, std::abs(f(i, j)));
      probe(i, j) = f(i, j) + step;
      const double up = model.loss_grad(probe).loss;
      probe(i, j) = f(i, j) - step;
      const double down = model.loss_grad(probe).loss;
      probe(i, j) = f(i, j);
      g(i, j) = (up - down) / (2.0 * step);
    }
  return g;
}

/// ||g_fd - g|| / max(||g||, ||g_fd||, floor)
inline double gradient_rel_error(const Factor& analytic, const Factor& numeric,
                                 double floor = 1e-12) {
  const double scale = std::max({analytic.norm(), numeric.norm(), floor});
  return (analytic - numeric).norm() / scale;
}

/// Largest relative error over the supplied points.
template <LossModel Model>
double gradcheck(const Model& model, const std::vector<Factor>& points, double h = 1e-5) {
  double worst = 0.0;
  for (const Factor& f : points)
    worst = std::max(worst, gradient_rel_error(model.loss_grad(f).grad,
                                               finite_difference_grad(model, f, h)));
  return worst;
}

}  // namespace lrpgd
