#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include "lrpgd/core.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

/// n symmetric d x d designs stored as the columns of a d^2 x n matrix.
struct SensingData {
  Eigen::Index d = 0;
  Matrix designs;  // column i = vec(X_i), column-major vec
  Vector y;
  double noise_sd = 0.0;

  Eigen::Index n() const { return designs.cols(); }
  Eigen::Map<const Matrix> design(Eigen::Index i) const {
    return Eigen::Map<const Matrix>(designs.col(i).data(), d, d);
  }
};

/// <X_i, M> for every design.
inline Vector sensing_operator(const SensingData& data, const Matrix& m) {
  const Eigen::Map<const Vector> vec(m.data(), m.size());
  return data.designs.transpose() * vec;
}

struct SensingProblem {
  SensingData data;
  GroundTruth truth;
};

/// theta* = Q diag(singular_values) with Q Haar; X_i = (G + G^T)/2, G iid N(0,1);
/// y_i = <X_i, theta* theta*^T> + N(0, sigma^2).
inline SensingProblem generate_sensing(Eigen::Index d, Eigen::Index r, Eigen::Index n,
                                       double sigma, std::uint64_t seed,
                                       std::optional<Vector> singular_values = std::nullopt) {
  detail::require_dims(n >= 1, "generate_sensing: need n >= 1");
  detail::require(sigma >= 0.0, "generate_sensing: sigma must be >= 0");
  Rng rng(seed);
  Factor theta = random_orthonormal(d, r, rng);
  if (singular_values) {
    detail::require_dims(singular_values->size() == r, "generate_sensing: singular value count");
    theta = theta * singular_values->asDiagonal();
  }
  SensingProblem out{SensingData{d, Matrix(d * d, n), Vector(n), sigma},
                     make_ground_truth(std::move(theta))};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix g = rng.gaussian(d, d);
    const Matrix x = 0.5 * (g + g.transpose());
    out.data.designs.col(i) = Eigen::Map<const Vector>(x.data(), x.size());
  }
  const Matrix m = out.truth.factor * out.truth.factor.transpose();
  out.data.y = sensing_operator(out.data, m);
  if (sigma > 0.0)
    for (Eigen::Index i = 0; i < n; ++i) out.data.y(i) += sigma * rng.normal();
  return out;
}

/// L(F) = (1/2n) sum_i (<X_i, F F^T> - y_i)^2, unconstrained.
class MatrixRegression {
 public:
  explicit MatrixRegression(SensingData data) : data_(std::move(data)) {}

  /// (1/n) sum_i (<X_i, M> - y_i) X_i
  Matrix grad_m(const Matrix& m, double* loss = nullptr) const {
    const Vector resid = sensing_operator(data_, m) - data_.y;
    const double n = static_cast<double>(data_.n());
    if (loss) *loss = 0.5 * resid.squaredNorm() / n;
    const Vector g = data_.designs * resid / n;
    return Eigen::Map<const Matrix>(g.data(), data_.d, data_.d);
  }

  LossGrad loss_grad(const Factor& f) const {
    detail::require_dims(f.rows() == data_.d, "MatrixRegression: shape mismatch");
    LossGrad out;
    const Matrix gm = grad_m(f * f.transpose(), &out.loss);
    out.grad = 2.0 * gm * f;
    return out;
  }
  Factor project(const Factor& f) const { return f; }

  /// Practical constant step c / sigma_1(theta0)^2.
  static double default_step(const Factor& init, double c = 0.25) {
    const double s = thin_svd(init).singular_values(0);
    detail::require(s > 0.0, "default_step: zero initial factor");
    return c / (s * s);
  }
  double step_unit() const { return 1.0; }

  const SensingData& data() const { return data_; }

 private:
  SensingData data_;
};

/// theta0 = U S^{1/2} from the top-r eigenpairs of (1/n) sum_i y_i X_i.
inline Factor init_svd(const SensingData& data, Eigen::Index r) {
  const Vector s = data.designs * data.y / static_cast<double>(data.n());
  Matrix m = Eigen::Map<const Matrix>(s.data(), data.d, data.d);
  m = 0.5 * (m + m.transpose());
  return sqrt_factor(top_eigenpairs(m, r), 1);
}

/// | ||X(M)||^2 / n - 1 | for M rescaled to unit Frobenius norm.
inline double rip_deviation(const SensingData& data, const Matrix& m) {
  const double nrm = m.norm();
  detail::require(nrm > 0.0, "rip_deviation: zero matrix");
  const Matrix u = m / nrm;
  return std::abs(sensing_operator(data, u).squaredNorm() / static_cast<double>(data.n()) - 1.0);
}

/// Empirical RIP constant: max deviation over random rank-k unit-Frobenius G G^T.
inline double rip_estimate(const SensingData& data, Eigen::Index rank_k, int trials,
                           std::uint64_t seed) {
  detail::require(trials >= 1, "rip_estimate: trials must be >= 1");
  detail::require_dims(rank_k >= 1 && rank_k <= data.d, "rip_estimate: need 1 <= k <= d");
  Rng rng(seed);
  double delta = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Matrix g = rng.gaussian(data.d, rank_k);
    delta = std::max(delta, rip_deviation(data, g * g.transpose()));
  }
  return delta;
}

}  // namespace lrpgd
