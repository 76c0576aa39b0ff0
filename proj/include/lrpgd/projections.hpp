#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "lrpgd/core.hpp"

namespace lrpgd {

struct RowClipSpec {
  double radius = 1.0;
};

struct SpectralL21Spec {
  double spectral_radius = 1.0;
  double l21_radius = 1.0;
  int dykstra_max_iters = 500;
  double dykstra_tol = 1e-10;
};

struct BoxSimplexSpec {
  double mass = 1.0;  // sum of coordinates
};

/// rho = sqrt(2 mu / d) * ||theta0||_F
inline RowClipSpec row_clip_radius(double mu, Eigen::Index d, double init_frobenius) {
  detail::require(mu > 0.0 && d > 0, "row_clip_radius: mu and d must be positive");
  return {std::sqrt(2.0 * mu / static_cast<double>(d)) * init_frobenius};
}

/// Rescales rows whose l2 norm exceeds the radius onto the sphere.
inline Factor clip_rows(const Factor& f, const RowClipSpec& spec) {
  detail::require(spec.radius > 0.0, "clip_rows: radius must be positive");
  Factor out = f;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (n > spec.radius) out.row(i) *= spec.radius / n;
  }
  return out;
}

namespace detail {

/// Threshold lambda with sum_i max(u_i - lambda, 0) = radius for u >= 0,
/// assuming sum u > radius. Exact via sorting.
inline double l1_threshold(std::vector<double> u, double radius) {
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - radius) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return std::max(theta, 0.0);
}

}  // namespace detail

/// Euclidean projection onto {x : ||x||_1 <= radius} (sort + soft-threshold).
inline Vector project_l1_ball(const Vector& v, double radius) {
  detail::require(radius >= 0.0, "project_l1_ball: radius must be nonnegative");
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v(i));
  const double lambda = detail::l1_threshold(std::move(u), radius);
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::max(std::abs(v(i)) - lambda, 0.0);
    out(i) = v(i) < 0.0 ? -a : a;
  }
  return out;
}

/// Column j projected onto the l1 ball of radius radii(j).
inline Matrix project_columns_l1(const Matrix& s, const Vector& radii) {
  detail::require_dims(radii.size() == s.cols(), "project_columns_l1: radii length mismatch");
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index j = 0; j < s.cols(); ++j) out.col(j) = project_l1_ball(s.col(j), radii(j));
  return out;
}

/// Projection onto {x in [0,1]^d : sum x = mass}; x_i = clip(v_i - lambda, 0, 1).
inline Vector project_box_simplex(const Vector& v, const BoxSimplexSpec& spec) {
  const Eigen::Index d = v.size();
  const double k = spec.mass;
  if (!(k > 0.0) || k > static_cast<double>(d))
    throw ParameterError("project_box_simplex: mass must lie in (0, d]");

  auto mass_at = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) s += std::clamp(v(i) - lambda, 0.0, 1.0);
    return s;
  };
  auto apply = [&](double lambda) {
    Vector x(d);
    for (Eigen::Index i = 0; i < d; ++i) x(i) = std::clamp(v(i) - lambda, 0.0, 1.0);
    return x;
  };
  if (k == static_cast<double>(d)) return Vector::Ones(d);

  // mass_at is nonincreasing and piecewise linear with kinks at v_i and v_i - 1.
  std::vector<double> kinks;
  kinks.reserve(2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    kinks.push_back(v(i));
    kinks.push_back(v(i) - 1.0);
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());

  // Largest kink index whose mass is still >= k; mass(front) = d > k, mass(back) = 0 < k.
  std::size_t lo = 0, hi = kinks.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (mass_at(kinks[mid]) >= k) lo = mid;
    else hi = mid;
  }
  const double m_lo = mass_at(kinks[lo]);
  const double m_hi = mass_at(kinks[hi]);
  double lambda;
  if (m_lo == m_hi) {
    lambda = kinks[lo];
  } else {
    lambda = kinks[lo] + (m_lo - k) / (m_lo - m_hi) * (kinks[hi] - kinks[lo]);
  }
  Vector x = apply(lambda);
  // Interpolation is exact in exact arithmetic; polish rounding with bisection if needed.
  if (std::abs(x.sum() - k) > 1e-10) {
    double a = kinks[lo], b = kinks[hi];
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
      const double mid = 0.5 * (a + b);
      if (mass_at(mid) >= k) a = mid;
      else b = mid;
    }
    x = apply(0.5 * (a + b));
  }
  return x;
}

/// Singular values clipped at `radius`.
inline Factor project_spectral_ball(const Factor& f, double radius) {
  Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= radius) return f;
  const Vector clipped = s.cwiseMin(radius);
  return svd.matrixU() * clipped.asDiagonal() * svd.matrixV().transpose();
}

/// Projection onto {||F||_{2,1} <= radius}: group soft-threshold of row norms.
inline Factor project_l21_ball(const Factor& f, double radius) {
  const Vector norms = f.rowwise().norm();
  if (norms.sum() <= radius) return f;
  const Vector shrunk = project_l1_ball(norms, radius);
  Factor out = f;
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    out.row(i) = norms(i) > 0.0 ? Eigen::RowVectorXd(f.row(i) * (shrunk(i) / norms(i)))
                                : Eigen::RowVectorXd::Zero(f.cols());
  return out;
}

struct ProjectionResult {
  Factor point;
  bool converged = true;
  int iterations = 0;
};

/// Euclidean projection onto {||F||_op <= a} n {||F||_{2,1} <= b} by Dykstra's
/// alternating projections.
inline ProjectionResult project_spectral_l21(const Factor& f, const SpectralL21Spec& spec) {
  detail::require(spec.spectral_radius > 0.0 && spec.l21_radius > 0.0,
                  "project_spectral_l21: radii must be positive");
  ProjectionResult res;
  Factor x = f;
  Factor p = Factor::Zero(f.rows(), f.cols());
  Factor q = Factor::Zero(f.rows(), f.cols());
  res.converged = false;
  for (int it = 1; it <= spec.dykstra_max_iters; ++it) {
    const Factor y = project_spectral_ball(x + p, spec.spectral_radius);
    p = x + p - y;
    const Factor x_next = project_l21_ball(y + q, spec.l21_radius);
    q = y + q - x_next;
    const double change = (x_next - x).norm();
    x = x_next;
    res.iterations = it;
    if (change < spec.dykstra_tol) {
      res.converged = true;
      break;
    }
  }
  res.point = std::move(x);
  return res;
}

}  // namespace lrpgd
