#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "lrpgd/core.hpp"
#include "lrpgd/random.hpp"

namespace lrpgd {

inline constexpr double kOrthogonalityTol = 1e-10;
inline constexpr double kAlignmentTol = 1e-8;

/// Ground truth factor theta* with pairwise-orthogonal columns.
struct GroundTruth {
  Factor factor;
  Vector singular_values;  // nonincreasing
  double condition_number = 1.0;
  double incoherence = 1.0;

  Eigen::Index rows() const { return factor.rows(); }
  Eigen::Index rank() const { return factor.cols(); }
  double op_norm() const { return singular_values(0); }
  double sigma_r() const { return singular_values(singular_values.size() - 1); }
};

struct SpectralInfo {
  Vector singular_values;
  Matrix left_vectors;
  Matrix right_vectors;
};

/// Thin SVD with singular values sorted nonincreasing (Eigen's order).
inline SpectralInfo thin_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

/// mu = d * max_i ||theta_i||^2 / (r * ||theta||_op^2).
inline double incoherence(const Factor& theta) {
  const double op = thin_svd(theta).singular_values(0);
  if (op == 0.0) throw DegenerateError("incoherence of a zero factor");
  const double max_row = theta.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(theta.rows()) * max_row /
         (static_cast<double>(theta.cols()) * op * op);
}

/// Validates orthogonality of the columns and fills in the spectral summary.
inline GroundTruth make_ground_truth(Factor factor) {
  detail::require_dims(factor.cols() >= 1 && factor.cols() <= factor.rows(),
                       "ground truth must satisfy 1 <= r <= d");
  detail::require_dims(factor.allFinite(), "ground truth has non-finite entries");
  const Matrix gram = factor.transpose() * factor;
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = i + 1; j < gram.cols(); ++j) {
      const double scale = std::sqrt(gram(i, i) * gram(j, j));
      if (std::abs(gram(i, j)) > kOrthogonalityTol * std::max(scale, 1.0))
        throw ParameterError("ground-truth columns are not mutually orthogonal");
    }
  GroundTruth gt;
  gt.singular_values = thin_svd(factor).singular_values;
  if (gt.singular_values(gt.singular_values.size() - 1) <= 0.0)
    throw DegenerateError("ground truth is rank deficient");
  gt.condition_number = gt.singular_values(0) / gt.singular_values(gt.singular_values.size() - 1);
  gt.factor = std::move(factor);
  gt.incoherence = incoherence(gt.factor);
  return gt;
}

/// min over orthogonal R of ||f - g R||_F, via the nuclear norm of f^T g.
inline double procrustes_dist(const Factor& f, const Factor& g) {
  detail::require_dims(f.rows() == g.rows() && f.cols() == g.cols(),
                       "procrustes_dist: shape mismatch");
  const Matrix cross = f.transpose() * g;
  const double nuclear = Eigen::JacobiSVD<Matrix>(cross).singularValues().sum();
  const double sq = f.squaredNorm() + g.squaredNorm() - 2.0 * nuclear;
  return std::sqrt(std::max(sq, 0.0));
}

/// Distance from f to the equivalence class of the ground truth.
inline double factor_dist(const Factor& f, const GroundTruth& gt) {
  return procrustes_dist(f, gt.factor);
}

enum class AlignmentMode { strict, best_effort };

struct Alignment {
  Factor representative;
  bool degenerate = false;  // alignment was not unique
};

/// Closest member of the rotation class of theta* to f. In strict mode the
/// distance must be below sigma_r(theta*), where the optimum is unique.
inline Alignment aligned_representative(const Factor& f, const GroundTruth& gt,
                                        AlignmentMode mode = AlignmentMode::strict) {
  detail::require_dims(f.rows() == gt.rows() && f.cols() == gt.rank(),
                       "aligned_representative: shape mismatch");
  const double dist = factor_dist(f, gt);
  const bool unique_regime = dist < gt.sigma_r();
  if (!unique_regime && mode == AlignmentMode::strict)
    throw NonUniqueAlignmentError("distance " + std::to_string(dist) +
                                  " is not below sigma_r = " + std::to_string(gt.sigma_r()));

  const Matrix cross = f.transpose() * gt.factor;  // U = F^T theta*
  Alignment out;
  if (gt.rank() == 1 && cross(0, 0) == 0.0) {
    out.representative = gt.factor;
    out.degenerate = true;
    return out;
  }
  // theta* U^T (U U^T)^{-1/2} = theta* B A^T for U = A S B^T.
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix rotation = svd.matrixV() * svd.matrixU().transpose();
  out.representative = gt.factor * rotation;
  const Vector& s = svd.singularValues();
  out.degenerate = !unique_regime || s(s.size() - 1) <= 1e-14 * std::max(s(0), 1.0);
  return out;
}

namespace detail {

inline Matrix orthonormal_basis(const Factor& f, const char* who) {
  const Vector s = thin_svd(f).singular_values;
  if (s.size() == 0 || s(s.size() - 1) <= 1e-12 * std::max(s(0), 1e-300) || s(0) == 0.0)
    throw DegenerateError(std::string(who) + ": input is not of full column rank");
  Eigen::HouseholderQR<Matrix> qr(f);
  return qr.householderQ() * Matrix::Identity(f.rows(), f.cols());
}

}  // namespace detail

/// ||sin angle(f, g)||_F^2 = sum_i (1 - cos^2 psi_i) over the principal angles.
inline double subspace_sin_dist(const Factor& f, const Factor& g) {
  detail::require_dims(f.rows() == g.rows() && f.cols() == g.cols(),
                       "subspace_sin_dist: shape mismatch");
  const Matrix qf = detail::orthonormal_basis(f, "subspace_sin_dist");
  const Matrix qg = detail::orthonormal_basis(g, "subspace_sin_dist");
  const double cos_sq = (qf.transpose() * qg).squaredNorm();
  return std::clamp(static_cast<double>(f.cols()) - cos_sq, 0.0, static_cast<double>(f.cols()));
}

/// Haar-distributed d x r orthonormal frame (Gaussian + QR), with the first
/// nonzero entry of every column made positive.
inline Factor random_orthonormal(Eigen::Index d, Eigen::Index r, Rng& rng) {
  detail::require_dims(r >= 1 && r <= d, "random_orthonormal: need 1 <= r <= d");
  const Matrix g = rng.gaussian(d, r);
  Eigen::HouseholderQR<Matrix> qr(g);
  Factor q = qr.householderQ() * Matrix::Identity(d, r);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (q(i, j) != 0.0) {
        if (q(i, j) < 0.0) q.col(j) = -q.col(j);
        break;
      }
    }
  }
  return q;
}

inline Factor random_orthonormal(Eigen::Index d, Eigen::Index r, std::uint64_t seed) {
  Rng rng(seed);
  return random_orthonormal(d, r, rng);
}

struct EigenPairs {
  Vector values;   // nonincreasing
  Matrix vectors;  // columns match values
};

/// Top-r (largest algebraic) eigenpairs of a symmetric matrix.
inline EigenPairs top_eigenpairs(const Matrix& sym, Eigen::Index r) {
  detail::require_dims(sym.rows() == sym.cols(), "top_eigenpairs: matrix must be square");
  detail::require_dims(r >= 1 && r <= sym.rows(), "top_eigenpairs: need 1 <= r <= d");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw DegenerateError("eigendecomposition failed");
  const Eigen::Index d = sym.rows();
  EigenPairs out{Vector(r), Matrix(d, r)};
  for (Eigen::Index j = 0; j < r; ++j) {
    out.values(j) = es.eigenvalues()(d - 1 - j);
    out.vectors.col(j) = es.eigenvectors().col(d - 1 - j);
  }
  return out;
}

/// U S^{1/2} from the top-r eigenpairs with negative eigenvalues clipped to 0.
/// Throws DegenerateError when fewer than `min_positive` eigenvalues are > 0.
inline Factor sqrt_factor(const EigenPairs& top, Eigen::Index min_positive) {
  const Eigen::Index positive = (top.values.array() > 0.0).count();
  if (positive < min_positive)
    throw DegenerateError("spectrum has " + std::to_string(positive) +
                          " positive eigenvalues, need " + std::to_string(min_positive));
  const Vector scale = top.values.cwiseMax(0.0).cwiseSqrt();
  return top.vectors * scale.asDiagonal();
}

}  // namespace lrpgd
