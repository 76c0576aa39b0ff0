#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lrpgd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A d x r factor; row i is the i-th row of F in M = F F^T.
using Factor = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Raised by initializers whose spectrum does not admit a rank-r factor.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class NonUniqueAlignmentError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

namespace detail {

inline void require(bool ok, const char* msg) {
  if (!ok) throw ParameterError(msg);
}

inline void require_dims(bool ok, const std::string& msg) {
  if (!ok) throw DimensionError(msg);
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace detail

/// Value plus gradient of a factorized loss.
struct LossGrad {
  double loss = 0.0;
  Factor grad;
  // Number of probability clamps applied while evaluating (one-bit model only).
  std::size_t clamps = 0;
};

}  // namespace lrpgd
