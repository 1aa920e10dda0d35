#pragma once

// Shared aliases and error types.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace xmimo {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

// Caller supplied an inconsistent or incomplete configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A random draw hit a measure-zero pathology (near-singular channel,
// near-defective eigensystem, vanishing elimination pivot).  The Monte Carlo
// layer catches this, counts it, and redraws the trial's channel.
struct DegenerateDrawError : std::runtime_error {
  explicit DegenerateDrawError(const std::string& what)
      : std::runtime_error(what) {}
};

// Too few samples or error events to support the requested estimate.
struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& what)
      : std::runtime_error(what) {}
};

constexpr double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
constexpr double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Structure predicates for the two 2x2 block families the codes are built
// from.  "anti" is the column-form block [[a, b], [conj(b), -conj(a)]]
// produced directly by the code layouts; "standard" is the row-form block
// [[a, b], [-conj(b), conj(a)]] produced by products of two anti blocks.
inline bool is_anti_block(const Mat2& m, double tol = 1e-12) {
  return std::abs(m(1, 0) - std::conj(m(0, 1))) <= tol &&
         std::abs(m(1, 1) + std::conj(m(0, 0))) <= tol;
}

inline bool is_standard_block(const Mat2& m, double tol = 1e-12) {
  return std::abs(m(1, 0) + std::conj(m(0, 1))) <= tol &&
         std::abs(m(1, 1) - std::conj(m(0, 0))) <= tol;
}

}  // namespace xmimo
