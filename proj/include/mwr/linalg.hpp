// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "mwr/errors.hpp"

namespace mwr {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major, double precision.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols);

  static ComplexMatrix zeros(int rows, int cols);
  static ComplexMatrix identity(int n);
  static ComplexMatrix diagonal(const std::vector<double>& entries);
  static ComplexMatrix diagonal(const std::vector<Complex>& entries);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Complex& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Complex& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  Complex* data() noexcept { return data_.data(); }
  const Complex* data() const noexcept { return data_.data(); }
  std::size_t size() const noexcept { return data_.size(); }

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

/// Operand transformation applied inside matmul, mirroring BLAS semantics.
enum class Op : char { kNone, kTranspose, kConjTranspose };

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix matmul(const ComplexMatrix& a, Op op_a, const ComplexMatrix& b, Op op_b);

ComplexMatrix conj(const ComplexMatrix& a);
ComplexMatrix transpose(const ComplexMatrix& a);
ComplexMatrix hermitian(const ComplexMatrix& a);
Complex trace(const ComplexMatrix& a);
double frobenius_norm_sq(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);

/// Gram condition estimates above this reject the draw as degenerate.
inline constexpr double kConditionLimit = 1e12;

/// Cholesky factorization of a Hermitian positive-definite matrix.
///
/// The matrix is Jacobi-equilibrated before factorization so that the
/// condition estimate reflects genuine rank deficiency rather than scale
/// disparity between users. Throws SingularGram when the factorization
/// fails or the equilibrated condition estimate exceeds kConditionLimit.
class HermitianFactor {
 public:
  explicit HermitianFactor(const ComplexMatrix& gram);

  /// Solves gram * X = rhs.
  ComplexMatrix solve(const ComplexMatrix& rhs) const;
  /// Explicit inverse of the factored matrix.
  ComplexMatrix inverse() const;
  double condition_estimate() const noexcept { return condition_; }
  int order() const noexcept { return n_; }

 private:
  int n_ = 0;
  ComplexMatrix factor_;        // lower Cholesky factor of the equilibrated matrix
  std::vector<double> scale_;   // inverse square roots of the original diagonal
  double condition_ = 0.0;
};

/// Solves gram * X = rhs for Hermitian positive-definite gram, with one
/// step of iterative refinement. Throws SingularGram on degenerate input.
ComplexMatrix hermitian_solve(const ComplexMatrix& gram, const ComplexMatrix& rhs);

/// Deterministic random stream identified by (seed, stream id).
///
/// The same pair always reproduces the same sample sequence, and distinct
/// stream ids give statistically independent sequences, so Monte Carlo
/// trials can be dealt to threads in any order without affecting results.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream for sub-task `index`; derivation is pure in (seed, id, index).
  RngStream substream(std::uint64_t index) const;

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal N(0, 1).
  double normal();
  /// Circularly symmetric complex Gaussian CN(0, 1): each part has variance 1/2.
  Complex circular_gaussian();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Combines integers into a single stream id (order-sensitive).
std::uint64_t mix_streams(std::initializer_list<std::uint64_t> parts);

/// Matrix of i.i.d. CN(0, 1) entries, filled in row-major order.
ComplexMatrix sample_circular_gaussian(int rows, int cols, RngStream& rng);

}  // namespace mwr
