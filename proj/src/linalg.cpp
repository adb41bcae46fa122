// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#include "mwr/linalg.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mwr {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

lapack_complex_double* lp(Complex* p) { return reinterpret_cast<lapack_complex_double*>(p); }

CBLAS_TRANSPOSE to_cblas(Op op) {
  switch (op) {
    case Op::kNone: return CblasNoTrans;
    case Op::kTranspose: return CblasTrans;
    case Op::kConjTranspose: return CblasConjTrans;
  }
  return CblasNoTrans;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
  require(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
  data_.assign(static_cast<std::size_t>(rows) * cols, Complex(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::zeros(int rows, int cols) { return ComplexMatrix(rows, cols); }

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& entries) {
  require(!entries.empty(), "diagonal needs at least one entry");
  ComplexMatrix m(static_cast<int>(entries.size()), static_cast<int>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<Complex>& entries) {
  require(!entries.empty(), "diagonal needs at least one entry");
  ComplexMatrix m(static_cast<int>(entries.size()), static_cast<int>(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = entries[i];
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "operator+=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_, "operator-=: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  return matmul(a, Op::kNone, b, Op::kNone);
}

ComplexMatrix matmul(const ComplexMatrix& a, Op op_a, const ComplexMatrix& b, Op op_b) {
  const int m = (op_a == Op::kNone) ? a.rows() : a.cols();
  const int k = (op_a == Op::kNone) ? a.cols() : a.rows();
  const int kb = (op_b == Op::kNone) ? b.rows() : b.cols();
  const int n = (op_b == Op::kNone) ? b.cols() : b.rows();
  require(k == kb, "matmul: inner dimensions disagree");
  ComplexMatrix c(m, n);
  const Complex one(1.0, 0.0), zero(0.0, 0.0);
  cblas_zgemm(CblasRowMajor, to_cblas(op_a), to_cblas(op_b), m, n, k, &one, a.data(), a.cols(),
              b.data(), b.cols(), &zero, c.data(), c.cols());
  return c;
}

ComplexMatrix conj(const ComplexMatrix& a) {
  ComplexMatrix out(a.rows(), a.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out(r, c) = std::conj(a(r, c));
  return out;
}

ComplexMatrix transpose(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out(c, r) = a(r, c);
  return out;
}

ComplexMatrix hermitian(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out(c, r) = std::conj(a(r, c));
  return out;
}

Complex trace(const ComplexMatrix& a) {
  require(a.rows() == a.cols(), "trace: matrix must be square");
  Complex sum(0.0, 0.0);
  for (int i = 0; i < a.rows(); ++i) sum += a(i, i);
  return sum;
}

double frobenius_norm_sq(const ComplexMatrix& a) {
  double sum = 0.0;
  const Complex* p = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(p[i]);
  return sum;
}

double max_abs(const ComplexMatrix& a) {
  double best = 0.0;
  const Complex* p = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(p[i]));
  return best;
}

HermitianFactor::HermitianFactor(const ComplexMatrix& gram) : n_(gram.rows()) {
  require(gram.rows() == gram.cols(), "HermitianFactor: matrix must be square");
  scale_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    const double d = gram(i, i).real();
    if (!(d > 0.0) || !std::isfinite(d))
      throw SingularGram("HermitianFactor: non-positive diagonal entry");
    scale_[i] = 1.0 / std::sqrt(d);
  }
  factor_ = ComplexMatrix(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) factor_(r, c) = gram(r, c) * (scale_[r] * scale_[c]);

  // 1-norm of the equilibrated matrix, needed by the condition estimator.
  double anorm = 0.0;
  for (int c = 0; c < n_; ++c) {
    double col = 0.0;
    for (int r = 0; r < n_; ++r) col += std::abs(factor_(r, c));
    anorm = std::max(anorm, col);
  }

  int info = LAPACKE_zpotrf(LAPACK_ROW_MAJOR, 'L', n_, lp(factor_.data()), n_);
  if (info != 0)
    throw SingularGram("HermitianFactor: matrix is not positive definite (zpotrf info=" +
                       std::to_string(info) + ")");

  double rcond = 0.0;
  info = LAPACKE_zpocon(LAPACK_ROW_MAJOR, 'L', n_, lp(factor_.data()), n_, anorm, &rcond);
  if (info != 0) throw SingularGram("HermitianFactor: condition estimate failed");
  condition_ = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(condition_ < kConditionLimit))
    throw SingularGram("HermitianFactor: condition estimate above rejection threshold",
                       condition_);
}

ComplexMatrix HermitianFactor::solve(const ComplexMatrix& rhs) const {
  require(rhs.rows() == n_, "HermitianFactor::solve: rhs row count mismatch");
  ComplexMatrix x = rhs;
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < rhs.cols(); ++c) x(r, c) *= scale_[r];
  int info = LAPACKE_zpotrs(LAPACK_ROW_MAJOR, 'L', n_, rhs.cols(), lp(const_cast<Complex*>(factor_.data())),
                            n_, lp(x.data()), rhs.cols());
  if (info != 0) throw SingularGram("HermitianFactor::solve: zpotrs failed");
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < rhs.cols(); ++c) x(r, c) *= scale_[r];
  return x;
}

ComplexMatrix HermitianFactor::inverse() const {
  ComplexMatrix inv = factor_;
  int info = LAPACKE_zpotri(LAPACK_ROW_MAJOR, 'L', n_, lp(inv.data()), n_);
  if (info != 0) throw SingularGram("HermitianFactor::inverse: zpotri failed");
  for (int r = 0; r < n_; ++r)
    for (int c = r + 1; c < n_; ++c) inv(r, c) = std::conj(inv(c, r));
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) inv(r, c) *= scale_[r] * scale_[c];
  return inv;
}

ComplexMatrix hermitian_solve(const ComplexMatrix& gram, const ComplexMatrix& rhs) {
  require(gram.rows() == gram.cols(), "hermitian_solve: gram must be square");
  require(rhs.rows() == gram.rows(), "hermitian_solve: rhs row count mismatch");
  HermitianFactor factor(gram);
  ComplexMatrix x = factor.solve(rhs);
  // One refinement step keeps the residual near machine level.
  ComplexMatrix residual = rhs;
  const Complex minus_one(-1.0, 0.0), one(1.0, 0.0);
  cblas_zgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, gram.rows(), rhs.cols(), gram.cols(),
              &minus_one, gram.data(), gram.cols(), x.data(), x.cols(), &one, residual.data(),
              residual.cols());
  x += factor.solve(residual);
  return x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(splitmix64(splitmix64(seed) ^ stream_id)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(seed_, mix_streams({stream_id_, index}));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method; draws come in pairs.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

Complex RngStream::circular_gaussian() {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double re = normal();
  const double im = normal();
  return Complex(re * kInvSqrt2, im * kInvSqrt2);
}

std::uint64_t mix_streams(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ p);
  return h;
}

ComplexMatrix sample_circular_gaussian(int rows, int cols, RngStream& rng) {
  ComplexMatrix m(rows, cols);
  Complex* p = m.data();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = rng.circular_gaussian();
  return m;
}

}  // namespace mwr
