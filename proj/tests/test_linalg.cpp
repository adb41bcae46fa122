// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mwr/linalg.hpp"

using namespace mwr;

namespace {

ComplexMatrix random_matrix(int rows, int cols, RngStream& rng) {
  return sample_circular_gaussian(rows, cols, rng);
}

// Well-conditioned random HPD matrix: A^H A + n*I.
ComplexMatrix random_hpd(int n, RngStream& rng) {
  const ComplexMatrix a = random_matrix(n, n, rng);
  ComplexMatrix gram = matmul(a, Op::kConjTranspose, a, Op::kNone);
  for (int i = 0; i < n; ++i) gram(i, i) += static_cast<double>(n);
  return gram;
}

}  // namespace

TEST_CASE("trace and frobenius norm on simple matrices") {
  const int m = 7;
  CHECK(trace(ComplexMatrix::identity(m)).real() == doctest::Approx(m));
  CHECK(trace(ComplexMatrix::identity(m)).imag() == 0.0);
  const ComplexMatrix d = ComplexMatrix::diagonal(std::vector<double>{3.0, 4.0});
  CHECK(frobenius_norm_sq(d) == doctest::Approx(25.0));
  CHECK_THROWS_AS(trace(ComplexMatrix::zeros(2, 3)), DimensionMismatch);
}

TEST_CASE("conjugate, transpose and hermitian are exact involutions") {
  RngStream rng(7, 0);
  const ComplexMatrix a = random_matrix(5, 3, rng);
  const ComplexMatrix cc = conj(conj(a));
  const ComplexMatrix tt = transpose(transpose(a));
  const ComplexMatrix hh = hermitian(hermitian(a));
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      CHECK(cc(r, c) == a(r, c));
      CHECK(tt(r, c) == a(r, c));
      CHECK(hh(r, c) == a(r, c));
    }
  // hermitian == conj of transpose
  const ComplexMatrix h = hermitian(a);
  const ComplexMatrix ct = conj(transpose(a));
  for (int r = 0; r < h.rows(); ++r)
    for (int c = 0; c < h.cols(); ++c) CHECK(h(r, c) == ct(r, c));
}

TEST_CASE("matmul dimension checks and cyclic trace property") {
  RngStream rng(11, 0);
  const ComplexMatrix a = random_matrix(4, 6, rng);
  const ComplexMatrix b = random_matrix(6, 4, rng);
  CHECK_THROWS_AS(matmul(a, a), DimensionMismatch);

  const Complex tr_ab = trace(matmul(a, b));
  const Complex tr_ba = trace(matmul(b, a));
  CHECK(std::abs(tr_ab - tr_ba) <= 1e-12 * std::abs(tr_ab));
}

TEST_CASE("matmul against inverse gives the identity") {
  RngStream rng(13, 0);
  ComplexMatrix a = random_matrix(4, 4, rng);
  for (int i = 0; i < 4; ++i) a(i, i) += 4.0;  // keep it well conditioned
  // Inverse through the normal equations: (A^H A) X = A^H  =>  X = A^{-1}.
  const ComplexMatrix gram = matmul(a, Op::kConjTranspose, a, Op::kNone);
  const ComplexMatrix inv = hermitian_solve(gram, hermitian(a));
  ComplexMatrix residual = matmul(a, inv);
  residual -= ComplexMatrix::identity(4);
  CHECK(max_abs(residual) <= 1e-10);
}

TEST_CASE("matmul transpose flags agree with explicit rearrangement") {
  RngStream rng(17, 0);
  const ComplexMatrix a = random_matrix(5, 3, rng);
  const ComplexMatrix b = random_matrix(5, 4, rng);
  const ComplexMatrix fast = matmul(a, Op::kConjTranspose, b, Op::kNone);
  const ComplexMatrix slow = matmul(hermitian(a), b);
  CHECK(max_abs(fast - slow) <= 1e-13);

  const ComplexMatrix fast_t = matmul(a, Op::kTranspose, b, Op::kNone);
  const ComplexMatrix slow_t = matmul(transpose(a), b);
  CHECK(max_abs(fast_t - slow_t) <= 1e-13);
}

TEST_CASE("sample_circular_gaussian moments") {
  RngStream rng(2024, 5);
  const int draws = 100000;
  // Three running sums per tracked entry: mean, |h|^2, h^2 (no conjugate).
  Complex mean(0, 0), square(0, 0);
  double power = 0.0;
  for (int t = 0; t < draws; ++t) {
    const ComplexMatrix h = sample_circular_gaussian(1, 1, rng);
    mean += h(0, 0);
    square += h(0, 0) * h(0, 0);
    power += std::norm(h(0, 0));
  }
  mean /= static_cast<double>(draws);
  square /= static_cast<double>(draws);
  power /= static_cast<double>(draws);
  CHECK(std::abs(mean) <= 0.02);
  CHECK(power == doctest::Approx(1.0).epsilon(0.02));
  // Circular symmetry: the non-conjugated second moment vanishes.
  CHECK(std::abs(square) <= 0.02);
}

TEST_CASE("per-component variance of CN(0,1) is one half") {
  RngStream rng(99, 1);
  const int draws = 200000;
  double re_var = 0.0, im_var = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Complex h = rng.circular_gaussian();
    re_var += h.real() * h.real();
    im_var += h.imag() * h.imag();
  }
  re_var /= draws;
  im_var /= draws;
  CHECK(re_var == doctest::Approx(0.5).epsilon(0.02));
  CHECK(im_var == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 3);
  RngStream b(42, 3);
  RngStream c(42, 4);
  bool all_equal = true;
  bool any_diff_stream = false;
  for (int i = 0; i < 256; ++i) {
    const double va = a.uniform();
    const double vb = b.uniform();
    const double vc = c.uniform();
    all_equal = all_equal && (va == vb);
    any_diff_stream = any_diff_stream || (va != vc);
  }
  CHECK(all_equal);
  CHECK(any_diff_stream);

  // Sampling a matrix twice from identical streams is bit-identical.
  RngStream s1(7, 9), s2(7, 9);
  const ComplexMatrix m1 = sample_circular_gaussian(4, 4, s1);
  const ComplexMatrix m2 = sample_circular_gaussian(4, 4, s2);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(m1(r, c) == m2(r, c));

  // Substream derivation is pure.
  CHECK(RngStream(1, 2).substream(5).stream_id() == RngStream(1, 2).substream(5).stream_id());
  CHECK(RngStream(1, 2).substream(5).stream_id() != RngStream(1, 2).substream(6).stream_id());
}

TEST_CASE("hermitian_solve identity and diagonal cases") {
  RngStream rng(5, 0);
  const ComplexMatrix rhs = random_matrix(3, 2, rng);
  const ComplexMatrix x = hermitian_solve(ComplexMatrix::identity(3), rhs);
  CHECK(max_abs(x - rhs) <= 1e-14);

  const ComplexMatrix gram = ComplexMatrix::diagonal(std::vector<double>{2.0, 4.0});
  const ComplexMatrix inv = hermitian_solve(gram, ComplexMatrix::identity(2));
  CHECK(inv(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inv(1, 1).real() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(inv(0, 1)) <= 1e-15);
}

TEST_CASE("hermitian_solve residual bound on random HPD systems") {
  RngStream rng(31, 2);
  for (int rep = 0; rep < 20; ++rep) {
    const ComplexMatrix gram = random_hpd(5, rng);
    const ComplexMatrix rhs = random_matrix(5, 3, rng);
    const ComplexMatrix x = hermitian_solve(gram, rhs);
    ComplexMatrix residual = matmul(gram, x);
    residual -= rhs;
    const double rel = std::sqrt(frobenius_norm_sq(residual) / frobenius_norm_sq(rhs));
    CHECK(rel <= 1e-10);
  }
}

TEST_CASE("hermitian_solve rejects degenerate systems") {
  // Exactly repeated diagonal blocks make the matrix singular.
  ComplexMatrix gram(2, 2);
  gram(0, 0) = 1.0;
  gram(0, 1) = 1.0;
  gram(1, 0) = 1.0;
  gram(1, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_solve(gram, ComplexMatrix::identity(2)), SingularGram);

  ComplexMatrix negative(2, 2);
  negative(0, 0) = -1.0;
  negative(1, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_solve(negative, ComplexMatrix::identity(2)), SingularGram);

  CHECK_THROWS_AS(hermitian_solve(ComplexMatrix::identity(2), ComplexMatrix::identity(3)),
                  DimensionMismatch);
}

TEST_CASE("equilibration keeps wildly scaled systems solvable") {
  // Diagonal spread of 1e12 is harmless once equilibrated.
  RngStream rng(77, 0);
  ComplexMatrix base = random_hpd(4, rng);
  std::vector<double> scale = {1.0, 1e-3, 1e-6, 1e-12};
  ComplexMatrix gram(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      gram(r, c) = base(r, c) * std::sqrt(scale[r]) * std::sqrt(scale[c]);
  const ComplexMatrix rhs = random_matrix(4, 2, rng);
  const ComplexMatrix x = hermitian_solve(gram, rhs);
  ComplexMatrix residual = matmul(gram, x);
  residual -= rhs;
  const double rel = std::sqrt(frobenius_norm_sq(residual) / frobenius_norm_sq(rhs));
  CHECK(rel <= 1e-10);
}
