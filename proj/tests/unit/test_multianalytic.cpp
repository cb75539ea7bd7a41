#include <cmath>
#include <random>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "fockmodel/errors.hpp"
#include "fockmodel/multianalytic.hpp"

using namespace fockmodel;
using fixtures::random_matrix;
using fixtures::random_multianalytic;
using fixtures::random_unitary;

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// Independent oracle: sum over alpha of R_alpha (x) theta_(alpha), where R_alpha
// is the product of right creation matrices in the order of the letters.
CMatrix fourier_oracle(const MultiAnalyticOp& op, int n_w) {
  TruncatedFock scalar(op.n(), n_w, 1);
  CMatrix acc = CMatrix::Zero(scalar.dim() * op.dim_out(), scalar.dim() * op.dim_in());
  for (const auto& [w, m] : op.coeffs()) {
    if (w.length() > n_w) continue;
    CMatrix r = CMatrix::Identity(scalar.dim(), scalar.dim());
    for (int letter : w.letters()) r = r * creation_matrix(scalar, letter, Side::Right);
    acc += kron(r, m);
  }
  return acc;
}

MultiAnalyticOp lambda_family(double lambda, int deg) {
  MultiAnalyticOp op(1, 1, 1);
  op.set(Word(1), CMatrix::Constant(1, 1, -lambda));
  for (int k = 1; k <= deg; ++k)
    op.set(Word(1, std::vector<int>(static_cast<std::size_t>(k), 1)),
           CMatrix::Constant(1, 1, (1 - lambda * lambda) * std::pow(lambda, k - 1)));
  return op;
}

}  // namespace

TEST_CASE("to_matrix examples") {
  std::mt19937_64 rng(1);
  CMatrix m = random_matrix(2, 3, rng);
  MultiAnalyticOp c = MultiAnalyticOp::constant(2, m);
  CMatrix a = to_matrix(c, 2);
  CHECK((a - kron(CMatrix::Identity(7, 7), m)).norm() == 0.0);

  MultiAnalyticOp op(1, 1, 1);
  op.set(Word(1), CMatrix::Constant(1, 1, -0.5));
  op.set(Word(1, {1}), CMatrix::Constant(1, 1, 0.75));
  op.set(Word(1, {1, 1}), CMatrix::Constant(1, 1, 0.375));
  CMatrix expect(3, 3);
  expect << -0.5, 0, 0, 0.75, -0.5, 0, 0.375, 0.75, -0.5;
  CHECK((to_matrix(op, 2) - expect).norm() == 0.0);
}

TEST_CASE("to_matrix agrees with the right-creation Fourier expansion") {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 3; ++n) {
    MultiAnalyticOp op = random_multianalytic(n, 2, 3, 2, 1.0, rng);
    for (int n_w = 0; n_w <= 3; ++n_w) CHECK((to_matrix(op, n_w) - fourier_oracle(op, n_w)).norm() < 1e-14);
  }
}

TEST_CASE("symbol pairing reverses the word") {
  std::mt19937_64 rng(22);
  MultiAnalyticOp op = random_multianalytic(2, 2, 2, 3, 1.0, rng);
  const int n_w = 3;
  TruncatedFock in(2, n_w, 2), out(2, n_w, 2);
  CMatrix a = to_matrix(op, n_w);
  for (long k = 0; k < 2; ++k) {
    CVector col = a.col(in.index(Word(2), k));
    for (const Word& w : out.words())
      CHECK((col.segment(out.index(w, 0), 2) - op.coeff(reverse(w)).col(k)).norm() == 0.0);
  }
  // from_symbols inverts the pairing.
  CMatrix symbols = take_cols(a, degree_indices(in, 0, 0));
  CHECK(coefficient_distance(from_symbols(2, 2, n_w, symbols), op, n_w) == 0.0);
}

TEST_CASE("intertwining defect") {
  std::mt19937_64 rng(23);
  MultiAnalyticOp c = MultiAnalyticOp::constant(1, CMatrix::Constant(1, 1, 0.3));
  CHECK(intertwining_defect(c, 4) == 0.0);
  for (int n = 1; n <= 2; ++n) {
    MultiAnalyticOp op = random_multianalytic(n, 2, 2, 2, 1.0, rng);
    CHECK(intertwining_defect(op, 4) <= 1e-12);
  }
  // Corrupted non-Toeplitz matrix: the shift intertwining fails.
  CMatrix a = to_matrix(lambda_family(0.5, 4), 4);
  a(2, 1) += 0.5;
  TruncatedFock s(1, 4, 1);
  CMatrix sh = creation_matrix(s, 1, Side::Left);
  CMatrix defect = take_cols(a * sh - sh * a, degree_indices(s, 0, 2));
  CHECK(op_norm(defect) > 0.1);
}

TEST_CASE("intertwining defect on a large truncation") {
  std::mt19937_64 rng(29);
  // 3 letters to degree 9 with 4-dimensional coefficients: past the dense block limit.
  MultiAnalyticOp op = random_multianalytic(3, 4, 4, 1, 1.0, rng);
  CHECK(intertwining_defect(op, 9) <= 1e-12);
}

TEST_CASE("multiply") {
  std::mt19937_64 rng(24);
  CMatrix m = random_matrix(2, 2, rng), k = random_matrix(2, 2, rng);
  MultiAnalyticOp p = multiply(MultiAnalyticOp::constant(1, m), MultiAnalyticOp::constant(1, k));
  CHECK((p.coeff(Word(1)) - m * k).norm() < 1e-14);
  CHECK(p.coeffs().size() == 1);

  MultiAnalyticOp shift(1, 1, 1);
  shift.set(Word(1, {1}), CMatrix::Identity(1, 1));
  MultiAnalyticOp s2 = prune(multiply(shift, shift), 0.0);
  REQUIRE(s2.coeffs().size() == 1);
  CHECK(s2.coeffs().begin()->first == Word(1, {1, 1}));

  MultiAnalyticOp a = random_multianalytic(2, 2, 3, 2, 1.0, rng);
  MultiAnalyticOp b = random_multianalytic(2, 3, 2, 2, 1.0, rng);
  MultiAnalyticOp c = random_multianalytic(2, 2, 3, 1, 1.0, rng);
  const int n_w = 6;
  TruncatedFock in(2, n_w, 2);
  auto cols = degree_indices(in, 0, n_w - 4);
  CMatrix lhs = take_cols(to_matrix(multiply(b, a), n_w), cols);
  CMatrix rhs = take_cols(to_matrix(b, n_w) * to_matrix(a, n_w), cols);
  CHECK((lhs - rhs).norm() <= 1e-10);
  // Associativity.
  CHECK(coefficient_distance(multiply(multiply(a, b), a), multiply(a, multiply(b, a)), 6) <= 1e-12);
  CHECK(coefficient_distance(multiply(b, multiply(c, b)), multiply(multiply(b, c), b), 5) <= 1e-12);
  CHECK_THROWS_AS(multiply(a, a), Error);
}

TEST_CASE("classify examples") {
  Tolerance tol;
  // lambda = 1/2 family truncated at a high degree: column deficit 4^{-deg}.
  Classification c = classify(lambda_family(0.5, 30), 30, tol);
  CHECK(c.inner);
  CHECK(c.purely_contractive);
  CHECK_FALSE(c.unitary_constant);

  std::mt19937_64 rng(25);
  MultiAnalyticOp w = MultiAnalyticOp::constant(2, random_unitary(3, rng));
  Classification cw = classify(w, 3, tol);
  CHECK(cw.unitary_constant);
  CHECK(cw.inner);
  CHECK(cw.outer);
  CHECK_FALSE(cw.purely_contractive);

  MultiAnalyticOp z = MultiAnalyticOp::constant(1, CMatrix::Zero(1, 1));
  Classification cz = classify(z, 3, tol);
  CHECK(cz.purely_contractive);
  CHECK_FALSE(cz.inner);
  CHECK_FALSE(cz.outer);

  MultiAnalyticOp shift(1, 1, 1);
  shift.set(Word(1, {1}), CMatrix::Identity(1, 1));
  Classification cs = classify(shift, 4, tol);
  CHECK(cs.inner);
  CHECK_FALSE(cs.outer);
}

TEST_CASE("inner columns are orthonormal over the margin") {
  // Partial sums 1/4 + sum_k (3/4)^2 4^{-(k-1)} approach 1.
  MultiAnalyticOp op = lambda_family(0.5, 12);
  CMatrix a = to_matrix(op, 12);
  double col = a.col(0).squaredNorm();
  double expect = 0.25;
  for (int k = 1; k <= 12; ++k) expect += 0.5625 * std::pow(0.25, k - 1);
  CHECK(col == doctest::Approx(expect).epsilon(1e-14));
  CHECK(1.0 - col == doctest::Approx(std::pow(0.25, 12)).epsilon(1e-6));
}

TEST_CASE("pure unitary decomposition") {
  Tolerance tol;
  std::mt19937_64 rng(26);
  CMatrix u = random_unitary(2, rng);
  auto p = pure_unitary_decomposition(MultiAnalyticOp::constant(1, u), tol);
  CHECK(p.E_u.dim() == 2);
  CHECK(p.E_0.dim() == 0);

  auto q = pure_unitary_decomposition(lambda_family(0.5, 6), tol);
  CHECK(q.E_u.dim() == 0);

  MultiAnalyticOp one = MultiAnalyticOp::constant(1, CMatrix::Constant(1, 1, cplx(0.0, 1.0)));
  MultiAnalyticOp sum = direct_sum(lambda_family(0.5, 6), one);
  CMatrix mix = random_unitary(2, rng), mix_star = random_unitary(2, rng);
  MultiAnalyticOp hidden = conjugate(mix_star, sum, mix.adjoint());
  auto r = pure_unitary_decomposition(hidden, tol);
  REQUIRE(r.E_u.dim() == 1);
  REQUIRE(r.E_star_u.dim() == 1);
  // Oracle: E_u is the image of the second coordinate under mix.
  CHECK(subspace_distance(r.E_u, Subspace(mix.col(1))) < 1e-10);
  CHECK(subspace_distance(r.E_star_u, Subspace(mix_star.col(1))) < 1e-10);
  CHECK(std::abs(std::abs(r.W(0, 0)) - 1.0) < 1e-10);
  // The pure part coincides with the scalar family.
  Coincidence cc = coincides(r.pure, lambda_family(0.5, 6), tol);
  CHECK(cc.coincide == Verdict::Yes);
  // Idempotence.
  CHECK(pure_unitary_decomposition(r.pure, tol).E_u.dim() == 0);
}

TEST_CASE("coincidence") {
  Tolerance tol;
  std::mt19937_64 rng(27);
  for (int trial = 0; trial < 5; ++trial) {
    MultiAnalyticOp a = random_multianalytic(2, 2, 3, 2, 0.9, rng);
    CMatrix q = random_unitary(2, rng), qs = random_unitary(3, rng);
    MultiAnalyticOp b = conjugate(qs, a, q.adjoint());
    Coincidence c = coincides(a, b, tol);
    REQUIRE(c.coincide == Verdict::Yes);
    CHECK(c.residual <= 1e-8);
    for (const auto& [w, m] : a.coeffs()) CHECK((c.W_star * m - b.coeff(w) * c.W).norm() <= 1e-8);
  }
  MultiAnalyticOp a = random_multianalytic(1, 2, 2, 2, 1.0, rng);
  Coincidence self = coincides(a, a, tol);
  CHECK(self.coincide == Verdict::Yes);

  MultiAnalyticOp shift(1, 1, 1);
  shift.set(Word(1, {1}), CMatrix::Identity(1, 1));
  CHECK(coincides(shift, MultiAnalyticOp::identity(1, 1), tol).coincide == Verdict::No);
  CHECK(coincides(shift, MultiAnalyticOp::identity(1, 2), tol).coincide == Verdict::No);
}

TEST_CASE("inner-outer factorization") {
  Tolerance tol;
  // Scaled inner scalar: inner part is the family itself, outer part 1/2.
  MultiAnalyticOp half(1, 1, 1);
  // Degree 40 keeps the truncation tail 0.75 * 2^-40 below the tolerance.
  MultiAnalyticOp lam = lambda_family(0.5, 40);
  for (const auto& [w, m] : lam.coeffs()) half.set(w, 0.5 * m);
  InnerOuter io = inner_outer_factorize(half, 8, tol);
  CHECK(io.inner_class.inner);
  CHECK(io.product_residual <= 1e-8);
  Coincidence ci = coincides(io.inner, lam, tol);
  CHECK(ci.coincide == Verdict::Yes);
  REQUIRE(io.outer.dim_in() == 1);
  CHECK(std::abs(io.outer.coeff(Word(1))(0, 0)) == doctest::Approx(0.5).epsilon(1e-8));

  // Already inner.
  InnerOuter io2 = inner_outer_factorize(lam, 8, tol);
  CHECK(coincides(io2.inner, lam, tol).coincide == Verdict::Yes);
  CHECK(classify(io2.outer, 10, tol).unitary_constant);

  // Zero map.
  InnerOuter io3 = inner_outer_factorize(MultiAnalyticOp::constant(1, CMatrix::Zero(1, 1)), 4, tol);
  CHECK(io3.inner.dim_in() == 0);
  CHECK(io3.outer.dim_out() == 0);

  // Random contractive operator, n = 2: the inner factor is exact at every
  // working degree while the product residual decays with it.
  std::mt19937_64 rng(28);
  MultiAnalyticOp r = random_multianalytic(2, 2, 3, 1, 0.8, rng);
  double prev = 1.0;
  for (int n_w = 2; n_w <= 6; ++n_w) {
    InnerOuter io4 = inner_outer_factorize(r, n_w, tol);
    CHECK(io4.inner_class.inner);
    CHECK(io4.product_residual < 0.5 * prev);
    prev = io4.product_residual;
  }
  CHECK(prev <= 1e-4);
}
