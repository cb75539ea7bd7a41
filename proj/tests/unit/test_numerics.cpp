#include <random>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "fockmodel/errors.hpp"
#include "fockmodel/numerics.hpp"

using namespace fockmodel;
using fixtures::random_matrix;
using fixtures::random_unitary;

namespace {

CMatrix diag(std::initializer_list<double> v) {
  CMatrix m = CMatrix::Zero(static_cast<long>(v.size()), static_cast<long>(v.size()));
  long k = 0;
  for (double x : v) m(k, k) = x, ++k;
  return m;
}

}  // namespace

TEST_CASE("psd_sqrt examples") {
  Tolerance tol;
  CHECK((psd_sqrt(CMatrix::Identity(2, 2), tol) - CMatrix::Identity(2, 2)).norm() < 1e-14);
  CHECK((psd_sqrt(diag({4, 0}), tol) - diag({2, 0})).norm() < 1e-14);
  CMatrix a(2, 2);
  a << 1.0, 0.25, 0.25, 1.0;
  CMatrix b = psd_sqrt(a, tol);
  CHECK((b * b - a).norm() < 1e-12);
  // Oracle: eigenvalues 1 +/- 1/4 with eigenvectors (1, +/-1)/sqrt 2.
  CMatrix oracle(2, 2);
  double p = std::sqrt(1.25), q = std::sqrt(0.75);
  oracle << (p + q) / 2, (p - q) / 2, (p - q) / 2, (p + q) / 2;
  CHECK((b - oracle).norm() < 1e-12);
  CHECK_THROWS_AS(psd_sqrt(diag({1, -0.1}), tol), Error);
  CMatrix nh(2, 2);
  nh << 1, 1, 0, 1;
  CHECK_THROWS_AS(psd_sqrt(nh, tol), Error);
  CHECK((psd_sqrt(diag({1, -1e-10}), tol) - diag({1, 0})).norm() < 1e-14);
}

TEST_CASE("psd_sqrt squares back on random PSD matrices") {
  std::mt19937_64 rng(11);
  Tolerance tol;
  for (long d = 1; d <= 20; d += 3) {
    CMatrix g = random_matrix(d, d / 2 + 1, rng);
    CMatrix a = g * g.adjoint();
    CMatrix b = psd_sqrt(a, tol);
    CHECK((b * b - a).norm() <= tol.eq_tol * std::max(1.0, a.norm()));
    CHECK((b - b.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("range and kernel bases") {
  Tolerance tol;
  CHECK(range_basis(CMatrix::Zero(3, 3), tol).dim() == 0);
  CMatrix col(2, 1);
  col << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK(range_basis(col, tol).dim() == 1);
  // Delta_T for T = [1/2, 1/2] has eigenvalues sqrt(1/2) and 1.
  CMatrix row(1, 2);
  row << 0.5, 0.5;
  CMatrix dt = psd_sqrt(CMatrix::Identity(2, 2) - row.adjoint() * row, tol);
  CHECK(range_basis(dt, tol).dim() == 2);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(dt);
  CHECK(es.eigenvalues()(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(es.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(kernel_basis(CMatrix::Identity(3, 3), tol).dim() == 0);
  Subspace k = kernel_basis(diag({0, 1}), tol);
  REQUIRE(k.dim() == 1);
  CHECK(std::abs(k.basis()(0, 0)) == doctest::Approx(1.0));
  CMatrix ones = CMatrix::Ones(2, 2);
  Subspace k2 = kernel_basis(ones, tol);
  REQUIRE(k2.dim() == 1);
  CHECK(std::abs(k2.basis()(0, 0) + k2.basis()(1, 0)) < 1e-12);
}

TEST_CASE("rank plus nullity equals column count") {
  std::mt19937_64 rng(5);
  Tolerance tol;
  for (int trial = 0; trial < 20; ++trial) {
    long r = 1 + trial % 5, c = 2 + trial % 7, k = 1 + trial % 3;
    CMatrix a = random_matrix(r, k, rng) * random_matrix(k, c, rng);
    Subspace rg = range_basis(a, tol), kr = kernel_basis(a, tol);
    CHECK(rg.dim() + kr.dim() == c);
    CHECK((rg.basis().adjoint() * rg.basis() - CMatrix::Identity(rg.dim(), rg.dim())).norm() < 1e-12);
    CHECK((a * kr.basis()).norm() < 1e-10);
  }
}

TEST_CASE("subspace operations") {
  Tolerance tol;
  Subspace e1(CMatrix::Identity(2, 2).col(0));
  Subspace c = complement(e1);
  REQUIRE(c.dim() == 1);
  CHECK(std::abs(c.basis()(1, 0)) == doctest::Approx(1.0));

  Subspace a(CMatrix::Identity(3, 3).leftCols(2));
  Subspace b(CMatrix::Identity(3, 3).rightCols(2));
  Subspace i = intersect(a, b, tol);
  REQUIRE(i.dim() == 1);
  CHECK(std::abs(i.basis()(1, 0)) == doctest::Approx(1.0));
  CHECK(sum(a, b, tol).dim() == 3);

  CMatrix v(2, 1);
  v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  CHECK_FALSE(contains(Subspace(v), e1, tol));
  CHECK(contains(Subspace::full(2), e1, tol));
  CHECK(subspace_distance(e1, e1) < 1e-14);
  CHECK_THROWS_AS(intersect(e1, a, tol), Error);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    Subspace x = range_basis(random_matrix(6, 3, rng), tol);
    Subspace y = range_basis(random_matrix(6, 4, rng), tol);
    for (const Subspace& s : {complement(x), intersect(x, y, tol), sum(x, y, tol),
                              image(random_matrix(6, 6, rng), x, tol)})
      CHECK((s.basis().adjoint() * s.basis() - CMatrix::Identity(s.dim(), s.dim())).norm() < 1e-10);
    CHECK(intersect(x, y, tol).dim() == 1);
  }
}

TEST_CASE("align_unitary") {
  Tolerance tol;
  auto u = align_unitary(CMatrix::Identity(3, 3), CMatrix::Identity(3, 3), tol);
  REQUIRE(u.has_value());
  CHECK((*u - CMatrix::Identity(3, 3)).norm() < 1e-14);
  std::mt19937_64 rng(17);
  CMatrix q = random_unitary(4, rng);
  CMatrix a = random_matrix(4, 6, rng);
  auto r = align_unitary(a, q * a, tol);
  REQUIRE(r.has_value());
  CHECK((*r * a - q * a).norm() <= 1e-10);
  CHECK_FALSE(align_unitary(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), tol).has_value());
  CHECK_THROWS_AS(align_unitary(CMatrix::Zero(2, 2), CMatrix::Zero(2, 3), tol), Error);
}
