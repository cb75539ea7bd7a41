#include <cmath>
#include <random>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "fockmodel/charfn.hpp"
#include "fockmodel/errors.hpp"
#include "fockmodel/factorization.hpp"

using namespace fockmodel;

namespace {

CMatrix scalar(cplx x) { return CMatrix::Constant(1, 1, x); }

MultiAnalyticOp monomial(int power) {
  MultiAnalyticOp op(1, 1, 1);
  op.set(Word(1, std::vector<int>(static_cast<std::size_t>(power), 1)), scalar(1.0));
  return op;
}

Subspace tail_subspace(const fixtures::FlagTuple& ft, long k) {
  return Subspace(ft.u.rightCols(k));
}

}  // namespace

TEST_CASE("build_X on scalar examples") {
  Tolerance tol;
  SUBCASE("z^2 = z z") {
    Factorization f = build_X(monomial(1), monomial(1), 4, tol);
    CHECK(f.delta.norm() == 0.0);
    CHECK(f.X.cols() == 0);
    CHECK(f.regular);
  }
  SUBCASE("0 = 0 I") {
    Factorization f = build_X(MultiAnalyticOp::identity(1, 1), MultiAnalyticOp::constant(1, scalar(0.0)), 4, tol);
    CHECK(f.delta1.norm() == 0.0);
    // X (Delta f) = f (+) 0: the top block is unitary in range coordinates.
    CMatrix top = f.X.topRows(f.mid.dim());
    REQUIRE(top.cols() == 5);
    CHECK((top.adjoint() * top - CMatrix::Identity(5, 5)).norm() < 1e-12);
    CHECK(f.X.bottomRows(f.in.dim()).norm() < 1e-12);
    CHECK(f.regular);
  }
  SUBCASE("0 = 0 0") {
    MultiAnalyticOp zero = MultiAnalyticOp::constant(1, scalar(0.0));
    Factorization f = build_X(zero, zero, 4, tol);
    CHECK(f.X.topRows(f.mid.dim()).norm() < 1e-12);
    CHECK_FALSE(f.regular);
    CHECK(f.regularity_residual == doctest::Approx(1.0));
  }
}

TEST_CASE("X is isometric on random composable pairs") {
  Tolerance tol;
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 2;
    const long e = 1 + trial % 3, fdim = 1 + (trial + 1) % 3, es = 1 + (trial + 2) % 3;
    MultiAnalyticOp t1 = fixtures::random_multianalytic(n, e, fdim, 1 + trial % 2, 0.95, rng);
    MultiAnalyticOp t2 = fixtures::random_multianalytic(n, fdim, es, 1, 0.9, rng);
    Factorization f = build_X(t1, t2, 2, tol);
    CHECK(f.identity_residual <= 1e-12);
    CHECK(f.isometry_residual <= 1e-10);
    CHECK(intertwining_residual(f, tol) <= 1e-8);
  }
}

TEST_CASE("Cuntz triple on constant factorizations") {
  Tolerance tol;
  MultiAnalyticOp zero = MultiAnalyticOp::constant(1, scalar(0.0));
  CuntzTriple a = cuntz_triple(build_X(MultiAnalyticOp::identity(1, 1), zero, 4, tol), tol);
  CHECK_FALSE(a.C);
  CHECK(a.E);
  CHECK_FALSE(a.F);
  CuntzTriple b = cuntz_triple(build_X(monomial(1), monomial(2), 4, tol), tol);
  CHECK(b.C);
  CHECK(b.E);
  CHECK(b.F);
}

TEST_CASE("regularity shortcuts") {
  Tolerance tol;
  std::mt19937_64 rng(72);
  SUBCASE("inner right-hand factor") {
    MultiAnalyticOp t1 = fixtures::random_multianalytic(2, 2, 2, 1, 0.8, rng);
    MultiAnalyticOp t2 = fixtures::random_homogeneous_inner(2, 2, 2, 1, rng);
    RegularityShortcuts rs = regularity_shortcuts(t1, t2, 3, tol);
    CHECK(rs.inner_factor2 == Verdict::Yes);
    CHECK(rs.regular);
    CHECK(rs.rank_rule == Verdict::Undetermined);
  }
  SUBCASE("inner product with a non-inner left factor") {
    // Theta_1 isometric constant C -> C^2 and Theta_2 = z [1, 0], which is not inner.
    CMatrix v(2, 1);
    v << 1.0, 0.0;
    CMatrix w(1, 2);
    w << 1.0, 0.0;
    MultiAnalyticOp t1 = MultiAnalyticOp::constant(1, v);
    MultiAnalyticOp t2 = multiply(monomial(1), MultiAnalyticOp::constant(1, w));
    RegularityShortcuts rs = regularity_shortcuts(t1, t2, 4, tol);
    CHECK(rs.inner_theta_rule == Verdict::No);
    CHECK(rs.rank_theta == 0);
    CHECK(rs.rank_rule == Verdict::No);
    CHECK_FALSE(rs.regular);
  }
  SUBCASE("rank additivity on inner pairs") {
    for (int trial = 0; trial < 4; ++trial) {
      MultiAnalyticOp t1 = fixtures::random_homogeneous_inner(2, 1, 2, trial % 2, rng);
      MultiAnalyticOp t2 = fixtures::random_homogeneous_inner(2, 2, 2, 1, rng);
      RegularityShortcuts rs = regularity_shortcuts(t1, t2, 3, tol);
      CHECK(rs.rank_theta == 0);
      CHECK(rs.rank1 == 0);
      CHECK(rs.rank2 == 0);
      CHECK(rs.rank_rule == Verdict::Yes);
      CHECK(rs.regular);
    }
  }
}

TEST_CASE("trivial factorizations give trivial subspaces") {
  Tolerance tol;
  std::mt19937_64 rng(73);
  fixtures::FlagTuple ft = fixtures::random_flag_tuple(2, 3, 0.8, rng);
  MultiAnalyticOp th = prune(char_fn(ft.t, 4), 1e-13);
  const long es = th.dim_out(), e = th.dim_in();

  ModelSubspaces right = subspaces_from_factorization(build_X(MultiAnalyticOp::identity(2, e), th, 3, tol), tol);
  CHECK(right.H1.dim() == 0);
  CHECK(right.H2.dim() == right.model.space.H.dim());

  ModelSubspaces left = subspaces_from_factorization(build_X(th, MultiAnalyticOp::identity(2, es), 3, tol), tol);
  CHECK(left.H1.dim() == left.model.space.H.dim());
  CHECK(left.H2.dim() == 0);
  CHECK(left.complement_residual <= 1e-10);
}

TEST_CASE("invariant subspace to factorization and back") {
  std::mt19937_64 rng(74);
  for (int trial = 0; trial < 3; ++trial) {
    fixtures::FlagTuple ft = fixtures::random_flag_tuple(2, 3, 0.8, rng);
    Subspace h1 = tail_subspace(ft, 1 + trial % 2);
    SubspaceFactorization sf = factorization_from_subspace(ft.t, h1, 4);
    CHECK(sf.product_residual <= 1e-8);
    REQUIRE(sf.round_trip_checked);
    CHECK(sf.round_trip_distance <= 1e-6);
    CHECK(sf.factorization.regular);

    Tolerance tol;
    ModelSubspaces ms = subspaces_from_factorization(sf.factorization, tol);
    CHECK(ms.invariance_residual <= 1e-9);
    CHECK(ms.complement_residual <= 1e-8);
    CHECK(ms.membership_residual <= 1e-8);

    TriangulationCheck tc = factor_triangulation_check(sf.factorization, tol);
    CHECK(tc.dim_H1 == h1.dim());
    CHECK(tc.A_coincides == Verdict::Yes);
    CHECK(tc.B_coincides == Verdict::Yes);
    CHECK(tc.nontriviality_agrees);
    CHECK(tc.factorization_nontrivial);
  }
}

TEST_CASE("trivial invariant subspaces give unitary-constant factors") {
  Tolerance tol;
  std::mt19937_64 rng(75);
  fixtures::FlagTuple ft = fixtures::random_flag_tuple(2, 3, 0.8, rng);
  SubspaceFactorization zero = factorization_from_subspace(ft.t, Subspace::zero(3), 4);
  CHECK(classify(zero.factorization.theta1, 3, tol).unitary_constant);
  CHECK(zero.round_trip_distance <= 1e-6);
  SubspaceFactorization full = factorization_from_subspace(ft.t, Subspace::full(3), 4);
  CHECK(classify(full.factorization.theta2, 3, tol).unitary_constant);
  TriangulationCheck tc = factor_triangulation_check(full.factorization, tol);
  CHECK_FALSE(tc.subspace_nontrivial);
  CHECK(tc.nontriviality_agrees);
}

TEST_CASE("factorization_from_subspace preconditions") {
  std::mt19937_64 rng(76);
  fixtures::FlagTuple ft = fixtures::random_flag_tuple(2, 3, 0.8, rng);
  CHECK_THROWS_AS(factorization_from_subspace(ft.t, Subspace(ft.u.leftCols(1)), 4), Error);
  RowContraction co = fixtures::random_coisometric(2, 2, rng);
  CHECK_THROWS_AS(factorization_from_subspace(co, Subspace::zero(2), 4), Error);
}

TEST_CASE("compare factorizations") {
  Tolerance tol;
  SUBCASE("identical") {
    Factorization f = build_X(monomial(1), monomial(2), 5, tol);
    FactorComparison c = compare_factorizations(f, f, tol);
    CHECK(c.relation == FactorRelation::Equal);
    CHECK(c.psi_unitary_constant);
    CHECK(std::abs(c.psi.coeff(Word(1)).coeff(0, 0) - 1.0) < 1e-10);
  }
  SUBCASE("unitary constant absorbed") {
    std::mt19937_64 rng(77);
    MultiAnalyticOp t1 = fixtures::random_homogeneous_inner(2, 1, 2, 1, rng);
    MultiAnalyticOp t2 = fixtures::random_homogeneous_inner(2, 2, 2, 1, rng);
    CMatrix u = fixtures::random_unitary(2, rng);
    Factorization f = build_X(t1, t2, 3, tol);
    Factorization g = build_X(f.theta, conjugate(u, t1, CMatrix::Identity(1, 1)),
                              conjugate(CMatrix::Identity(2, 2), t2, u.adjoint()), 3, tol);
    FactorComparison c = compare_factorizations(f, g, tol);
    CHECK(c.relation == FactorRelation::Equal);
    CHECK(c.psi.deg() == 0);
    CHECK((c.psi.coeff(Word(2)) - u).norm() <= 1e-8);
  }
  SUBCASE("nested monomials") {
    Factorization f = build_X(monomial(1), monomial(2), 5, tol);  // z^3 = z^2 z
    Factorization g = build_X(monomial(2), monomial(1), 5, tol);  // z^3 = z z^2
    FactorComparison c = compare_factorizations(f, g, tol);
    CHECK(c.relation == FactorRelation::Contained);
    CHECK(c.product_residual <= 1e-10);
    CHECK(coefficient_distance(prune(c.psi, 1e-10), monomial(1), 5) <= 1e-10);
    FactorComparison r = compare_factorizations(g, f, tol);
    CHECK(r.relation == FactorRelation::Contains);
  }
}

TEST_CASE("inner-outer split of a nilpotent plus coisometric tuple") {
  Tolerance tol;
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 2; ++trial) {
    RowContraction nil = fixtures::random_nilpotent(2, {1, 1}, 0.8, rng);
    RowContraction co = fixtures::random_coisometric(2, 1, rng);
    CMatrix u = fixtures::random_unitary(3, rng);
    RowContraction t = conjugate(direct_sum(nil, co), u);
    InnerOuterSplit sp = inner_outer_split(t, 3, tol);
    Triangulation tri = triangulate_c0_c1(t, 60, tol);
    CHECK(sp.kernel_dim == 1);
    CHECK(subspace_distance(sp.H0, tri.first) <= 1e-6);
    CHECK(subspace_distance(sp.H1, tri.second) <= 1e-6);
  }
}
