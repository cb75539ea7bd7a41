#include <cmath>
#include <random>

#include "../support/fixtures.hpp"
#include "doctest.h"
#include "fockmodel/charfn.hpp"
#include "fockmodel/errors.hpp"
#include "fockmodel/model.hpp"

using namespace fockmodel;

namespace {

CMatrix scalar(double x) { return CMatrix::Constant(1, 1, x); }

}  // namespace

TEST_CASE("defect row isometry examples") {
  Tolerance tol;
  RowContraction half = RowContraction::checked({scalar(0.5), scalar(0.5)});
  DefectRowIsometry inner = defect_row_isometry(char_fn(RowContraction::checked({scalar(0.0), scalar(0.0)}), 3), 3, tol);
  CHECK(inner.C[0].size() == 0);
  CHECK(inner.is_cuntz);

  for (double c : {0.0, 0.6}) {
    MultiAnalyticOp th = MultiAnalyticOp::constant(1, scalar(c));
    ModelSpace sp = model_space(th, 5, tol);
    REQUIRE(sp.defect_rank() == 6);
    DefectRowIsometry d = defect_row_isometry(sp, tol);
    CHECK_FALSE(d.is_cuntz);
    CHECK(d.cuntz_residual == doctest::Approx(std::sqrt(1 - c * c)));
    // C J f = J S f on degrees <= N-1, i.e. C is the shift in range coordinates.
    auto low = degree_indices(sp.in, 0, 4);
    CMatrix s = creation_matrix(sp.in, 1, Side::Left);
    CHECK((d.C[0] * take_cols(sp.J, low) - take_cols(sp.J * s, low)).norm() < 1e-12);
    CHECK(d.isometry_residual < 1e-12);
  }
  (void)half;
}

TEST_CASE("graph identity") {
  Tolerance tol;
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    MultiAnalyticOp th = fixtures::random_multianalytic(2, 2, 2, 2, 0.9, rng);
    ModelSpace sp = model_space(th, 3, tol);
    CHECK(sp.graph_identity_residual <= 1e-8);
    CVector f = fixtures::random_matrix(sp.in.dim(), 1, rng).col(0);
    CVector full = to_matrix(th, 3, 3 + th.deg()) * f;
    CHECK(std::abs(full.squaredNorm() + (sp.J * f).squaredNorm() - f.squaredNorm()) <= 1e-8 * f.squaredNorm());
    Model md = model_from_theta(th, 3, tol);
    CHECK(md.isometry_residual <= 1e-10);
    CHECK(md.T.contraction_margin() >= -tol.eq_tol);
  }
}

TEST_CASE("model of T = [1/2] is one-dimensional") {
  Tolerance tol;
  RowContraction t = RowContraction::checked({scalar(0.5)});
  Model md = model_from_theta(char_fn(t, 40), 40, tol);
  REQUIRE(md.space.H.dim() == 1);
  CHECK(std::abs(md.T.T[0](0, 0) - 0.5) <= 1e-8);
  ModelOfT mt = model_of_T(t, 40);
  CHECK(mt.moment_residual <= 1e-8);
  CHECK(mt.embedding_residual <= 1e-8);
}

TEST_CASE("model of the zero operator is the truncated shift") {
  Tolerance tol;
  Model md = model_from_theta(MultiAnalyticOp::constant(1, scalar(0.0)), 4, tol);
  REQUIRE(md.space.H.dim() == 5);
  CHECK(md.T.contraction_margin() >= -tol.eq_tol);
  CHECK(compute_Hc(md.T, tol).dim() == 0);
  CHECK(md.projection_residual <= 1e-12);
}

TEST_CASE("inner case: H = ker Theta^* and T^* = S^* restricted") {
  Tolerance tol;
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 5; ++trial) {
    RowContraction t = fixtures::random_nilpotent(2, {1, 1, 1}, 0.9, rng);
    MultiAnalyticOp th = char_fn(t, 4);
    REQUIRE(classify(th, 4, tol).inner);
    Model md = model_from_theta(th, 4, tol);
    CHECK(md.space.defect_rank() == 0);
    CHECK(md.space.H.dim() == t.d);
    CHECK((to_matrix(th, 4).adjoint() * md.space.H.basis()).norm() <= 1e-10);
    CHECK(md.projection_residual <= 1e-10);
    for (int i = 1; i <= 2; ++i) {
      CMatrix s = creation_matrix(md.space.out, i, Side::Left);
      const CMatrix& b = md.space.H.basis();
      CHECK((md.T.T[i - 1].adjoint() - b.adjoint() * s.adjoint() * b).norm() <= 1e-12);
    }
    CHECK(compute_Hc(md.T, tol).dim() == 0);
  }
}

TEST_CASE("model_of_T on nilpotent tuples") {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 5; ++trial) {
    RowContraction t = fixtures::random_nilpotent(2, {1, 2, 1}, 0.9, rng);
    ModelOfT mt = model_of_T(t, 3);
    CHECK(mt.moment_residual <= 1e-10);
    CHECK(mt.embedding_residual <= 1e-10);
  }
  CHECK_THROWS_AS(model_of_T(fixtures::random_coisometric(2, 2, rng), 3), Error);
}

TEST_CASE("moment distance detects a different tuple") {
  std::mt19937_64 rng(64);
  RowContraction a = fixtures::random_nilpotent(2, {1, 1}, 0.9, rng);
  RowContraction b = fixtures::random_nilpotent(2, {1, 1}, 0.5, rng);
  CHECK(moment_distance(a, b, CMatrix::Identity(2, 2), 2) > 0.1);
  CMatrix u = fixtures::random_unitary(2, rng);
  CHECK(moment_distance(a, conjugate(a, u), u.adjoint(), 3) < 1e-12);
}

TEST_CASE("characteristic function of the model is the pure part") {
  Tolerance tol;
  MultiAnalyticOp lam = char_fn(RowContraction::checked({scalar(0.5)}), 40);
  PurePartCheck a = model_charfn_is_pure_part(lam, 40, tol);
  CHECK(a.hypothesis_met);
  CHECK(a.coincide == Verdict::Yes);

  std::mt19937_64 rng(65);
  PurePartCheck u = model_charfn_is_pure_part(MultiAnalyticOp::constant(2, fixtures::random_unitary(2, rng)), 3, tol);
  CHECK(u.model_dim == 0);
  CHECK(u.coincide == Verdict::Yes);

  RowContraction t = fixtures::random_nilpotent(2, {1, 2}, 0.9, rng);
  MultiAnalyticOp th = char_fn(t, 3);
  MultiAnalyticOp with_unitary = direct_sum(th, MultiAnalyticOp::constant(2, fixtures::random_unitary(1, rng)));
  PurePartCheck w = model_charfn_is_pure_part(with_unitary, 3, tol);
  CHECK(w.model_dim == t.d);
  CHECK(w.coincide == Verdict::Yes);

  PurePartCheck c = model_charfn_is_pure_part(MultiAnalyticOp::constant(1, scalar(0.5)), 4, tol);
  CHECK_FALSE(c.hypothesis_met);
  CHECK(c.coincide == Verdict::Undetermined);
}
