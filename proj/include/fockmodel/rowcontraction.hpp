#pragma once

#include <vector>

#include "fockmodel/multianalytic.hpp"
#include "fockmodel/numerics.hpp"
#include "fockmodel/words.hpp"

namespace fockmodel {

/// n-tuple of d x d matrices. `checked` enforces I - sum T_i T_i^* >= -eq_tol.
struct RowContraction {
  int n = 1;
  long d = 0;
  std::vector<CMatrix> T;
  Tolerance tol;

  static RowContraction checked(std::vector<CMatrix> T, Tolerance tol = {});
  static RowContraction unchecked(std::vector<CMatrix> T, Tolerance tol = {});

  /// The row operator [T_1 ... T_n] : C^{nd} -> C^d.
  CMatrix row() const;
  /// T_alpha = T_{i1} ... T_{ik}.
  CMatrix product(const Word& alpha) const;
  /// Smallest eigenvalue of I - sum T_i T_i^*.
  double contraction_margin() const;
};

/// Phi(X) = sum_i T_i X T_i^*.
CMatrix phi(const RowContraction& t, const CMatrix& x);
/// Phi^k(I) by k applications of phi.
CMatrix phi_iterate(const RowContraction& t, int k);

struct LimitResult {
  CMatrix limit;
  bool converged = false;
  int squarings = 0;
  double residual = 0.0;
};

/// lim_k Phi^k(I) by repeated squaring of the superoperator; horizon caps the
/// number of squarings. Does not throw.
LimitResult try_asymptotic_limit(const RowContraction& t, int horizon, const Tolerance& tol);
/// As above, throwing NotConverged.
CMatrix asymptotic_limit(const RowContraction& t, int horizon, const Tolerance& tol);

struct TupleClass {
  Verdict pure_C0 = Verdict::Undetermined;
  Verdict C1 = Verdict::Undetermined;
  Verdict coisometric = Verdict::Undetermined;
  Verdict cnc = Verdict::Undetermined;
  Verdict power_bounded = Verdict::Undetermined;
  double M = 0.0;
  double limit_residual = 0.0;
};

TupleClass classify_tuple(const RowContraction& t, int horizon, const Tolerance& tol);

/// Largest T^*-invariant subspace on which sum |T_i^* h|^2 = |h|^2.
Subspace compute_Hc(const RowContraction& t, const Tolerance& tol);

/// Block form with respect to first (+) second:
///   T_i = [[A_i, 0], [C_i, B_i]].
struct Triangulation {
  Subspace first;
  Subspace second;
  std::vector<CMatrix> A;
  std::vector<CMatrix> B;
  std::vector<CMatrix> C;
  double upper_residual = 0.0;
};

/// H = H_c (+) H_cnc, A coisometric, B c.n.c.
Triangulation triangulate_c_cnc(const RowContraction& t, const Tolerance& tol);
/// H = H_0 (+) H_1, A of class C.0, B of class C.1.
Triangulation triangulate_c0_c1(const RowContraction& t, int horizon, const Tolerance& tol);

/// Compression of the tuple to a subspace, in the subspace's basis coordinates.
RowContraction compress(const RowContraction& t, const Subspace& m);
/// max_i |(I - P_M) T_i P_M|.
double invariance_residual(const RowContraction& t, const Subspace& m);
/// max_i |(I - P_M) T_i^* P_M|.
double coinvariance_residual(const RowContraction& t, const Subspace& m);
/// Largest eigenvalue of sum_i T_i P_M T_i^* - P_M; at most eq_tol when M is
/// invariant under a coisometric tuple.
double coisometric_invariance_excess(const RowContraction& t, const Subspace& m);

/// Joint unitary conjugation U^* T_i U.
RowContraction conjugate(const RowContraction& t, const CMatrix& u);
RowContraction direct_sum(const RowContraction& a, const RowContraction& b);

}  // namespace fockmodel
