#pragma once

// Seeded generators shared by the unit and acceptance suites.

#include <cmath>
#include <random>
#include <vector>

#include "fockmodel/charfn.hpp"
#include "fockmodel/multianalytic.hpp"
#include "fockmodel/numerics.hpp"
#include "fockmodel/rowcontraction.hpp"

namespace fixtures {

using namespace fockmodel;

inline CMatrix random_matrix(long r, long c, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix m(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

inline CMatrix random_unitary(long d, std::mt19937_64& rng) {
  if (d == 0) return CMatrix(0, 0);
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(d, d, rng));
  CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  return q;
}

/// Random tuple scaled so that |[T_1 ... T_n]| = scale.
inline RowContraction random_row_contraction(int n, long d, double scale, std::mt19937_64& rng) {
  std::vector<CMatrix> t;
  for (int i = 0; i < n; ++i) t.push_back(random_matrix(d, d, rng));
  RowContraction r = RowContraction::unchecked(t);
  double nr = op_norm(r.row());
  for (auto& m : r.T) m *= scale / nr;
  return r;
}

/// Tuple mapping level k into level k+1 of a flag with `levels` blocks, in a
/// random orthonormal basis; T_alpha = 0 once |alpha| >= levels.
inline RowContraction random_nilpotent(int n, const std::vector<long>& level_dims, double scale,
                                       std::mt19937_64& rng) {
  long d = 0;
  std::vector<long> off;
  for (long s : level_dims) {
    off.push_back(d);
    d += s;
  }
  std::vector<CMatrix> t;
  for (int i = 0; i < n; ++i) {
    CMatrix m = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k + 1 < level_dims.size(); ++k)
      m.block(off[k + 1], off[k], level_dims[k + 1], level_dims[k]) = random_matrix(level_dims[k + 1], level_dims[k], rng);
    t.push_back(m);
  }
  RowContraction r = RowContraction::unchecked(t);
  double nr = op_norm(r.row());
  CMatrix u = random_unitary(d, rng);
  for (auto& m : r.T) m = u * m * u.adjoint() * (scale / nr);
  return r;
}

/// Coisometric tuple on C^c.
inline RowContraction random_coisometric(int n, long c, std::mt19937_64& rng) {
  // Rows of a random co-isometry C^{nc} -> C^c.
  CMatrix v = random_unitary(n * c, rng).topRows(c);
  std::vector<CMatrix> t;
  for (int i = 0; i < n; ++i) t.push_back(v.middleCols(i * c, c));
  return RowContraction::unchecked(t);
}

/// Tuple with a coisometric part C on the first block, a pure part P and a
/// coupling Y with sum Y_i C_i^* = 0, conjugated by a random unitary.
inline RowContraction random_mixed(int n, long c, long p, double scale, std::mt19937_64& rng) {
  RowContraction co = random_coisometric(n, c, rng);
  CMatrix crow = co.row();                                    // c x nc
  CMatrix proj = CMatrix::Identity(n * c, n * c) - crow.adjoint() * crow;
  CMatrix y = random_matrix(p, n * c, rng) * proj;             // p x nc
  CMatrix prow = random_matrix(p, n * p, rng);                 // p x np
  CMatrix both(p, n * (c + p));
  both << y, prow;
  double nb = op_norm(both);
  y *= scale / nb;
  prow *= scale / nb;
  const long d = c + p;
  std::vector<CMatrix> t;
  for (int i = 0; i < n; ++i) {
    CMatrix m = CMatrix::Zero(d, d);
    m.topLeftCorner(c, c) = co.T[i];
    m.bottomLeftCorner(p, c) = y.middleCols(i * c, c);
    m.bottomRightCorner(p, p) = prow.middleCols(i * p, p);
    t.push_back(m);
  }
  RowContraction r = RowContraction::unchecked(t);
  CMatrix u = random_unitary(d, rng);
  for (auto& m : r.T) m = u * m * u.adjoint();
  return r;
}

/// Random multi-analytic operator with every coefficient of length <= deg,
/// scaled so that sum_k |column stack of theta_(alpha), |alpha| = k| = scale,
/// which bounds the operator norm.
inline MultiAnalyticOp random_multianalytic(int n, long din, long dout, int deg, double scale, std::mt19937_64& rng) {
  MultiAnalyticOp op(n, din, dout);
  for (const Word& w : enumerate_words(n, deg)) op.set(w, random_matrix(dout, din, rng));
  double bound = 0.0;
  for (int k = 0; k <= deg; ++k) {
    CMatrix stack(0, din);
    for (const auto& [w, m] : op.coeffs()) {
      if (w.length() != k) continue;
      CMatrix grown(stack.rows() + dout, din);
      grown << stack, m;
      stack = grown;
    }
    bound += op_norm(stack);
  }
  MultiAnalyticOp out(n, din, dout);
  for (const auto& [w, m] : op.coeffs()) out.set(w, m * (scale / bound));
  return out;
}

/// Homogeneous inner operator: coefficients on words of length k whose column
/// stack is a random isometry (needs n^k dout >= din).
inline MultiAnalyticOp random_homogeneous_inner(int n, long din, long dout, int k, std::mt19937_64& rng) {
  std::vector<Word> ws;
  for (const Word& w : enumerate_words(n, k))
    if (w.length() == k) ws.push_back(w);
  const long rows = static_cast<long>(ws.size()) * dout;
  CMatrix iso = random_unitary(rows, rng).leftCols(din);
  MultiAnalyticOp op(n, din, dout);
  for (std::size_t j = 0; j < ws.size(); ++j) op.set(ws[j], iso.middleRows(static_cast<long>(j) * dout, dout));
  return op;
}

/// Nilpotent tuple with T_i strictly lower triangular in a random orthonormal
/// basis u; the span of the last k columns of u is jointly invariant.
struct FlagTuple {
  RowContraction t;
  CMatrix u;
};

inline FlagTuple random_flag_tuple(int n, long d, double scale, std::mt19937_64& rng) {
  std::vector<CMatrix> t;
  for (int i = 0; i < n; ++i) {
    CMatrix m = random_matrix(d, d, rng);
    for (long r = 0; r < d; ++r)
      for (long c = r; c < d; ++c) m(r, c) = 0.0;
    t.push_back(m);
  }
  RowContraction r = RowContraction::unchecked(t);
  double nr = op_norm(r.row());
  CMatrix u = random_unitary(d, rng);
  for (auto& m : r.T) m = u * m * u.adjoint() * (scale / nr);
  return {r, u};
}

/// Window e_0 .. e_L of the bilateral shift with weights w_k on e_k -> e_{k+1}
/// (k < L) and weight 1 elsewhere. The defects are those of the bilateral
/// operator; it is similar to the unweighted shift via diag(prod_{j<k} w_j).
struct WeightedShift {
  RowContraction t;
  DefectData dd;
  double cond_X = 1.0;
};

inline WeightedShift weighted_shift(const std::vector<double>& w) {
  const long L = static_cast<long>(w.size());
  CMatrix t = CMatrix::Zero(L + 1, L + 1);
  CMatrix dt = CMatrix::Zero(L + 1, L + 1), dts = CMatrix::Zero(L + 1, L + 1);
  double prod = 1.0;
  for (long k = 0; k < L; ++k) {
    const double wk = w[static_cast<std::size_t>(k)];
    t(k + 1, k) = wk;
    dt(k, k) = std::sqrt(1.0 - wk * wk);
    dts(k + 1, k + 1) = std::sqrt(1.0 - wk * wk);
    prod *= wk;
  }
  WeightedShift ws{RowContraction::unchecked({t}), {}, 1.0 / prod};
  Tolerance tol;
  ws.dd.delta_T = dt;
  ws.dd.delta_T_star = dts;
  ws.dd.D = range_basis(dt, tol);
  ws.dd.D_star = range_basis(dts, tol);
  return ws;
}

}  // namespace fixtures
