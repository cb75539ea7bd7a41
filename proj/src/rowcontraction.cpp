#include "fockmodel/rowcontraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fockmodel/errors.hpp"

namespace fockmodel {

RowContraction RowContraction::unchecked(std::vector<CMatrix> T, Tolerance tol) {
  if (T.empty()) throw Error(ErrorKind::Precondition, "tuple must have at least one entry");
  RowContraction r;
  r.n = static_cast<int>(T.size());
  r.d = T[0].rows();
  for (const auto& m : T) {
    if (m.rows() != r.d || m.cols() != r.d) throw Error(ErrorKind::ShapeMismatch, "tuple entries must be d x d");
    if (!m.allFinite()) throw Error(ErrorKind::Precondition, "non-finite matrix entry");
  }
  r.T = std::move(T);
  r.tol = tol;
  return r;
}

RowContraction RowContraction::checked(std::vector<CMatrix> T, Tolerance tol) {
  RowContraction r = unchecked(std::move(T), tol);
  double m = r.contraction_margin();
  if (m < -tol.eq_tol)
    throw Error(ErrorKind::Precondition, "not a row contraction: min eigenvalue of I - sum T_i T_i^* is " +
                                             std::to_string(m));
  return r;
}

CMatrix RowContraction::row() const {
  CMatrix r(d, n * d);
  for (int i = 0; i < n; ++i) r.middleCols(i * d, d) = T[static_cast<std::size_t>(i)];
  return r;
}

CMatrix RowContraction::product(const Word& alpha) const {
  CMatrix p = CMatrix::Identity(d, d);
  for (int l : alpha.letters()) p = p * T[static_cast<std::size_t>(l - 1)];
  return p;
}

double RowContraction::contraction_margin() const {
  if (d == 0) return 1.0;
  CMatrix def = CMatrix::Identity(d, d) - phi(*this, CMatrix::Identity(d, d));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(def));
  return es.eigenvalues()(0);
}

CMatrix phi(const RowContraction& t, const CMatrix& x) {
  CMatrix out = CMatrix::Zero(t.d, t.d);
  for (const auto& m : t.T) out += m * x * m.adjoint();
  return out;
}

CMatrix phi_iterate(const RowContraction& t, int k) {
  if (k < 0) throw Error(ErrorKind::Precondition, "phi_iterate needs k >= 0");
  CMatrix q = CMatrix::Identity(t.d, t.d);
  for (int j = 0; j < k; ++j) q = phi(t, q);
  return hermitian_part(q);
}

LimitResult try_asymptotic_limit(const RowContraction& t, int horizon, const Tolerance& tol) {
  LimitResult res;
  const long d = t.d;
  if (d == 0) {
    res.limit = CMatrix(0, 0);
    res.converged = true;
    return res;
  }
  // Superoperator on column-major vec: vec(T X T^*) = (conj(T) (x) T) vec(X).
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (const auto& m : t.T) {
    CMatrix mc = m.conjugate();
    for (long a = 0; a < d; ++a)
      for (long b = 0; b < d; ++b) s.block(a * d, b * d, d, d) += mc(a, b) * m;
  }
  CVector vid = CVector::Zero(d * d);
  for (long k = 0; k < d; ++k) vid(k * d + k) = 1.0;

  CVector prev = s * vid;  // Phi(I)
  const double target = std::max(1e-14, tol.eq_tol * 1e-6);
  // Roundoff floor: unimodular eigenvalues of the superoperator amplify rounding
  // errors under squaring, so the residual stalls instead of reaching target.
  const double floor = 1e-11;
  const double bound = 2.0 * std::sqrt(static_cast<double>(d));  // |Phi^k(I)|_F <= sqrt d
  const int cap = std::min(horizon, 64);
  double last = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= cap; ++j) {
    s = s * s;
    CVector cur = s * vid;  // Phi^{2^j}(I)
    if (!cur.allFinite() || cur.norm() > bound) break;
    res.residual = (cur - prev).norm();
    res.squarings = j;
    prev = cur;
    const double scale = std::max(1.0, cur.norm());
    if (res.residual <= target * scale || (res.residual <= floor * scale && res.residual >= 0.5 * last)) {
      res.converged = true;
      break;
    }
    last = res.residual;
  }
  res.limit = hermitian_part(Eigen::Map<CMatrix>(prev.data(), d, d));
  return res;
}

CMatrix asymptotic_limit(const RowContraction& t, int horizon, const Tolerance& tol) {
  LimitResult r = try_asymptotic_limit(t, horizon, tol);
  if (!r.converged)
    throw Error(ErrorKind::NotConverged, "asymptotic limit after " + std::to_string(r.squarings) +
                                             " squarings, last residual " + std::to_string(r.residual));
  return r.limit;
}

Subspace compute_Hc(const RowContraction& t, const Tolerance& tol) {
  const long d = t.d;
  if (d == 0) return Subspace::zero(0);
  const Tolerance ktol{std::max(tol.rank_tol, tol.eq_tol), tol.eq_tol};
  CMatrix def = CMatrix::Identity(d, d) - phi(t, CMatrix::Identity(d, d));
  Subspace m = kernel_basis(hermitian_part(def), ktol);
  for (long iter = 0; iter <= d && m.dim() > 0; ++iter) {
    Subspace next = m;
    for (const auto& ti : t.T) next = intersect(next, preimage(ti.adjoint(), m, tol), tol);
    if (next.dim() == m.dim()) break;
    m = next;
  }
  return m;
}

TupleClass classify_tuple(const RowContraction& t, int horizon, const Tolerance& tol) {
  TupleClass c;
  const long d = t.d;
  const double margin = t.contraction_margin();
  c.M = 1.0;
  c.power_bounded = Verdict::Yes;
  if (margin < -tol.eq_tol) {
    // Not a contraction: estimate sup_k |Phi^k(I)| over the horizon.
    double first = 0.0, second = 0.0;
    CMatrix q = CMatrix::Identity(d, d);
    for (int k = 0; k <= horizon; ++k) {
      double nq = op_norm(q);
      (k <= horizon / 2 ? first : second) = std::max(k <= horizon / 2 ? first : second, nq);
      if (!std::isfinite(nq) || nq > 1e12) {
        second = std::numeric_limits<double>::infinity();
        break;
      }
      q = phi(t, q);
    }
    c.power_bounded = second > 2.0 * first + 1e-12 ? Verdict::No : Verdict::Yes;
    c.M = std::sqrt(std::max(first, second));
    c.coisometric = Verdict::No;
    return c;
  }
  CMatrix def = CMatrix::Identity(d, d) - phi(t, CMatrix::Identity(d, d));
  c.coisometric = (d == 0 || op_norm(def) <= tol.eq_tol) ? Verdict::Yes : Verdict::No;
  c.cnc = compute_Hc(t, tol).dim() == 0 ? Verdict::Yes : Verdict::No;
  LimitResult lim = try_asymptotic_limit(t, horizon, tol);
  c.limit_residual = lim.residual;
  if (lim.converged) {
    if (d == 0) {
      c.pure_C0 = c.C1 = Verdict::Yes;
    } else {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(lim.limit);
      c.pure_C0 = es.eigenvalues()(d - 1) <= tol.eq_tol ? Verdict::Yes : Verdict::No;
      c.C1 = es.eigenvalues()(0) > tol.eq_tol ? Verdict::Yes : Verdict::No;
    }
  }
  return c;
}

RowContraction compress(const RowContraction& t, const Subspace& m) {
  std::vector<CMatrix> blocks;
  for (const auto& ti : t.T) blocks.push_back(m.basis().adjoint() * ti * m.basis());
  RowContraction r;
  r.n = t.n;
  r.d = m.dim();
  r.T = std::move(blocks);
  r.tol = t.tol;
  return r;
}

double invariance_residual(const RowContraction& t, const Subspace& m) {
  double worst = 0.0;
  if (m.dim() == 0) return 0.0;
  for (const auto& ti : t.T) {
    CMatrix x = ti * m.basis();
    worst = std::max(worst, op_norm(x - m.basis() * (m.basis().adjoint() * x)));
  }
  return worst;
}

double coinvariance_residual(const RowContraction& t, const Subspace& m) {
  std::vector<CMatrix> adj;
  for (const auto& ti : t.T) adj.push_back(ti.adjoint());
  return invariance_residual(RowContraction::unchecked(adj, t.tol), m);
}

double coisometric_invariance_excess(const RowContraction& t, const Subspace& m) {
  if (t.d == 0) return 0.0;
  CMatrix p = m.projector();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(phi(t, p) - p));
  return es.eigenvalues()(t.d - 1);
}

RowContraction conjugate(const RowContraction& t, const CMatrix& u) {
  std::vector<CMatrix> out;
  for (const auto& ti : t.T) out.push_back(u.adjoint() * ti * u);
  return RowContraction::unchecked(out, t.tol);
}

RowContraction direct_sum(const RowContraction& a, const RowContraction& b) {
  if (a.n != b.n) throw Error(ErrorKind::ShapeMismatch, "direct_sum: tuple lengths differ");
  std::vector<CMatrix> out;
  for (int i = 0; i < a.n; ++i) out.push_back(direct_sum(a.T[i], b.T[i]));
  return RowContraction::unchecked(out, a.tol);
}

namespace {

Triangulation blocks_for(const RowContraction& t, const Subspace& first) {
  Triangulation tri;
  tri.first = first;
  tri.second = complement(first);
  const CMatrix& f = tri.first.basis();
  const CMatrix& s = tri.second.basis();
  for (const auto& ti : t.T) {
    tri.A.push_back(f.adjoint() * ti * f);
    tri.B.push_back(s.adjoint() * ti * s);
    tri.C.push_back(s.adjoint() * ti * f);
    if (f.cols() > 0 && s.cols() > 0) tri.upper_residual = std::max(tri.upper_residual, op_norm(f.adjoint() * ti * s));
  }
  return tri;
}

RowContraction block_tuple(const std::vector<CMatrix>& blocks, const Tolerance& tol) {
  RowContraction r;
  r.n = static_cast<int>(blocks.size());
  r.d = blocks.empty() ? 0 : blocks[0].rows();
  r.T = blocks;
  r.tol = tol;
  return r;
}

}  // namespace

Triangulation triangulate_c_cnc(const RowContraction& t, const Tolerance& tol) {
  Triangulation tri = blocks_for(t, compute_Hc(t, tol));
  if (tri.upper_residual > tol.eq_tol)
    throw Error(ErrorKind::StructureViolation, "H_c triangulation upper block " + std::to_string(tri.upper_residual));
  RowContraction a = block_tuple(tri.A, tol), b = block_tuple(tri.B, tol);
  if (a.d > 0) {
    double coiso = op_norm(CMatrix::Identity(a.d, a.d) - phi(a, CMatrix::Identity(a.d, a.d)));
    if (coiso > tol.eq_tol)
      throw Error(ErrorKind::StructureViolation, "coisometric block defect " + std::to_string(coiso));
  }
  if (b.d > 0 && compute_Hc(b, tol).dim() != 0)
    throw Error(ErrorKind::StructureViolation, "c.n.c. block has a coisometric part");
  return tri;
}

Triangulation triangulate_c0_c1(const RowContraction& t, int horizon, const Tolerance& tol) {
  CMatrix q = asymptotic_limit(t, horizon, tol);
  Subspace h0 = t.d == 0 ? Subspace::zero(0) : kernel_basis(q, tol);
  Triangulation tri = blocks_for(t, h0);
  if (tri.upper_residual > tol.eq_tol)
    throw Error(ErrorKind::StructureViolation, "C.0/C.1 triangulation upper block " + std::to_string(tri.upper_residual));
  // Any triangulation of this type has its first space equal to ker lim Phi^k(I);
  // confirming the block classes re-derives H_0 from the blocks.
  TupleClass ca = classify_tuple(block_tuple(tri.A, tol), horizon, tol);
  TupleClass cb = classify_tuple(block_tuple(tri.B, tol), horizon, tol);
  if (ca.pure_C0 != Verdict::Yes) throw Error(ErrorKind::StructureViolation, "first block is not of class C.0");
  if (cb.C1 != Verdict::Yes) throw Error(ErrorKind::StructureViolation, "second block is not of class C.1");
  return tri;
}

}  // namespace fockmodel
