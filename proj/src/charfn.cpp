#include "fockmodel/charfn.hpp"

#include <algorithm>

#include "fockmodel/errors.hpp"

namespace fockmodel {

CMatrix DefectData::slot(int i, int n, long d) const {
  CMatrix s = CMatrix::Zero(n * d, d);
  s.middleRows((i - 1) * d, d) = CMatrix::Identity(d, d);
  return s;
}

DefectData defects(const RowContraction& t) {
  const Tolerance& tol = t.tol;
  const long d = t.d, nd = t.n * t.d;
  DefectData dd;
  CMatrix row = t.row();
  CMatrix a_star = CMatrix::Identity(d, d) - row * row.adjoint();
  CMatrix a = CMatrix::Identity(nd, nd) - row.adjoint() * row;
  dd.delta_T_star = psd_sqrt(a_star, tol);
  dd.delta_T = psd_sqrt(a, tol);
  dd.D_star = range_basis(dd.delta_T_star, tol);
  dd.D = range_basis(dd.delta_T, tol);
  double r1 = d ? op_norm(dd.delta_T_star * dd.delta_T_star - a_star) : 0.0;
  double r2 = nd ? op_norm(dd.delta_T * dd.delta_T - a) : 0.0;
  dd.identity_residual = std::max(r1, r2);
  return dd;
}

FockVector char_symbol(const RowContraction& t, const DefectData& dd, const CVector& h, int n_w) {
  const int n = t.n;
  const long d = t.d, ds = dd.D_star.dim();
  if (h.size() != dd.D.dim()) throw Error(ErrorKind::ShapeMismatch, "symbol argument must be in D coordinates");
  TruncatedFock out(n, n_w, ds);
  FockVector v = FockVector::Zero(out.dim());
  if (ds == 0) return v;
  const CMatrix& bs = dd.D_star.basis();
  CVector hv = dd.D.basis() * h;  // in C^{nd}

  CVector zero_part = -(t.row() * hv);
  CVector z = bs.adjoint() * zero_part;
  double outside = (zero_part - bs * z).norm();
  if (outside > t.tol.eq_tol * std::max(1.0, hv.norm()))
    throw Error(ErrorKind::StructureViolation, "degree-0 symbol component leaves D_*: " + std::to_string(outside));
  v.segment(out.index(Word(n)), ds) = z;

  if (n_w < 1) return v;
  CVector dh = dd.delta_T * hv;
  CMatrix proj = bs.adjoint() * dd.delta_T_star;
  // y(alpha) = T_alpha^* x_i, built by appending letters: T_{alpha g_j}^* = T_j^* T_alpha^*.
  TruncatedFock tails(n, n_w - 1, 1);
  for (int i = 1; i <= n; ++i) {
    std::vector<CVector> y(static_cast<std::size_t>(tails.word_count()));
    y[0] = dh.segment((i - 1) * d, d);
    for (const Word& a : tails.words()) {
      const long ia = tails.index(a);
      if (!a.empty()) {
        Word parent(n, std::vector<int>(a.letters().begin(), a.letters().end() - 1));
        y[static_cast<std::size_t>(ia)] = t.T[static_cast<std::size_t>(a[a.length() - 1] - 1)].adjoint() *
                                          y[static_cast<std::size_t>(tails.index(parent))];
      }
      v.segment(out.index(concat(Word::generator(n, i), a)), ds) = proj * y[static_cast<std::size_t>(ia)];
    }
  }
  return v;
}

FockVector char_symbol(const RowContraction& t, const CVector& h, int n_w) {
  return char_symbol(t, defects(t), h, n_w);
}

MultiAnalyticOp char_fn(const RowContraction& t, const DefectData& dd, int deg) {
  if (deg < 0) throw Error(ErrorKind::Precondition, "char_fn degree must be >= 0");
  const long delta = dd.D.dim(), ds = dd.D_star.dim();
  TruncatedFock out(t.n, deg, ds);
  CMatrix symbols(out.dim(), delta);
  for (long j = 0; j < delta; ++j) symbols.col(j) = char_symbol(t, dd, CVector::Unit(delta, j), deg);
  MultiAnalyticOp op = from_symbols(t.n, ds, deg, symbols);
  // Pairing cross-check: A (1 (x) h) reproduces the symbol.
  CMatrix back = to_matrix(op, 0, deg);
  if (back.size() && (back - symbols).norm() > t.tol.eq_tol)
    throw Error(ErrorKind::StructureViolation, "coefficient pairing does not reproduce the symbol");
  return op;
}

MultiAnalyticOp char_fn(const RowContraction& t, int deg) { return char_fn(t, defects(t), deg); }

MultiAnalyticOp char_fn_geometric(const DilationSystem& ds) {
  const Tolerance& tol = ds.T.tol;
  const int margin = ds.N - 1;
  FourierRep fr = fourier_representation(ds.V, ds.L_star, margin, tol);
  CMatrix symbols = fr.synth.adjoint() * ds.L.basis();
  return from_symbols(ds.T.n, ds.L_star.dim(), margin, symbols);
}

}  // namespace fockmodel
