#include "fockmodel/dilation.hpp"

#include <algorithm>

#include "fockmodel/charfn.hpp"
#include "fockmodel/errors.hpp"

namespace fockmodel {

CMatrix DilationSystem::embed_H() const {
  CMatrix e = CMatrix::Zero(K, T.d);
  e.topRows(T.d) = CMatrix::Identity(T.d, T.d);
  return e;
}

CMatrix DilationSystem::product(const Word& alpha) const {
  CMatrix p = CMatrix::Identity(K, K);
  for (int l : alpha.letters()) p = p * V[static_cast<std::size_t>(l - 1)];
  return p;
}

DilationSystem build_dilation(const RowContraction& t, int N) {
  if (N < 1) throw Error(ErrorKind::Precondition, "dilation degree must be >= 1");
  const Tolerance& tol = t.tol;
  DefectData dd = defects(t);
  DilationSystem ds;
  ds.T = t;
  ds.N = N;
  ds.delta_T = dd.delta_T;
  ds.D = dd.D;
  ds.defect_dim = dd.D.dim();
  ds.fock = TruncatedFock(t.n, N - 1, ds.defect_dim);
  const long d = t.d, delta = ds.defect_dim;
  ds.K = d + ds.fock.dim();

  for (int i = 1; i <= t.n; ++i) {
    CMatrix v = CMatrix::Zero(ds.K, ds.K);
    v.topLeftCorner(d, d) = t.T[static_cast<std::size_t>(i - 1)];
    // D_i h = B^* delta_T (h in slot i), placed in the degree-0 Fock slot.
    v.block(d, 0, delta, d) = dd.D.basis().adjoint() * dd.delta_T.middleCols((i - 1) * d, d);
    v.bottomRightCorner(ds.fock.dim(), ds.fock.dim()) = creation_matrix(ds.fock, i, Side::Left);
    ds.V.push_back(std::move(v));
  }

  // Isometries with orthogonal ranges on H plus Fock degrees <= N-2.
  std::vector<long> cols;
  for (long k = 0; k < d; ++k) cols.push_back(k);
  for (long r : degree_indices(ds.fock, 0, N - 2)) cols.push_back(d + r);
  for (int i = 0; i < t.n; ++i)
    for (int j = 0; j < t.n; ++j) {
      CMatrix g = take_cols(ds.V[i], cols).adjoint() * take_cols(ds.V[j], cols);
      if (i == j) g -= CMatrix::Identity(g.rows(), g.cols());
      ds.isometry_residual = std::max(ds.isometry_residual, g.size() ? op_norm(g) : 0.0);
    }
  for (int i = 0; i < t.n; ++i) {
    CMatrix vh = ds.V[i].adjoint() * ds.embed_H();
    CMatrix target = CMatrix::Zero(ds.K, d);
    target.topRows(d) = t.T[i].adjoint();
    ds.dilation_residual = std::max(ds.dilation_residual, d ? op_norm(vh - target) : 0.0);
  }

  // Minimality: V_alpha H over |alpha| <= N spans K.
  {
    std::vector<Word> ws = enumerate_words(t.n, N);
    CMatrix span(ds.K, static_cast<long>(ws.size()) * d);
    CMatrix eh = ds.embed_H();
    for (std::size_t k = 0; k < ws.size(); ++k) span.middleCols(static_cast<long>(k) * d, d) = ds.product(ws[k]) * eh;
    Subspace s = range_basis(span, tol);
    ds.minimality_residual = containment_residual(s, Subspace::full(ds.K));
  }

  // Nilpotency order of Phi.
  {
    CMatrix q = CMatrix::Identity(d, d);
    for (int m = 0; m <= N; ++m) {
      if (d == 0 || op_norm(q) <= tol.eq_tol * 1e-3) {
        ds.nilpotency = m;
        break;
      }
      q = phi(t, q);
    }
    ds.exact = ds.nilpotency >= 0 && ds.nilpotency <= N - 1;
  }

  WanderingPair wp = wandering_subspaces(ds);
  ds.L = wp.L;
  ds.L_star = wp.L_star;
  try {
    ds.residual = wold(ds.V, tol).residual;
    ds.residual_converged = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConverged) throw;
    ds.residual = Subspace::zero(ds.K);
    ds.residual_converged = false;
  }
  return ds;
}

WanderingPair wandering_subspaces(const DilationSystem& ds) {
  const Tolerance& tol = ds.T.tol;
  const long d = ds.T.d;
  CMatrix eh = ds.embed_H();
  CMatrix gen(ds.K, ds.T.n * d);
  CMatrix star = eh;
  for (int i = 0; i < ds.T.n; ++i) {
    CMatrix ti = CMatrix::Zero(ds.K, d);
    ti.topRows(d) = ds.T.T[i];
    gen.middleCols(i * d, d) = ds.V[i] * eh - ti;
    star -= ds.V[i] * eh * ds.T.T[i].adjoint();
  }
  WanderingPair wp{range_basis(gen, tol), range_basis(star, tol)};
  DefectData dd = defects(ds.T);
  if (wp.L.dim() != dd.D.dim() || wp.L_star.dim() != dd.D_star.dim())
    throw Error(ErrorKind::StructureViolation, "wandering subspace dimensions differ from defect dimensions");
  return wp;
}

WoldResult wold(const std::vector<CMatrix>& V, const Subspace& space, const Tolerance& tol, int horizon) {
  const long K = space.ambient(), m = space.dim();
  WoldResult res;
  const CMatrix& g = space.basis();
  std::vector<CMatrix> Vg;
  for (const auto& v : V) {
    if (m > 0) {
      CMatrix vg = v * g;
      if ((vg - g * (g.adjoint() * vg)).norm() > tol.eq_tol * std::max(1.0, vg.norm()))
        throw Error(ErrorKind::NotInvariant, "wold: space is not invariant under V");
    }
    Vg.push_back(g.adjoint() * v * g);
  }
  if (m == 0) {
    res.residual = res.wandering = Subspace::zero(K);
    res.converged = true;
    return res;
  }
  CMatrix q = CMatrix::Identity(m, m);
  for (int k = 1; k <= horizon; ++k) {
    CMatrix next = CMatrix::Zero(m, m);
    for (const auto& v : Vg) next += v * q * v.adjoint();
    next = hermitian_part(next);
    double diff = (next - q).norm();
    q = next;
    res.iterations = k;
    if (diff <= tol.eq_tol * 1e-3 || q.norm() <= tol.eq_tol * 1e-3) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged)
    throw Error(ErrorKind::NotConverged, "wold iteration did not settle within " + std::to_string(horizon) + " steps");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(q);
  const auto& ev = es.eigenvalues();
  long r = 0;
  for (long k = 0; k < m; ++k) {
    res.leakage = std::max(res.leakage, std::min(std::abs(ev(k)), std::abs(1.0 - ev(k))));
    if (ev(k) > 0.5) ++r;
  }
  res.residual = Subspace(g * es.eigenvectors().rightCols(r));

  CMatrix ranges(m, m * static_cast<long>(Vg.size()));
  for (std::size_t i = 0; i < Vg.size(); ++i) ranges.middleCols(m * static_cast<long>(i), m) = Vg[i];
  Subspace rv = range_basis(ranges, tol);
  Subspace w = complement(rv);
  res.wandering = Subspace(g * w.basis());

  // Wold identity: residual (+) span{V_alpha W} exhausts the space.
  {
    CMatrix acc = res.residual.basis();
    CMatrix layer = res.wandering.basis();
    for (int k = 0; k <= horizon && layer.cols() > 0 && acc.cols() < m; ++k) {
      CMatrix fresh = layer - acc * (acc.adjoint() * layer);
      Subspace add = range_basis(fresh, tol);
      if (add.dim() == 0) break;
      CMatrix grown(K, acc.cols() + add.dim());
      grown << acc, add.basis();
      acc = grown;
      CMatrix next(K, layer.cols() * static_cast<long>(V.size()));
      for (std::size_t i = 0; i < V.size(); ++i) next.middleCols(layer.cols() * static_cast<long>(i), layer.cols()) = V[i] * layer;
      layer = next.norm() <= tol.eq_tol ? CMatrix(K, 0) : range_basis(next, tol).basis();
    }
    res.identity_residual = containment_residual(Subspace(acc), space);
  }
  return res;
}

WoldResult wold(const std::vector<CMatrix>& V, const Tolerance& tol, int horizon) {
  if (V.empty()) throw Error(ErrorKind::Precondition, "wold needs at least one isometry");
  return wold(V, Subspace::full(V[0].rows()), tol, horizon);
}

FourierRep fourier_representation(const std::vector<CMatrix>& V, const Subspace& W, int margin, const Tolerance& tol) {
  const int n = static_cast<int>(V.size());
  const long K = W.ambient(), r = W.dim();
  FourierRep fr;
  fr.space = TruncatedFock(n, margin, r);
  fr.synth = CMatrix::Zero(K, fr.space.dim());
  if (r > 0) {
    // Columns for word g_i alpha are V_i applied to those for alpha.
    for (const Word& w : fr.space.words()) {
      const long col = fr.space.index(w);
      if (w.empty()) {
        fr.synth.middleCols(col, r) = W.basis();
      } else {
        Word tail(n, std::vector<int>(w.letters().begin() + 1, w.letters().end()));
        fr.synth.middleCols(col, r) = V[static_cast<std::size_t>(w[0] - 1)] * fr.synth.middleCols(fr.space.index(tail), r);
      }
    }
  }
  CMatrix gram = fr.synth.adjoint() * fr.synth - CMatrix::Identity(fr.space.dim(), fr.space.dim());
  fr.orthonormality_residual = gram.size() ? op_norm(gram) : 0.0;
  if (fr.orthonormality_residual > tol.eq_tol)
    throw Error(ErrorKind::NotWandering, "V_alpha W are not orthonormal: residual " +
                                             std::to_string(fr.orthonormality_residual));
  if (margin >= 1 && r > 0) {
    auto cols = degree_indices(fr.space, 0, margin - 1);
    for (int i = 1; i <= n; ++i) {
      CMatrix lhs = V[static_cast<std::size_t>(i - 1)] * take_cols(fr.synth, cols);
      CMatrix rhs = take_cols(fr.synth * creation_matrix(fr.space, i, Side::Left), cols);
      fr.intertwining_residual = std::max(fr.intertwining_residual, op_norm(lhs - rhs));
    }
  }
  return fr;
}

}  // namespace fockmodel
