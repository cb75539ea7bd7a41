#include "fockmodel/model.hpp"

#include <algorithm>

#include "fockmodel/charfn.hpp"
#include "fockmodel/errors.hpp"

namespace fockmodel {

namespace {

constexpr double kConditioningBound = 1e8;

struct Pinv {
  CMatrix inverse;
  CMatrix range;  // orthonormal basis of the kept left singular vectors
  double conditioning = 1.0;
};

Pinv thresholded_pinv(const CMatrix& a, const Tolerance& tol) {
  Pinv p;
  if (a.size() == 0) {
    p.inverse = CMatrix::Zero(a.cols(), a.rows());
    p.range = CMatrix::Zero(a.rows(), 0);
    return p;
  }
  Svd svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double thr = rank_threshold(smax, tol);
  long k = 0;
  while (k < s.size() && s(k) > thr) ++k;
  p.range = svd.matrixU().leftCols(k);
  CMatrix sinv = CMatrix::Zero(k, k);
  for (long j = 0; j < k; ++j) sinv(j, j) = 1.0 / s(j);
  p.inverse = svd.matrixV().leftCols(k) * sinv * p.range.adjoint();
  p.conditioning = k ? smax / s(k - 1) : 1.0;
  return p;
}

CMatrix poisson(const RowContraction& t, const DefectData& dd, int N_w) {
  const long ds = dd.D_star.dim();
  TruncatedFock out(t.n, N_w, ds);
  CMatrix k = CMatrix::Zero(out.dim(), t.d);
  if (ds == 0) return k;
  const CMatrix proj = dd.D_star.basis().adjoint() * dd.delta_T_star;
  std::vector<CMatrix> adj(static_cast<std::size_t>(out.word_count()));
  for (const Word& w : out.words()) {
    const auto iw = static_cast<std::size_t>(word_index(w));
    if (w.empty()) {
      adj[iw] = CMatrix::Identity(t.d, t.d);
    } else {
      Word parent(t.n, std::vector<int>(w.letters().begin(), w.letters().end() - 1));
      adj[iw] = t.T[static_cast<std::size_t>(w[w.length() - 1] - 1)].adjoint() *
                adj[static_cast<std::size_t>(word_index(parent))];
    }
    k.middleRows(out.index(w), ds) = proj * adj[iw];
  }
  return k;
}

}  // namespace

ModelSpace model_space(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol) {
  if (N_w < 0) throw Error(ErrorKind::Precondition, "model working degree must be >= 0");
  ModelSpace s;
  s.theta = theta;
  s.N_w = N_w;
  s.in = TruncatedFock(theta.n(), N_w, theta.dim_in());
  s.out = TruncatedFock(theta.n(), N_w, theta.dim_out());
  const long m = s.in.dim();

  CMatrix full = to_matrix(theta, N_w, N_w + theta.deg());
  CMatrix g = hermitian_part(CMatrix::Identity(m, m) - full.adjoint() * full);
  GramRange gr = gram_range(g, tol);
  const long r = gr.values.size();
  s.J = CMatrix(r, m);
  for (long k = 0; k < r; ++k) s.J.row(k) = std::sqrt(gr.values(k)) * gr.vectors.col(k).adjoint();
  s.graph_identity_residual = m ? op_norm(full.adjoint() * full + s.J.adjoint() * s.J - CMatrix::Identity(m, m)) : 0.0;

  s.K = s.out.dim() + r;
  s.graph = CMatrix(s.K, m);
  s.graph << to_matrix(theta, N_w), s.J;
  s.H = m ? kernel_basis(s.graph.adjoint(), tol) : Subspace::full(s.K);
  return s;
}

DefectRowIsometry defect_row_isometry(const ModelSpace& space, const Tolerance& tol) {
  DefectRowIsometry d;
  const int n = space.theta.n();
  const long r = space.defect_rank();
  if (r == 0) {
    d.C.assign(static_cast<std::size_t>(n), CMatrix(0, 0));
    d.is_cuntz = true;
    return d;
  }
  const CMatrix& j = space.J;
  const int N = space.N_w;

  std::vector<long> low = N >= 1 ? degree_indices(space.in, 0, N - 1) : std::vector<long>{};
  Pinv p = thresholded_pinv(take_cols(j, low), tol);
  d.conditioning = p.conditioning;
  d.defined_rank = p.range.cols();
  if (d.conditioning > kConditioningBound)
    throw Error(ErrorKind::IllConditioned, "defect row isometry solve has conditioning " + std::to_string(d.conditioning));
  for (int i = 1; i <= n; ++i) {
    CMatrix shifted = take_cols(j * creation_matrix(space.in, i, Side::Left), low);
    d.C.push_back(shifted * p.inverse);
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CMatrix gm = p.range.adjoint() * d.C[a].adjoint() * d.C[b] * p.range;
      if (a == b) gm -= CMatrix::Identity(gm.rows(), gm.cols());
      if (gm.size()) d.isometry_residual = std::max(d.isometry_residual, op_norm(gm));
    }

  CMatrix zero = take_cols(j, degree_indices(space.in, 0, 0));
  Subspace upper = N >= 1 ? range_basis(take_cols(j, degree_indices(space.in, 1, N)), tol) : Subspace::zero(r);
  CMatrix rest = zero - upper.basis() * (upper.basis().adjoint() * zero);
  d.cuntz_residual = rest.size() ? op_norm(rest) : 0.0;
  d.is_cuntz = d.cuntz_residual <= tol.eq_tol;
  return d;
}

DefectRowIsometry defect_row_isometry(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol) {
  return defect_row_isometry(model_space(theta, N_w, tol), tol);
}

Model model_from_theta(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol) {
  Model md;
  md.space = model_space(theta, N_w, tol);
  md.defect = defect_row_isometry(md.space, tol);
  const int n = theta.n();
  const CMatrix& b = md.space.H.basis();
  const long K = md.space.K;

  for (int i = 1; i <= n; ++i)
    md.V.push_back(direct_sum(creation_matrix(md.space.out, i, Side::Left), md.defect.C[static_cast<std::size_t>(i - 1)]));

  std::vector<CMatrix> ts;
  for (const auto& v : md.V) {
    CMatrix va = v.adjoint() * b;
    CMatrix inside = b.adjoint() * va;
    if (va.size()) md.projection_residual = std::max(md.projection_residual, op_norm(va - b * inside));
    ts.push_back(inside.adjoint());
  }
  md.T = RowContraction::unchecked(ts, tol);

  // Isometries with orthogonal ranges on the part where S_i and C_i are both defined.
  std::vector<long> low = N_w >= 1 ? degree_indices(md.space.out, 0, N_w - 1) : std::vector<long>{};
  Pinv p = thresholded_pinv(take_cols(md.space.J, N_w >= 1 ? degree_indices(md.space.in, 0, N_w - 1) : std::vector<long>{}), tol);
  CMatrix dom = CMatrix::Zero(K, static_cast<long>(low.size()) + p.range.cols());
  for (std::size_t k = 0; k < low.size(); ++k) dom(low[k], static_cast<long>(k)) = 1.0;
  dom.bottomRightCorner(md.space.defect_rank(), p.range.cols()) = p.range;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      CMatrix gm = dom.adjoint() * md.V[a].adjoint() * md.V[c] * dom;
      if (a == c) gm -= CMatrix::Identity(gm.rows(), gm.cols());
      if (gm.size()) md.isometry_residual = std::max(md.isometry_residual, op_norm(gm));
    }
  return md;
}

CMatrix poisson_embedding(const RowContraction& t, int N_w) { return poisson(t, defects(t), N_w); }

double moment_distance(const RowContraction& t, const RowContraction& s, const CMatrix& u, int margin) {
  if (t.n != s.n) throw Error(ErrorKind::AlphabetMismatch, "moment comparison needs equal tuple lengths");
  std::vector<Word> ws = enumerate_words(t.n, margin);
  std::vector<CMatrix> pt, ps;
  for (const Word& w : ws) {
    pt.push_back(t.product(w));
    ps.push_back(u.adjoint() * s.product(w));
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < ws.size(); ++a)
    for (std::size_t b = 0; b < ws.size(); ++b) {
      CMatrix lhs = pt[a] * pt[b].adjoint();
      CMatrix rhs = ps[a] * ps[b].adjoint();
      if (lhs.size()) worst = std::max(worst, op_norm(lhs - rhs));
    }
  return worst;
}

ModelOfT model_of_T(const RowContraction& t, int N_w, int moment_margin) {
  const Tolerance& tol = t.tol;
  Subspace hc = compute_Hc(t, tol);
  if (hc.dim() > 0)
    throw Error(ErrorKind::NotCNC, "tuple has a coisometric part of dimension " + std::to_string(hc.dim()));
  DefectData dd = defects(t);
  ModelOfT res;
  res.moment_margin = moment_margin;
  res.theta = char_fn(t, dd, N_w);
  res.model = model_from_theta(res.theta, N_w, tol);
  const CMatrix& b = res.model.space.H.basis();
  if (b.cols() != t.d)
    throw Error(ErrorKind::TruncationUnstable, "model space has dimension " + std::to_string(b.cols()) +
                                                   " but the tuple acts on dimension " + std::to_string(t.d));
  CMatrix kp = poisson(t, dd, N_w);
  CMatrix emb = CMatrix::Zero(res.model.space.K, t.d);
  emb.topRows(kp.rows()) = kp;
  CMatrix u0 = b.adjoint() * emb;
  res.embedding_residual = std::max(op_norm(emb - b * u0), op_norm(kp.adjoint() * kp - CMatrix::Identity(t.d, t.d)));
  res.U = polar_unitary(u0);
  res.moment_residual = moment_distance(t, res.model.T, res.U, moment_margin);
  return res;
}

PurePartCheck model_charfn_is_pure_part(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol) {
  PurePartCheck pc;
  Model md = model_from_theta(theta, N_w, tol);
  pc.model_dim = md.space.H.dim();
  pc.hypothesis_met = md.defect.is_cuntz;
  if (!pc.hypothesis_met) {
    pc.reason = "hypothesis not met: defect closure is not spanned by its shifted part (residual " +
                std::to_string(md.defect.cuntz_residual) + ")";
    return pc;
  }
  PureUnitaryDecomposition pu = pure_unitary_decomposition(theta, tol);
  if (pc.model_dim == 0) {
    const bool empty = pu.pure.dim_in() == 0 && pu.pure.dim_out() == 0;
    pc.coincide = empty ? Verdict::Yes : Verdict::No;
    pc.reason = empty ? "model space and purely contractive part are both trivial"
                      : "model space is trivial but the purely contractive part is not";
    return pc;
  }
  MultiAnalyticOp mine = char_fn(md.T, std::max(pu.pure.deg(), N_w));
  Coincidence c = coincides(mine, pu.pure, tol);
  pc.coincide = c.coincide;
  pc.residual = c.residual;
  pc.reason = c.reason;
  return pc;
}

}  // namespace fockmodel
