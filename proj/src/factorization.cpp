#include "fockmodel/factorization.hpp"

#include <algorithm>
#include <cmath>

#include "fockmodel/charfn.hpp"
#include "fockmodel/errors.hpp"

namespace fockmodel {

namespace {

constexpr double kRegularTol = 1e-6;
constexpr double kPruneTol = 1e-12;
constexpr double kDefectFloor = 1e-12;

CMatrix defect_gram(const CMatrix& m) {
  return hermitian_part(CMatrix::Identity(m.cols(), m.cols()) - m.adjoint() * m);
}

// Square root of a defect Gram matrix with roundoff-level eigenvalues zeroed.
CMatrix defect_sqrt(const CMatrix& g) {
  if (g.size() == 0) return g;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g);
  RVector ev = es.eigenvalues();
  for (long k = 0; k < ev.size(); ++k) ev(k) = ev(k) > kDefectFloor ? std::sqrt(ev(k)) : 0.0;
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double min_eigenvalue(const CMatrix& g) {
  if (g.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double norm_or_zero(const CMatrix& m) { return m.size() ? op_norm(m) : 0.0; }

// Largest residual of the columns of `targets` off range(basis).
double off_range(const Subspace& range, const CMatrix& targets) {
  if (targets.cols() == 0) return 0.0;
  CMatrix rest = targets - range.basis() * (range.basis().adjoint() * targets);
  return rest.colwise().norm().maxCoeff();
}

double regularity_at(const Factorization& f, const Subspace& rY, int m) {
  const long mid = f.mid.dim(), in = f.in.dim();
  auto mid_low = degree_indices(f.mid, 0, m);
  auto in_low = degree_indices(f.in, 0, m);
  CMatrix targets = CMatrix::Zero(mid + in, static_cast<long>(mid_low.size() + in_low.size()));
  targets.topLeftCorner(mid, static_cast<long>(mid_low.size())) = take_cols(f.delta2, mid_low);
  targets.bottomRightCorner(in, static_cast<long>(in_low.size())) = take_cols(f.delta1, in_low);
  return off_range(rY, targets);
}

// Truncated rank of a Toeplitz defect: stable between degrees top-1 and top,
// or -1 when it still grows.
long stable_rank(const CMatrix& delta, const TruncatedFock& space, const Tolerance& tol) {
  const int top = space.max_deg();
  if (top < 1) return -1;
  CMatrix g = delta * delta;
  auto low = degree_indices(space, 0, top - 1);
  long r_top = numerical_rank(g, tol);
  long r_low = numerical_rank(take_rows(take_cols(g, low), low), tol);
  return r_top == r_low ? r_top : -1;
}

struct G2Columns {
  CMatrix type1;  // Theta_2 phi (+) X^*(Delta_2 phi (+) 0), phi in mid of degree <= N
  CMatrix type2;  // 0 (+) X^*(0 (+) Delta_1 psi)
  CMatrix xstar_delta2;  // X^*(Delta_2 phi (+) 0) alone
};

G2Columns g2_columns(const Factorization& f, const ModelSpace& ms, const Tolerance& tol) {
  const int N = f.N_w;
  const long out = ms.out.dim(), r = ms.defect_rank(), mid = f.mid.dim(), in = f.in.dim();
  const CMatrix xstar = ms.J * pinv(f.Y, tol);  // r x (mid + in)
  auto mid_low = degree_indices(f.mid, 0, N);
  const long nlow = static_cast<long>(mid_low.size());

  G2Columns c;
  CMatrix z = CMatrix::Zero(mid + in, nlow);
  z.topRows(mid) = take_cols(f.delta2, mid_low);
  c.xstar_delta2 = xstar * z;
  c.type1 = CMatrix(out + r, nlow);
  c.type1 << to_matrix(f.theta2, N), c.xstar_delta2;
  CMatrix w = CMatrix::Zero(mid + in, in);
  w.bottomRows(in) = f.delta1;
  c.type2 = CMatrix::Zero(out + r, in);
  c.type2.bottomRows(r) = xstar * w;
  return c;
}

Subspace orthogonal_part(const Subspace& within, const Subspace& remove, const Tolerance& tol) {
  CMatrix b = within.basis() - remove.basis() * (remove.basis().adjoint() * within.basis());
  return range_basis(b, tol);
}

bool is_unitary_constant(const MultiAnalyticOp& op, int n_w, const Tolerance& tol) {
  return classify(op, n_w, tol).unitary_constant;
}

Verdict pure_part_coincidence(const RowContraction& block, const MultiAnalyticOp& factor, int deg,
                              const Tolerance& tol, double& residual) {
  PureUnitaryDecomposition pu = pure_unitary_decomposition(factor, tol);
  if (block.d == 0) {
    residual = 0.0;
    return pu.pure.dim_in() == 0 && pu.pure.dim_out() == 0 ? Verdict::Yes : Verdict::No;
  }
  MultiAnalyticOp cf = prune(char_fn(block, std::max(deg, pu.pure.deg())), kPruneTol);
  Coincidence co = coincides(cf, pu.pure, tol);
  residual = co.residual;
  return co.coincide;
}

}  // namespace

Factorization build_X(const MultiAnalyticOp& theta1, const MultiAnalyticOp& theta2, int N_w, const Tolerance& tol) {
  if (theta1.n() != theta2.n()) throw Error(ErrorKind::AlphabetMismatch, "factors use different alphabets");
  if (theta1.dim_out() != theta2.dim_in()) throw Error(ErrorKind::ShapeMismatch, "factors are not composable");
  return build_X(multiply(theta2, theta1), theta1, theta2, N_w, tol);
}

Factorization build_X(const MultiAnalyticOp& theta, const MultiAnalyticOp& theta1, const MultiAnalyticOp& theta2,
                      int N_w, const Tolerance& tol) {
  if (theta.n() != theta1.n() || theta.n() != theta2.n())
    throw Error(ErrorKind::AlphabetMismatch, "factorization operands use different alphabets");
  if (theta1.dim_out() != theta2.dim_in() || theta.dim_in() != theta1.dim_in() || theta.dim_out() != theta2.dim_out())
    throw Error(ErrorKind::ShapeMismatch, "factorization operands are not composable");
  if (N_w < 0) throw Error(ErrorKind::Precondition, "working degree must be >= 0");

  Factorization f;
  f.theta = theta;
  f.theta1 = theta1;
  f.theta2 = theta2;
  f.N_w = N_w;
  const int n = theta.n();
  const int deg1 = theta1.deg(), deg2 = theta2.deg();
  f.in = TruncatedFock(n, N_w, theta.dim_in());
  f.mid = TruncatedFock(n, N_w + deg1, theta1.dim_out());

  f.M1 = to_matrix(theta1, N_w, N_w + deg1);
  const CMatrix M2 = to_matrix(theta2, N_w + deg1, N_w + deg1 + deg2);
  const CMatrix M = to_matrix(theta, N_w, N_w + theta.deg());
  const CMatrix g = defect_gram(M), g1 = defect_gram(f.M1), g2 = defect_gram(M2);
  for (const CMatrix* m : {&g, &g1, &g2})
    if (min_eigenvalue(*m) < -tol.eq_tol) throw Error(ErrorKind::Precondition, "operand is not contractive");

  f.product_residual = coefficient_distance(theta, multiply(theta2, theta1), std::max(theta.deg(), deg1 + deg2));
  f.identity_residual = norm_or_zero(g - f.M1.adjoint() * g2 * f.M1 - g1);

  f.delta = defect_sqrt(g);
  f.delta1 = defect_sqrt(g1);
  f.delta2 = defect_sqrt(g2);
  f.Y = CMatrix(f.mid.dim() + f.in.dim(), f.in.dim());
  f.Y << f.delta2 * f.M1, f.delta1;
  f.isometry_residual = norm_or_zero(f.Y.adjoint() * f.Y - g);

  GramRange gr = gram_range(g, tol);
  f.X = CMatrix(f.Y.rows(), gr.values.size());
  for (long k = 0; k < gr.values.size(); ++k) f.X.col(k) = f.Y * gr.vectors.col(k) / std::sqrt(gr.values(k));

  const Subspace rY = range_basis(f.Y, tol);
  const int m = N_w / 2;
  f.regularity_margin = m;
  f.regularity_residual = regularity_at(f, rY, m);
  f.regular = f.regularity_residual <= kRegularTol;
  if (m + 1 <= N_w) {
    const bool next = regularity_at(f, rY, m + 1) <= kRegularTol;
    if (next != f.regular)
      throw Error(ErrorKind::TruncationUnstable, "regularity verdict changes between margins " + std::to_string(m) +
                                                     " and " + std::to_string(m + 1));
  }
  return f;
}

double intertwining_residual(const Factorization& f, const Tolerance& tol) {
  if (f.N_w < 1) return 0.0;
  const int n = f.theta.n();
  auto in_low = degree_indices(f.in, 0, f.N_w - 1);
  auto mid_low = degree_indices(f.mid, 0, f.mid.max_deg() - 1);
  const CMatrix yl = take_cols(f.Y, in_low);
  const CMatrix d2p = pinv(take_cols(f.delta2, mid_low), tol);
  const CMatrix d1p = pinv(take_cols(f.delta1, in_low), tol);
  const long mid = f.mid.dim();
  double worst = 0.0;
  for (int i = 1; i <= n; ++i) {
    const CMatrix s_in = creation_matrix(f.in, i, Side::Left);
    const CMatrix s_mid = creation_matrix(f.mid, i, Side::Left);
    // F_i and E_i act on Delta-coordinates through the low-degree preimages.
    const CMatrix Fi = take_cols(f.delta2 * s_mid, mid_low) * d2p;
    const CMatrix Ei = take_cols(f.delta1 * s_in, in_low) * d1p;
    CMatrix lhs = take_cols(f.Y * s_in, in_low);
    CMatrix rhs(lhs.rows(), lhs.cols());
    rhs << Fi * yl.topRows(mid), Ei * yl.bottomRows(f.in.dim());
    worst = std::max(worst, norm_or_zero(lhs - rhs));
  }
  return worst;
}

CuntzTriple cuntz_triple(const Factorization& f, const Tolerance& tol) {
  CuntzTriple c;
  c.C = defect_row_isometry(f.theta, f.N_w, tol).is_cuntz;
  c.E = defect_row_isometry(f.theta1, f.N_w, tol).is_cuntz;
  c.F = defect_row_isometry(f.theta2, f.N_w, tol).is_cuntz;
  return c;
}

RegularityShortcuts regularity_shortcuts(const MultiAnalyticOp& theta1, const MultiAnalyticOp& theta2, int N_w,
                                         const Tolerance& tol) {
  Factorization f = build_X(theta1, theta2, N_w, tol);
  RegularityShortcuts rs;
  rs.regular = f.regular;
  const bool inner2 = classify(theta2, N_w, tol).inner;
  const bool inner1 = classify(theta1, N_w, tol).inner;
  const bool inner = classify(f.theta, N_w, tol).inner;
  if (inner2) rs.inner_factor2 = Verdict::Yes;
  if (inner) rs.inner_theta_rule = inner1 && inner2 ? Verdict::Yes : Verdict::No;

  rs.rank_theta = stable_rank(f.delta, f.in, tol);
  rs.rank1 = stable_rank(f.delta1, f.in, tol);
  rs.rank2 = stable_rank(f.delta2, f.mid, tol);
  if (rs.rank_theta >= 0)
    rs.rank_rule = rs.rank1 >= 0 && rs.rank2 >= 0 && rs.rank_theta == rs.rank1 + rs.rank2 ? Verdict::Yes : Verdict::No;

  auto check = [&](Verdict v, const char* name) {
    if (v == Verdict::Undetermined) return;
    if ((v == Verdict::Yes) != f.regular)
      throw Error(ErrorKind::StructureViolation, std::string(name) + " disagrees with the computed regularity");
  };
  check(rs.inner_factor2, "inner right-hand factor rule");
  check(rs.inner_theta_rule, "inner product rule");
  check(rs.rank_rule, "rank additivity rule");
  return rs;
}

ModelSubspaces subspaces_from_factorization(const Factorization& f, const Tolerance& tol) {
  if (!f.regular) throw Error(ErrorKind::NotRegular, "subspaces need a regular factorization");
  ModelSubspaces s;
  s.model = model_from_theta(f.theta, f.N_w, tol);
  const ModelSpace& ms = s.model.space;
  const long K = ms.K, out = ms.out.dim(), r = ms.defect_rank();
  G2Columns c = g2_columns(f, ms, tol);

  CMatrix g2(K, c.type1.cols() + c.type2.cols());
  g2 << c.type1, c.type2;
  const CMatrix ph = ms.H.projector();
  s.H1 = range_basis(ph * g2, tol);

  CMatrix a = CMatrix::Zero(K, out + c.xstar_delta2.cols());
  a.topLeftCorner(out, out) = CMatrix::Identity(out, out);
  a.bottomRightCorner(r, c.xstar_delta2.cols()) = c.xstar_delta2;
  s.H2 = orthogonal_part(range_basis(a, tol), range_basis(c.type1, tol), tol);

  s.complement_residual = subspace_distance(s.H2, range_basis(ph - s.H1.projector(), tol));

  const CMatrix& b1 = s.H1.basis();
  for (const CMatrix& v : s.model.V) {
    CMatrix img = ph * v * b1;
    s.invariance_residual = std::max(s.invariance_residual, norm_or_zero(img - b1 * (b1.adjoint() * img)));
  }

  // x = f (+) X^*(g (+) 0) lies in H2 exactly when Theta_2^* f + Delta_2 g = 0.
  if (s.H2.dim() > 0) {
    const CMatrix& b2 = s.H2.basis();
    const CMatrix phi = pinv(ms.J, tol) * b2.bottomRows(r);
    const CMatrix t2adj = to_matrix(f.theta2, f.mid.max_deg(), f.N_w).adjoint();
    const CMatrix g2gram = f.delta2 * f.delta2;
    CMatrix eq = t2adj * b2.topRows(out) + g2gram * f.M1 * phi;
    s.membership_residual = std::max(norm_or_zero(eq), norm_or_zero(f.delta1 * phi));
  }
  return s;
}

SubspaceFactorization factorization_from_subspace(const RowContraction& t, const Subspace& H1, int N) {
  const Tolerance& tol = t.tol;
  if (H1.ambient() != t.d) throw Error(ErrorKind::ShapeMismatch, "subspace ambient dimension differs from d");
  if (invariance_residual(t, H1) > tol.eq_tol) throw Error(ErrorKind::NotInvariant, "subspace is not jointly invariant");
  if (compute_Hc(t, tol).dim() > 0) throw Error(ErrorKind::NotCNC, "tuple has a coisometric part");

  SubspaceFactorization sf;
  sf.dilation = build_dilation(t, N);
  const DilationSystem& ds = sf.dilation;
  const long K = ds.K, d = t.d, dd = ds.defect_dim;

  // K minus (H minus H1) is H1 (+) Fock part; its wandering subspace sits in
  // H1 (+) degree-0 Fock vectors.
  const CMatrix e1 = ds.embed_H() * H1.basis();
  CMatrix low = CMatrix::Zero(K, e1.cols() + dd);
  low.leftCols(e1.cols()) = e1;
  low.block(d, e1.cols(), dd, dd) = CMatrix::Identity(dd, dd);
  CMatrix moved(K, e1.cols() * t.n);
  for (int i = 0; i < t.n; ++i) moved.middleCols(i * e1.cols(), e1.cols()) = ds.V[static_cast<std::size_t>(i)] * e1;
  const Subspace shifted = range_basis(moved, tol);
  sf.Q = orthogonal_part(Subspace(low), shifted, tol);

  const int margin = N - 1;
  const MultiAnalyticOp theta = prune(char_fn_geometric(ds), kPruneTol);
  FourierRep fq = fourier_representation(ds.V, sf.Q, margin, tol);
  FourierRep fs = fourier_representation(ds.V, ds.L_star, margin, tol);
  MultiAnalyticOp psi1 = from_symbols(t.n, sf.Q.dim(), margin, fq.synth.adjoint() * ds.L.basis(), kPruneTol);
  MultiAnalyticOp psi2 = from_symbols(t.n, ds.L_star.dim(), margin, fs.synth.adjoint() * sf.Q.basis(), kPruneTol);

  sf.factorization = build_X(theta, psi1, psi2, margin, tol);
  sf.product_residual = sf.factorization.product_residual;
  if (!sf.factorization.regular)
    throw Error(ErrorKind::StructureViolation, "factorization induced by an invariant subspace is not regular");

  ModelSpace ms = model_space(theta, margin, tol);
  if (ms.defect_rank() == 0) {
    ModelSubspaces sub = subspaces_from_factorization(sf.factorization, tol);
    CMatrix img = fs.synth.adjoint() * e1;
    sf.H1_image = range_basis(img, tol);
    sf.round_trip_distance = subspace_distance(sf.H1_image, sub.H1);
    sf.round_trip_checked = true;
  }
  return sf;
}

TriangulationCheck factor_triangulation_check(const Factorization& f, const Tolerance& tol) {
  ModelSubspaces s = subspaces_from_factorization(f, tol);
  TriangulationCheck tc;
  const CMatrix& hb = s.model.space.H.basis();
  const Subspace h1(hb.adjoint() * s.H1.basis());
  const Subspace h2(hb.adjoint() * s.H2.basis());
  tc.dim_H1 = h1.dim();
  tc.dim_H2 = h2.dim();
  const RowContraction a = compress(s.model.T, h1);
  const RowContraction b = compress(s.model.T, h2);
  tc.A_coincides = pure_part_coincidence(a, f.theta1, f.N_w, tol, tc.A_residual);
  tc.B_coincides = pure_part_coincidence(b, f.theta2, f.N_w, tol, tc.B_residual);
  tc.subspace_nontrivial = tc.dim_H1 > 0 && tc.dim_H2 > 0;
  tc.factorization_nontrivial = !is_unitary_constant(f.theta1, f.N_w, tol) && !is_unitary_constant(f.theta2, f.N_w, tol);
  tc.nontriviality_agrees = tc.subspace_nontrivial == tc.factorization_nontrivial;
  return tc;
}

const char* to_string(FactorRelation r) {
  switch (r) {
    case FactorRelation::Contained: return "contained";
    case FactorRelation::Contains: return "contains";
    case FactorRelation::Equal: return "equal";
  }
  return "?";
}

namespace {

// Solves Theta_2 phi (+) X^*(Delta_2 phi (+) 0) = Theta_2' phi' (+) X'^*(Delta_2' phi' (+) g')
// for phi = 1 (x) e_j and reads Psi off the phi'.
FactorComparison solve_psi(const Factorization& f, const Factorization& g, const ModelSpace& ms, const Tolerance& tol) {
  FactorComparison fc;
  G2Columns cf = g2_columns(f, ms, tol);
  G2Columns cg = g2_columns(g, ms, tol);
  const long dimF = f.theta1.dim_out(), dimG = g.theta1.dim_out();
  const CMatrix rhs = cf.type1.leftCols(dimF);
  CMatrix a(cg.type1.rows(), cg.type1.cols() + cg.type2.cols());
  a << cg.type1, cg.type2;
  const CMatrix sol = lstsq(a, rhs);
  fc.solve_residual = norm_or_zero(a * sol - rhs);
  if (fc.solve_residual > tol.eq_tol * 1e2)
    throw Error(ErrorKind::NotComparable, "the containment equation has no solution: residual " +
                                              std::to_string(fc.solve_residual));
  fc.psi = from_symbols(f.theta.n(), dimG, f.N_w, sol.topRows(cg.type1.cols()), kPruneTol);
  const int margin = std::max(0, f.N_w - std::max(g.theta2.deg(), 1));
  fc.product_residual = coefficient_distance(multiply(fc.psi, f.theta1), g.theta1, margin);
  if (fc.product_residual > tol.eq_tol * 1e2)
    throw Error(ErrorKind::StructureViolation, "Psi Theta_1 differs from Theta_1': " + std::to_string(fc.product_residual));
  return fc;
}

}  // namespace

FactorComparison compare_factorizations(const Factorization& f, const Factorization& g, const Tolerance& tol) {
  if (f.N_w != g.N_w) throw Error(ErrorKind::Precondition, "factorizations use different working degrees");
  if (coefficient_distance(f.theta, g.theta, std::max(f.theta.deg(), g.theta.deg())) > tol.eq_tol)
    throw Error(ErrorKind::Precondition, "factorizations are of different operators");
  ModelSubspaces sf = subspaces_from_factorization(f, tol);
  ModelSubspaces sg = subspaces_from_factorization(g, tol);
  const bool in_g = contains(sg.H1, sf.H1, tol);
  const bool in_f = contains(sf.H1, sg.H1, tol);
  if (!in_g && !in_f) throw Error(ErrorKind::NotComparable, "neither invariant subspace contains the other");
  const ModelSpace& ms = sf.model.space;
  FactorComparison fc = in_g ? solve_psi(f, g, ms, tol) : solve_psi(g, f, ms, tol);
  fc.relation = in_g && in_f ? FactorRelation::Equal : (in_g ? FactorRelation::Contained : FactorRelation::Contains);
  fc.psi_unitary_constant = is_unitary_constant(fc.psi, f.N_w, tol);
  if (fc.relation == FactorRelation::Equal && !fc.psi_unitary_constant)
    throw Error(ErrorKind::StructureViolation, "equal subspaces but Psi is not a unitary constant");
  return fc;
}

InnerOuterSplit inner_outer_split(const RowContraction& t, int N_w, const Tolerance& tol) {
  InnerOuterSplit sp;
  const MultiAnalyticOp theta = prune(char_fn(t, N_w), kPruneTol);
  InnerOuter io = inner_outer_factorize(theta, N_w, tol);
  try {
    sp.factorization = build_X(theta, prune(io.outer, kPruneTol), prune(io.inner, kPruneTol), N_w, tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Precondition) throw;
    // Polynomial truncations of a contractive symbol need not be contractive.
    throw Error(ErrorKind::TruncationUnstable, "degree " + std::to_string(N_w) + " truncation: " + e.what());
  }
  ModelSubspaces s = subspaces_from_factorization(sp.factorization, tol);
  const long out = s.model.space.out.dim();
  const CMatrix emb = poisson_embedding(t, N_w);
  const Subspace null = kernel_basis(emb, tol);
  sp.kernel_dim = null.dim();
  sp.H0 = range_basis(emb.adjoint() * s.H2.basis().topRows(out), tol);
  sp.H1 = sum(null, range_basis(emb.adjoint() * s.H1.basis().topRows(out), tol), tol);
  return sp;
}

}  // namespace fockmodel
