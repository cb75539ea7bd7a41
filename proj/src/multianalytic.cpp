#include "fockmodel/multianalytic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SparseCore>

#include "fockmodel/errors.hpp"

namespace fockmodel {

MultiAnalyticOp::MultiAnalyticOp(int n, long dim_in, long dim_out) : n_(n), dim_in_(dim_in), dim_out_(dim_out) {
  if (n < 1) throw Error(ErrorKind::Precondition, "alphabet size must be positive");
  if (dim_in < 0 || dim_out < 0) throw Error(ErrorKind::Precondition, "negative coefficient dimension");
}

MultiAnalyticOp MultiAnalyticOp::constant(int n, const CMatrix& m) {
  MultiAnalyticOp op(n, m.cols(), m.rows());
  op.set(Word(n), m);
  return op;
}

MultiAnalyticOp MultiAnalyticOp::identity(int n, long dim) {
  return constant(n, CMatrix::Identity(dim, dim));
}

int MultiAnalyticOp::deg() const {
  int d = 0;
  for (const auto& [w, m] : coeffs_) d = std::max(d, w.length());
  return d;
}

void MultiAnalyticOp::set(const Word& w, const CMatrix& m) {
  if (w.alphabet() != n_) throw Error(ErrorKind::AlphabetMismatch, "coefficient word alphabet");
  if (m.rows() != dim_out_ || m.cols() != dim_in_)
    throw Error(ErrorKind::ShapeMismatch, "coefficient shape for word " + w.str());
  coeffs_[w] = m;
}

void MultiAnalyticOp::add(const Word& w, const CMatrix& m) {
  auto it = coeffs_.find(w);
  if (it == coeffs_.end())
    set(w, m);
  else
    it->second += m;
}

CMatrix MultiAnalyticOp::coeff(const Word& w) const {
  auto it = coeffs_.find(w);
  if (it == coeffs_.end()) return CMatrix::Zero(dim_out_, dim_in_);
  return it->second;
}

MultiAnalyticOp prune(const MultiAnalyticOp& op, double thr) {
  MultiAnalyticOp out(op.n(), op.dim_in(), op.dim_out());
  for (const auto& [w, m] : op.coeffs())
    if (m.size() > 0 && m.norm() > thr) out.set(w, m);
  return out;
}

CMatrix to_matrix(const MultiAnalyticOp& op, int in_deg, int out_deg) {
  if (in_deg < 0 || out_deg < 0) throw Error(ErrorKind::Precondition, "negative working degree");
  TruncatedFock in(op.n(), in_deg, op.dim_in()), out(op.n(), out_deg, op.dim_out());
  CMatrix a = CMatrix::Zero(out.dim(), in.dim());
  if (op.dim_in() == 0 || op.dim_out() == 0) return a;
  std::vector<std::pair<Word, const CMatrix*>> rev;
  for (const auto& [w, m] : op.coeffs()) rev.emplace_back(reverse(w), &m);
  for (const Word& g : in.words()) {
    const long col = in.index(g);
    for (const auto& [ra, m] : rev) {
      if (g.length() + ra.length() > out_deg) break;  // coefficients are in graded order
      a.block(out.index(concat(g, ra)), col, op.dim_out(), op.dim_in()) = *m;
    }
  }
  return a;
}

MultiAnalyticOp from_symbols(int n, long dim_out, int max_deg, const CMatrix& symbols, double prune_thr) {
  TruncatedFock space(n, max_deg, dim_out);
  if (symbols.rows() != space.dim()) throw Error(ErrorKind::ShapeMismatch, "symbol vector length");
  MultiAnalyticOp op(n, symbols.cols(), dim_out);
  if (symbols.cols() == 0 || dim_out == 0) return op;
  for (const Word& b : space.words()) {
    CMatrix blk = symbols.block(space.index(b), 0, dim_out, symbols.cols());
    if (blk.norm() > prune_thr) op.set(reverse(b), blk);
  }
  return op;
}

namespace {

using SMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

// Defect blocks above this many entries are measured in Frobenius norm.
constexpr double kDenseLimit = 4e6;

SMatrix sparse_matrix(const MultiAnalyticOp& op, const TruncatedFock& in, const TruncatedFock& out) {
  std::vector<Triplet> trip;
  std::vector<std::pair<Word, const CMatrix*>> rev;
  for (const auto& [w, m] : op.coeffs()) rev.emplace_back(reverse(w), &m);
  for (const Word& g : in.words()) {
    const long col = in.index(g);
    for (const auto& [ra, m] : rev) {
      if (g.length() + ra.length() > out.max_deg()) break;
      const long row = out.index(concat(g, ra));
      for (long c = 0; c < m->cols(); ++c)
        for (long r = 0; r < m->rows(); ++r)
          if ((*m)(r, c) != cplx(0.0)) trip.emplace_back(row + r, col + c, (*m)(r, c));
    }
  }
  SMatrix a(out.dim(), in.dim());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

SMatrix sparse_left_creation(const TruncatedFock& space, int i) {
  std::vector<Triplet> trip;
  const Word g = Word::generator(space.n(), i);
  for (const Word& w : space.words()) {
    if (w.length() >= space.max_deg()) continue;
    const long from = space.index(w), to = space.index(concat(g, w));
    for (long k = 0; k < space.coeff_dim(); ++k) trip.emplace_back(to + k, from + k, cplx(1.0));
  }
  SMatrix s(space.dim(), space.dim());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

}  // namespace

double intertwining_defect(const MultiAnalyticOp& op, int n_w) {
  const int top = n_w - 1 - op.deg();
  if (n_w < 1 || top < 0)
    throw Error(ErrorKind::Precondition, "working degree " + std::to_string(n_w) + " leaves no margin for degree " +
                                             std::to_string(op.deg()));
  TruncatedFock in(op.n(), n_w, op.dim_in()), out(op.n(), n_w, op.dim_out());
  // Graded order puts the checked inputs in the leading columns.
  const auto cols = degree_indices(in, 0, top);
  const long ncols = cols.empty() ? 0 : cols.back() + 1;
  const SMatrix a = sparse_matrix(op, in, out);
  const SMatrix a_low = a.leftCols(ncols);
  double worst = 0.0;
  for (int i = 1; i <= op.n(); ++i) {
    const SMatrix s_in = sparse_left_creation(in, i);
    SMatrix d = SMatrix(a * s_in.leftCols(ncols)) - SMatrix(sparse_left_creation(out, i) * a_low);
    if (static_cast<double>(out.dim()) * static_cast<double>(ncols) > kDenseLimit) {
      // Frobenius norm, an upper bound for the operator norm.
      worst = std::max(worst, d.norm());
    } else {
      worst = std::max(worst, op_norm(CMatrix(d)));
    }
  }
  return worst;
}

MultiAnalyticOp multiply(const MultiAnalyticOp& a, const MultiAnalyticOp& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::AlphabetMismatch, "multiply: alphabet mismatch");
  if (b.dim_out() != a.dim_in()) throw Error(ErrorKind::ShapeMismatch, "multiply: b.dim_out != a.dim_in");
  MultiAnalyticOp c(a.n(), b.dim_in(), a.dim_out());
  for (const auto& [wa, ma] : a.coeffs())
    for (const auto& [wb, mb] : b.coeffs()) c.add(concat(wa, wb), ma * mb);
  return c;
}

MultiAnalyticOp adjoint_constant(const MultiAnalyticOp& op) {
  if (op.deg() != 0) throw Error(ErrorKind::Precondition, "adjoint_constant needs a constant operator");
  return MultiAnalyticOp::constant(op.n(), op.coeff(Word(op.n())).adjoint());
}

MultiAnalyticOp conjugate(const CMatrix& left, const MultiAnalyticOp& op, const CMatrix& right) {
  if (left.cols() != op.dim_out() || right.rows() != op.dim_in())
    throw Error(ErrorKind::ShapeMismatch, "conjugate: shape mismatch");
  MultiAnalyticOp out(op.n(), right.cols(), left.rows());
  for (const auto& [w, m] : op.coeffs()) out.set(w, left * m * right);
  return out;
}

MultiAnalyticOp direct_sum(const MultiAnalyticOp& a, const MultiAnalyticOp& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::AlphabetMismatch, "direct_sum: alphabet mismatch");
  MultiAnalyticOp out(a.n(), a.dim_in() + b.dim_in(), a.dim_out() + b.dim_out());
  std::map<Word, int> words;
  for (const auto& [w, m] : a.coeffs()) words[w] = 0;
  for (const auto& [w, m] : b.coeffs()) words[w] = 0;
  for (const auto& [w, unused] : words) out.set(w, direct_sum(a.coeff(w), b.coeff(w)));
  return out;
}

double coefficient_distance(const MultiAnalyticOp& a, const MultiAnalyticOp& b, int max_len) {
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out())
    throw Error(ErrorKind::ShapeMismatch, "coefficient_distance: shape mismatch");
  std::map<Word, int> words;
  for (const auto& [w, m] : a.coeffs()) words[w] = 0;
  for (const auto& [w, m] : b.coeffs()) words[w] = 0;
  double worst = 0.0;
  for (const auto& [w, unused] : words)
    if (w.length() <= max_len) worst = std::max(worst, op_norm(a.coeff(w) - b.coeff(w)));
  return worst;
}

Classification classify(const MultiAnalyticOp& op, int n_w, const Tolerance& tol) {
  Classification c;
  const int d = op.deg();
  const Word g0(op.n());
  const CMatrix th0 = op.coeff(g0);

  c.inner_margin = std::max(n_w - d, 0);
  {
    CMatrix a = to_matrix(op, c.inner_margin, c.inner_margin + d);
    CMatrix gram = a.adjoint() * a - CMatrix::Identity(a.cols(), a.cols());
    c.inner_residual = op_norm(gram);
    c.inner = c.inner_residual <= tol.eq_tol;
  }

  c.outer_margin = std::max(n_w - 2 * d, 0);
  {
    const int in_deg = std::max(n_w - d, 0);
    CMatrix a = to_matrix(op, in_deg, in_deg + d);
    TruncatedFock out(op.n(), in_deg + d, op.dim_out());
    Subspace r = range_basis(a, tol);
    auto rows = degree_indices(out, 0, c.outer_margin);
    CMatrix targets = CMatrix::Zero(out.dim(), static_cast<long>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) targets(rows[k], static_cast<long>(k)) = 1.0;
    c.outer_residual = rows.empty() ? 0.0 : containment_residual(r, Subspace(targets));
    c.outer = op.dim_out() == 0 || c.outer_residual <= tol.eq_tol;
  }

  c.sigma_max_constant = op.dim_in() == 0 ? 0.0 : op_norm(th0);
  c.purely_contractive = c.sigma_max_constant < 1.0 - tol.eq_tol;

  double higher = 0.0;
  for (const auto& [w, m] : op.coeffs())
    if (w.length() > 0) higher = std::max(higher, op_norm(m));
  c.unitary_constant = higher <= tol.eq_tol && op.dim_in() == op.dim_out() &&
                       (th0.adjoint() * th0 - CMatrix::Identity(op.dim_in(), op.dim_in())).norm() <= tol.eq_tol;
  return c;
}

PureUnitaryDecomposition pure_unitary_decomposition(const MultiAnalyticOp& op, const Tolerance& tol) {
  const long e = op.dim_in(), es = op.dim_out();
  const CMatrix th0 = op.coeff(Word(op.n()));
  std::vector<CMatrix> higher;
  for (const auto& [w, m] : op.coeffs())
    if (w.length() > 0) higher.push_back(m);

  // Start from the isometric directions of theta_0 killed by every higher coefficient.
  const long h = static_cast<long>(higher.size());
  CMatrix stack(e + es * h, e);
  stack.topRows(e) = CMatrix::Identity(e, e) - th0.adjoint() * th0;
  for (long k = 0; k < h; ++k) stack.middleRows(e + es * k, es) = higher[static_cast<std::size_t>(k)];
  Subspace s = kernel_basis(stack, Tolerance{std::max(tol.rank_tol, tol.eq_tol), tol.eq_tol});
  if (e == 0) s = Subspace::zero(0);

  Subspace s_star = Subspace::zero(es);
  for (long iter = 0; iter <= e + 1; ++iter) {
    s_star = image(th0, s, tol);
    if (s_star.dim() == 0) {
      s = Subspace::zero(e);
      break;
    }
    CMatrix co(e * h, es);
    for (long k = 0; k < h; ++k) co.middleRows(e * k, e) = higher[static_cast<std::size_t>(k)].adjoint();
    Subspace keep = higher.empty() ? Subspace::full(es)
                                   : kernel_basis(co, Tolerance{std::max(tol.rank_tol, tol.eq_tol), tol.eq_tol});
    Subspace s_star_next = intersect(s_star, keep, tol);
    if (s_star_next.dim() == s_star.dim()) break;
    s = image(th0.adjoint(), s_star_next, tol);
  }
  if (s.dim() == 0) s_star = Subspace::zero(es);

  PureUnitaryDecomposition out;
  out.E_u = s;
  out.E_0 = complement(s);
  // Take the target basis as theta_0 applied to the source basis so that W is the identity-like unitary.
  if (s.dim() > 0) {
    CMatrix img = th0 * s.basis();
    out.E_star_u = Subspace(img * psd_pinv_sqrt(img.adjoint() * img, tol));
  } else {
    out.E_star_u = Subspace::zero(es);
  }
  out.E_star_0 = complement(out.E_star_u);
  out.W = out.E_star_u.basis().adjoint() * th0 * out.E_u.basis();
  out.pure = conjugate(out.E_star_0.basis().adjoint(), op, out.E_0.basis());
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "true";
    case Verdict::No: return "false";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

namespace {

std::vector<Word> union_words(const MultiAnalyticOp& a, const MultiAnalyticOp& b) {
  std::map<Word, int> words;
  for (const auto& [w, m] : a.coeffs()) words[w] = 0;
  for (const auto& [w, m] : b.coeffs()) words[w] = 0;
  std::vector<Word> out;
  for (const auto& [w, unused] : words) out.push_back(w);
  return out;
}

double pair_residual(const std::vector<CMatrix>& A, const std::vector<CMatrix>& B, const CMatrix& W,
                     const CMatrix& Ws) {
  double s = 0.0;
  for (std::size_t k = 0; k < A.size(); ++k) s += (Ws * A[k] - B[k] * W).squaredNorm();
  return std::sqrt(s);
}

CMatrix random_unitary(long dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix z(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) z(i, j) = cplx(nd(rng), nd(rng));
  return polar_unitary(z);
}

}  // namespace

Coincidence coincides(const MultiAnalyticOp& a, const MultiAnalyticOp& b, const Tolerance& tol) {
  if (a.n() != b.n()) throw Error(ErrorKind::AlphabetMismatch, "coincides: alphabet mismatch");
  Coincidence out;
  if (a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out()) {
    out.coincide = Verdict::No;
    out.reason = "coefficient space dimensions differ";
    return out;
  }
  const long e = a.dim_in(), es = a.dim_out();
  out.W = CMatrix::Identity(e, e);
  out.W_star = CMatrix::Identity(es, es);
  if (e == 0 || es == 0) {
    out.coincide = Verdict::Yes;
    out.reason = "zero-dimensional coefficient space";
    return out;
  }
  std::vector<Word> words = union_words(a, b);
  std::vector<CMatrix> A, B;
  double scale = 1.0;
  for (const Word& w : words) {
    A.push_back(a.coeff(w));
    B.push_back(b.coeff(w));
    scale = std::max(scale, A.back().norm());
  }
  const double thr = tol.eq_tol * scale;

  // Unitary invariants: singular values per word and pairwise traces.
  for (std::size_t k = 0; k < A.size(); ++k) {
    Svd sa(A[k]), sb(B[k]);
    if ((sa.singularValues() - sb.singularValues()).norm() > thr) {
      out.coincide = Verdict::No;
      out.reason = "singular values differ at word " + words[k].str();
      out.residual = (sa.singularValues() - sb.singularValues()).norm();
      return out;
    }
    for (std::size_t l = k + 1; l < A.size(); ++l) {
      cplx ta = (A[k].adjoint() * A[l]).trace(), tb = (B[k].adjoint() * B[l]).trace();
      cplx ua = (A[k] * A[l].adjoint()).trace(), ub = (B[k] * B[l].adjoint()).trace();
      if (std::abs(ta - tb) > thr || std::abs(ua - ub) > thr) {
        out.coincide = Verdict::No;
        out.reason = "trace invariant differs at words " + words[k].str() + ", " + words[l].str();
        out.residual = std::max(std::abs(ta - tb), std::abs(ua - ub));
        return out;
      }
    }
  }

  // Alternating Procrustes from several starting points.
  std::vector<CMatrix> starts;
  starts.push_back(CMatrix::Identity(e, e));
  {
    CMatrix ga = CMatrix::Zero(e, e), gb = CMatrix::Zero(e, e);
    for (std::size_t k = 0; k < A.size(); ++k) {
      ga += A[k].adjoint() * A[k];
      gb += B[k].adjoint() * B[k];
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> ea(ga), eb(gb);
    starts.push_back(eb.eigenvectors() * ea.eigenvectors().adjoint());
  }
  std::mt19937_64 rng(0x5eed);
  for (int k = 0; k < 8; ++k) starts.push_back(random_unitary(e, rng));

  double best = std::numeric_limits<double>::infinity();
  for (const CMatrix& w0 : starts) {
    CMatrix W = w0, Ws;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
      CMatrix m = CMatrix::Zero(es, es);
      for (std::size_t k = 0; k < A.size(); ++k) m += B[k] * W * A[k].adjoint();
      Ws = polar_unitary(m);
      CMatrix q = CMatrix::Zero(e, e);
      for (std::size_t k = 0; k < A.size(); ++k) q += B[k].adjoint() * Ws * A[k];
      W = polar_unitary(q);
      double r = pair_residual(A, B, W, Ws);
      if (r <= 1e-3 * thr || prev - r <= 1e-15 * scale) {
        prev = r;
        break;
      }
      prev = r;
    }
    if (prev < best) {
      best = prev;
      out.W = W;
      out.W_star = Ws;
    }
    if (best <= thr) break;
  }
  out.residual = best;
  if (best <= thr) {
    out.coincide = Verdict::Yes;
    out.reason = "aligned";
  } else {
    out.coincide = Verdict::Undetermined;
    out.reason = "invariants agree but no aligning pair was found";
  }
  return out;
}

namespace {

Subspace wandering_of_range(const MultiAnalyticOp& op, int n_w, const Tolerance& tol) {
  // Inputs of degree <= n_w with every output degree kept, so that the shifted
  // range sum_i S_i M_{n_w - 1} is exactly the image of the inputs of degree >= 1.
  CMatrix a = to_matrix(op, n_w, n_w + op.deg());
  TruncatedFock in(op.n(), n_w, op.dim_in());
  Subspace r = range_basis(a, tol);
  Subspace r1 = range_basis(take_cols(a, degree_indices(in, 1, n_w)), tol);
  CMatrix rest = r.basis() - r1.basis() * (r1.basis().adjoint() * r.basis());
  return range_basis(rest, tol);
}

}  // namespace

InnerOuter inner_outer_factorize(const MultiAnalyticOp& op, int n_w, const Tolerance& tol) {
  if (n_w < 1) throw Error(ErrorKind::Precondition, "inner_outer_factorize needs working degree >= 1");
  Subspace w = wandering_of_range(op, n_w, tol);
  Subspace w_prev = wandering_of_range(op, n_w - 1, tol);
  if (w.dim() != w_prev.dim())
    throw Error(ErrorKind::RankUnstable, "wandering subspace dimension " + std::to_string(w_prev.dim()) + " -> " +
                                             std::to_string(w.dim()) + " between degrees " +
                                             std::to_string(n_w - 1) + " and " + std::to_string(n_w));
  const double noise = 1e-13;
  const int d = op.deg();
  InnerOuter out;
  out.inner = from_symbols(op.n(), op.dim_out(), n_w + d, w.basis(), noise);

  // The outer symbol is the co-analytic image of A(1 (x) E), which has degree <= deg(op).
  TruncatedFock in(op.n(), d, op.dim_in());
  CMatrix a = to_matrix(op, d);
  CMatrix ai = to_matrix(out.inner, d);
  CMatrix sym = ai.adjoint() * take_cols(a, degree_indices(in, 0, 0));
  out.outer = from_symbols(op.n(), w.dim(), d, sym, noise);
  out.margin = n_w;

  out.product_residual = coefficient_distance(multiply(out.inner, out.outer), op, out.margin);
  out.inner_class = classify(out.inner, n_w, tol);
  out.outer_class = classify(out.outer, n_w, tol);
  return out;
}

}  // namespace fockmodel
