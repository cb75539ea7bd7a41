#include "fockmodel/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "fockmodel/errors.hpp"

namespace fockmodel {

Tolerance Tolerance::from_env() {
  Tolerance t;
  if (const char* env = std::getenv("FOCKMODEL_DEFAULT_TOL")) {
    try {
      t.eq_tol = std::stod(env);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, std::string("FOCKMODEL_DEFAULT_TOL is not a number: ") + env);
    }
  }
  t.validate();
  return t;
}

void Tolerance::validate() const {
  if (!(rank_tol > 0 && rank_tol < 1)) throw Error(ErrorKind::Precondition, "rank_tol must lie in (0,1)");
  if (!(eq_tol > 0 && eq_tol < 1)) throw Error(ErrorKind::Precondition, "eq_tol must lie in (0,1)");
}

Subspace::Subspace(CMatrix basis) : ambient_(basis.rows()), basis_(std::move(basis)) {}

Subspace Subspace::zero(long ambient) {
  Subspace s;
  s.ambient_ = ambient;
  s.basis_ = CMatrix(ambient, 0);
  return s;
}

Subspace Subspace::full(long ambient) { return Subspace(CMatrix::Identity(ambient, ambient)); }

namespace {

Svd svd_of(const CMatrix& a, bool full) {
  unsigned opts = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                       : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  return Svd(a, opts);
}

}  // namespace

double op_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Svd svd(a);
  return svd.singularValues()(0);
}

double sigma_min(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Svd svd(a);
  if (a.rows() < a.cols()) return 0.0;
  return svd.singularValues()(svd.singularValues().size() - 1);
}

CMatrix hermitian_part(const CMatrix& a) { return (a + a.adjoint()) / 2.0; }

namespace {

Eigen::SelfAdjointEigenSolver<CMatrix> checked_eig(const CMatrix& a, const Tolerance& tol) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::ShapeMismatch, "psd_sqrt needs a square matrix");
  double asym = (a - a.adjoint()).norm();
  if (asym > tol.eq_tol * std::max(1.0, a.norm()))
    throw Error(ErrorKind::NotHermitian, "asymmetry " + std::to_string(asym));
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  if (a.rows() > 0 && es.eigenvalues()(0) < -tol.eq_tol)
    throw Error(ErrorKind::NotPSD, "eigenvalue " + std::to_string(es.eigenvalues()(0)));
  return es;
}

// Eigenvalues at roundoff level are treated as exact zeros so that the
// square root does not manufacture spurious defect directions of size 1e-8.
double clamp_ev(double ev, double scale) {
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
  return ev <= noise ? 0.0 : ev;
}

}  // namespace

CMatrix psd_sqrt(const CMatrix& a, const Tolerance& tol) {
  auto es = checked_eig(a, tol);
  if (a.rows() == 0) return a;
  const double scale = std::abs(es.eigenvalues()(a.rows() - 1));
  RVector s = es.eigenvalues().unaryExpr([&](double v) { return std::sqrt(clamp_ev(v, scale)); });
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix psd_pinv_sqrt(const CMatrix& a, const Tolerance& tol) {
  auto es = checked_eig(a, tol);
  if (a.rows() == 0) return a;
  const double scale = std::abs(es.eigenvalues()(a.rows() - 1));
  const double thr = rank_threshold(std::sqrt(scale), tol);
  RVector s = es.eigenvalues().unaryExpr([&](double v) {
    double r = std::sqrt(clamp_ev(v, scale));
    return r > thr ? 1.0 / r : 0.0;
  });
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

double rank_threshold(double sigma_max, const Tolerance& tol) {
  return tol.rank_tol * std::max(1.0, sigma_max);
}

Subspace range_basis(const CMatrix& a, const Tolerance& tol) {
  if (a.cols() == 0 || a.rows() == 0) return Subspace::zero(a.rows());
  auto svd = svd_of(a, false);
  const RVector& s = svd.singularValues();
  const double thr = rank_threshold(s(0), tol);
  long r = 0;
  while (r < s.size() && s(r) > thr) ++r;
  return Subspace(svd.matrixU().leftCols(r));
}

long numerical_rank(const CMatrix& a, const Tolerance& tol) {
  if (a.size() == 0) return 0;
  Svd svd(a);
  const RVector& s = svd.singularValues();
  const double thr = rank_threshold(s(0), tol);
  long r = 0;
  while (r < s.size() && s(r) > thr) ++r;
  return r;
}

Subspace kernel_basis(const CMatrix& a, const Tolerance& tol) {
  if (a.cols() == 0) return Subspace::zero(0);
  if (a.rows() == 0) return Subspace::full(a.cols());
  auto svd = svd_of(a, true);
  const RVector& s = svd.singularValues();
  const double thr = rank_threshold(s(0), tol);
  long r = 0;
  while (r < s.size() && s(r) > thr) ++r;
  return Subspace(svd.matrixV().rightCols(a.cols() - r));
}

GramRange gram_range(const CMatrix& g, const Tolerance& tol) {
  GramRange out;
  if (g.rows() == 0) {
    out.vectors = CMatrix(0, 0);
    out.values = RVector(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(g));
  const RVector& ev = es.eigenvalues();
  const double thr = tol.rank_tol * std::max(1.0, std::abs(ev(ev.size() - 1)));
  long r = 0;
  for (long k = ev.size() - 1; k >= 0 && ev(k) > thr; --k) ++r;
  // Largest eigenvalues first.
  out.vectors = es.eigenvectors().rightCols(r).rowwise().reverse();
  out.values = ev.tail(r).reverse();
  return out;
}

Subspace complement(const Subspace& a) {
  if (a.dim() == 0) return Subspace::full(a.ambient());
  if (a.dim() == a.ambient()) return Subspace::zero(a.ambient());
  Eigen::HouseholderQR<CMatrix> qr(a.basis());
  CMatrix q = qr.householderQ() * CMatrix::Identity(a.ambient(), a.ambient());
  return Subspace(q.rightCols(a.ambient() - a.dim()));
}

namespace {

void check_ambient(const Subspace& a, const Subspace& b) {
  if (a.ambient() != b.ambient()) throw Error(ErrorKind::ShapeMismatch, "ambient dimension mismatch");
}

}  // namespace

Subspace intersect(const Subspace& a, const Subspace& b, const Tolerance& tol) {
  check_ambient(a, b);
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient());
  // x = A y lies in b iff (I - P_b) A y = 0.
  CMatrix resid = a.basis() - b.basis() * (b.basis().adjoint() * a.basis());
  Subspace k = kernel_basis(resid, Tolerance{std::max(tol.rank_tol, tol.eq_tol), tol.eq_tol});
  if (k.dim() == 0) return Subspace::zero(a.ambient());
  return range_basis(a.basis() * k.basis(), tol);
}

Subspace sum(const Subspace& a, const Subspace& b, const Tolerance& tol) {
  check_ambient(a, b);
  CMatrix m(a.ambient(), a.dim() + b.dim());
  m << a.basis(), b.basis();
  return range_basis(m, tol);
}

Subspace image(const CMatrix& m, const Subspace& a, const Tolerance& tol) {
  if (m.cols() != a.ambient()) throw Error(ErrorKind::ShapeMismatch, "image: shape mismatch");
  if (a.dim() == 0) return Subspace::zero(m.rows());
  return range_basis(m * a.basis(), tol);
}

Subspace preimage(const CMatrix& m, const Subspace& b, const Tolerance& tol) {
  if (m.rows() != b.ambient()) throw Error(ErrorKind::ShapeMismatch, "preimage: shape mismatch");
  CMatrix resid = m - b.basis() * (b.basis().adjoint() * m);
  if (resid.rows() == 0) return Subspace::full(m.cols());
  return kernel_basis(resid, Tolerance{std::max(tol.rank_tol, tol.eq_tol), tol.eq_tol});
}

double containment_residual(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  if (b.dim() == 0) return 0.0;
  CMatrix r = b.basis() - a.basis() * (a.basis().adjoint() * b.basis());
  return r.colwise().norm().maxCoeff();
}

bool contains(const Subspace& a, const Subspace& b, const Tolerance& tol) {
  return containment_residual(a, b) <= tol.eq_tol;
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  check_ambient(a, b);
  if (a.ambient() == 0) return 0.0;
  return op_norm(a.projector() - b.projector());
}

CMatrix polar_unitary(const CMatrix& m) {
  auto svd = svd_of(m, true);
  return svd.matrixU() * svd.matrixV().adjoint();
}

std::optional<CMatrix> align_unitary(const CMatrix& a, const CMatrix& b, const Tolerance& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::ShapeMismatch, "align_unitary: shape mismatch");
  CMatrix m = b * a.adjoint();
  if (m.rows() == 0) return CMatrix(0, 0);
  auto svd = svd_of(m, true);
  const RVector& s = svd.singularValues();
  if (s(0) <= 0.0 || s(s.size() - 1) <= rank_threshold(s(0), tol)) return std::nullopt;
  return CMatrix(svd.matrixU() * svd.matrixV().adjoint());
}

CMatrix lstsq(const CMatrix& a, const CMatrix& b) {
  if (a.cols() == 0) return CMatrix::Zero(0, b.cols());
  if (a.rows() == 0) return CMatrix::Zero(a.cols(), b.cols());
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(a);
  return cod.solve(b);
}

CMatrix pinv(const CMatrix& a, const Tolerance& tol) {
  if (a.size() == 0) return CMatrix::Zero(a.cols(), a.rows());
  Svd svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double thr = rank_threshold(s(0), tol);
  long k = 0;
  while (k < s.size() && s(k) > thr) ++k;
  RVector inv = s.head(k).cwiseInverse();
  return svd.matrixV().leftCols(k) * inv.asDiagonal() * svd.matrixU().leftCols(k).adjoint();
}

CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace fockmodel
