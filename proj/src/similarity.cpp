#include "fockmodel/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fockmodel/errors.hpp"

namespace fockmodel {

namespace {

constexpr double kBlowUp = 1e12;
constexpr int kMaxRefinement = 200000;
// sigma_min verdict thresholds.
constexpr double kStableRatio = 0.999;
constexpr double kDecayRatio = 0.95;
constexpr double kSigmaFloor = 1e-6;

double lambda_min(const CMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double lambda_max(const CMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(h.rows() - 1);
}

// P^{s} for s = +1/2 or -1/2 on a positive definite P.
CMatrix pd_power(const CMatrix& p, double s) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(p));
  RVector ev = es.eigenvalues().array().max(0.0).pow(s).matrix();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

double cond(const CMatrix& x) {
  if (x.rows() == 0) return 1.0;
  return op_norm(x) / sigma_min(x);
}

double coisometry_defect(const std::vector<CMatrix>& w, long d) {
  CMatrix s = CMatrix::Zero(d, d);
  for (const auto& wi : w) s += wi * wi.adjoint();
  return d ? op_norm(s - CMatrix::Identity(d, d)) : 0.0;
}

double isometry_defect(const std::vector<CMatrix>& w, long d) {
  double r = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) {
      CMatrix g = w[i].adjoint() * w[j];
      if (i == j) g -= CMatrix::Identity(d, d);
      if (d) r = std::max(r, op_norm(g));
    }
  return r;
}

}  // namespace

bool injectivity_check(const RowContraction& t, const Tolerance& tol) {
  const long nd = static_cast<long>(t.n) * t.d;
  if (nd == 0) return true;
  if (nd > t.d) return false;
  return numerical_rank(t.row(), tol) == nd;
}

PowerBoundScan scan_powers(const RowContraction& t, int horizon) {
  if (horizon < 1) throw Error(ErrorKind::Precondition, "horizon must be >= 1");
  const long d = t.d;
  PowerBoundScan s;
  s.c = d ? std::numeric_limits<double>::infinity() : 0.0;
  CMatrix q = CMatrix::Identity(d, d);
  bool blown = false;
  for (int k = 0; k <= horizon; ++k) {
    const double nq = d ? op_norm(q) : 0.0;
    if (!std::isfinite(nq) || nq > kBlowUp) {
      blown = true;
      break;
    }
    (k <= horizon / 2 ? s.sup_first : s.sup_second) = std::max(k <= horizon / 2 ? s.sup_first : s.sup_second, nq);
    if (d) s.c = std::min(s.c, std::max(0.0, lambda_min(q)));
    q = phi(t, q);
  }
  s.a = std::max(s.sup_first, s.sup_second);
  s.bounded = !blown && s.sup_second <= 2.0 * s.sup_first + 1e-12;
  if (blown) s.c = 0.0;
  return s;
}

double lower_bound_check(const RowContraction& t, int horizon) {
  if (horizon < 0) throw Error(ErrorKind::Precondition, "horizon must be >= 0");
  const long d = t.d;
  if (d == 0) return 0.0;
  double c = std::numeric_limits<double>::infinity();
  CMatrix q = CMatrix::Identity(d, d);
  for (int k = 0; k <= horizon; ++k) {
    c = std::min(c, std::max(0.0, lambda_min(q)));
    if (c == 0.0) break;
    q = phi(t, q);
  }
  return c;
}

AsymptoticP asymptotic_P_power_bounded(const RowContraction& t, int horizon, const Tolerance& tol) {
  const long d = t.d;
  PowerBoundScan scan = scan_powers(t, horizon);
  if (!scan.bounded)
    throw Error(ErrorKind::NotPowerBounded, "sup |Phi^k(I)| grows over the horizon: " +
                                                std::to_string(scan.sup_first) + " then " +
                                                std::to_string(scan.sup_second));
  AsymptoticP out;
  out.a = scan.a;
  out.b = scan.c;
  // An even number of terms averages period-2 sequences exactly.
  const int terms = std::max(2, horizon + (horizon % 2));
  CMatrix q = CMatrix::Identity(d, d);
  CMatrix sum = CMatrix::Zero(d, d);
  for (int k = 0; k < terms; ++k) {
    sum += q;
    q = phi(t, q);
  }
  out.cesaro_terms = terms;
  CMatrix p = sum / static_cast<double>(terms);

  int steps = 0;
  for (;; ++steps) {
    CMatrix fp = phi(t, p);
    const double res = d ? op_norm(fp - p) : 0.0;
    if (res <= tol.eq_tol * 1e-3 * std::max(1.0, d ? op_norm(p) : 0.0)) {
      out.fixed_point_residual = res;
      break;
    }
    if (steps >= kMaxRefinement)
      throw Error(ErrorKind::NotConverged, "fixed-point refinement stalled at residual " + std::to_string(res));
    p = 0.5 * (p + fp);
  }
  out.refinement_steps = steps;
  out.P = hermitian_part(p);
  if (d) {
    out.bounds_residual = std::max({0.0, out.b - lambda_min(out.P), lambda_max(out.P) - out.a});
  }
  return out;
}

SimilarityReport similarity_to_cuntz(const RowContraction& t, int horizon, const Tolerance& tol) {
  SimilarityReport r;
  r.horizon = horizon;
  r.orientation = "T_i = X^-1 W_i X";
  const long d = t.d;
  r.injective = injectivity_check(t, tol);
  if (!r.injective) {
    r.similar = Verdict::No;
    r.reason = t.n >= 2 ? "injectivity: rank [T_1 ... T_n] <= d < n d, so no finite tuple with n >= 2 is "
                          "similar to a Cuntz row isometry"
                        : "injectivity: T is not one-to-one";
    return r;
  }
  PowerBoundScan scan = scan_powers(t, horizon);
  r.power_bounded = scan.bounded;
  r.a = scan.a;
  r.c = scan.c;
  if (!scan.bounded) {
    r.similar = Verdict::No;
    r.reason = "not power bounded";
    return r;
  }
  if (r.c <= tol.eq_tol) {
    r.similar = Verdict::No;
    r.reason = "lower bound c = 0";
    return r;
  }
  AsymptoticP ap;
  try {
    ap = asymptotic_P_power_bounded(t, horizon, tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConverged) throw;
    r.similar = Verdict::Undetermined;
    r.reason = e.what();
    return r;
  }
  r.P = ap.P;
  r.b = ap.b;
  r.fixed_point_residual = ap.fixed_point_residual;
  if (lambda_min(r.P) <= tol.eq_tol) {
    r.similar = Verdict::No;
    r.reason = "P is singular";
    return r;
  }

  const CMatrix root = pd_power(r.P, 0.5), inv_root = pd_power(r.P, -0.5);
  std::vector<CMatrix> wa, wb;
  for (const auto& ti : t.T) {
    wa.push_back(inv_root * ti * root);
    wb.push_back(root * ti * inv_root);
  }
  const double ra = coisometry_defect(wa, d), rb = coisometry_defect(wb, d);
  if (ra <= rb) {
    r.X = inv_root;
    r.W = std::move(wa);
    r.orientation += ", X = P^(-1/2)";
  } else {
    r.X = root;
    r.W = std::move(wb);
    r.orientation += ", X = P^(1/2)";
  }
  r.coisometry_residual = std::min(ra, rb);
  r.isometry_residual = isometry_defect(r.W, d);
  for (std::size_t i = 0; i < t.T.size(); ++i)
    r.intertwining_residual = std::max(r.intertwining_residual, op_norm(r.X * t.T[i] - r.W[i] * r.X));
  r.cond_X = cond(r.X);

  const double scale = std::max(1.0, r.cond_X);
  if (r.coisometry_residual <= tol.eq_tol * scale && r.isometry_residual <= tol.eq_tol * scale &&
      r.intertwining_residual <= tol.eq_tol * scale) {
    r.similar = Verdict::Yes;
    r.achieved = "invertible similarity";
    r.reason = "P invertible fixed point";
  } else {
    r.similar = Verdict::Undetermined;
    r.reason = "W fails the Cuntz identities within tolerance";
  }
  return r;
}

CharFnCriterion invertible_charfn_criterion(const MultiAnalyticOp& theta, const std::vector<int>& degrees) {
  if (degrees.empty()) throw Error(ErrorKind::Precondition, "at least one degree is required");
  CharFnCriterion out;
  out.degrees = degrees;
  std::sort(out.degrees.begin(), out.degrees.end());
  for (int m : out.degrees) {
    if (m < 0) throw Error(ErrorKind::Precondition, "degrees must be >= 0");
    CMatrix a = to_matrix(theta, m);
    out.sigma_mins.push_back(a.size() ? sigma_min(a) : 0.0);
  }
  const double first = out.sigma_mins.front(), last = out.sigma_mins.back();
  const double prev = out.sigma_mins.size() > 1 ? out.sigma_mins[out.sigma_mins.size() - 2] : last;
  if (last <= kSigmaFloor) {
    out.invertible = Verdict::No;
  } else if (out.sigma_mins.size() > 1 && last >= kStableRatio * prev) {
    out.invertible = Verdict::Yes;
    out.theta_inv_norm = 1.0 / last;
  } else if (last < kDecayRatio * first) {
    out.invertible = Verdict::No;
  }
  return out;
}

CharFnCriterion invertible_charfn_criterion(const RowContraction& t, const DefectData& dd, int N_w,
                                            const std::vector<int>& degrees) {
  for (int m : degrees)
    if (m > N_w) throw Error(ErrorKind::Precondition, "degree " + std::to_string(m) + " exceeds N_w");
  return invertible_charfn_criterion(char_fn(t, dd, N_w), degrees);
}

CharFnCriterion invertible_charfn_criterion(const RowContraction& t, int N_w, const std::vector<int>& degrees) {
  if (t.contraction_margin() < -t.tol.eq_tol) throw Error(ErrorKind::Precondition, "T is not a row contraction");
  if (compute_Hc(t, t.tol).dim() > 0) throw Error(ErrorKind::NotCNC, "T has a nonzero coisometric part");
  return invertible_charfn_criterion(t, defects(t), N_w, degrees);
}

}  // namespace fockmodel
