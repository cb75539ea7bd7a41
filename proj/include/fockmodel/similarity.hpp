#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fockmodel/charfn.hpp"
#include "fockmodel/multianalytic.hpp"
#include "fockmodel/rowcontraction.hpp"

namespace fockmodel {

/// Injectivity of the row operator [T_1 ... T_n] : C^{nd} -> C^d.
bool injectivity_check(const RowContraction& t, const Tolerance& tol);

/// c = min over k <= horizon of lambda_min(Phi^k(I)).
double lower_bound_check(const RowContraction& t, int horizon);

struct PowerBoundScan {
  bool bounded = false;
  double sup_first = 0.0;   // sup |Phi^k(I)| over k <= horizon / 2
  double sup_second = 0.0;  // over the rest of the horizon
  double a = 0.0;           // M^2
  double c = 0.0;           // lower_bound_check over the same horizon
};
/// Not bounded when the second half of the horizon exceeds twice the first,
/// or when |Phi^k(I)| passes 1e12.
PowerBoundScan scan_powers(const RowContraction& t, int horizon);

struct AsymptoticP {
  CMatrix P;
  double a = 0.0;  // sup_k |Phi^k(I)|
  double b = 0.0;  // c from lower_bound_check
  double fixed_point_residual = 0.0;  // |Phi(P) - P|
  double bounds_residual = 0.0;       // violation of b I <= P <= a I
  int cesaro_terms = 0;
  int refinement_steps = 0;
};
/// Cesaro average of Phi^k(I) followed by the averaging iteration
/// P <- (P + Phi(P)) / 2 until |Phi(P) - P| <= eq_tol * 1e-3 * max(1, |P|).
/// Throws NotPowerBounded or NotConverged.
AsymptoticP asymptotic_P_power_bounded(const RowContraction& t, int horizon, const Tolerance& tol);

/// Orientation: T_i = X^{-1} W_i X with X = P^{-1/2}, so W_i = P^{-1/2} T_i P^{1/2}.
struct SimilarityReport {
  Verdict similar = Verdict::Undetermined;
  std::string reason;
  std::string orientation;
  std::string achieved;  // "invertible similarity" or empty
  bool injective = false;
  bool power_bounded = false;
  double c = 0.0;
  double a = 0.0;
  double b = 0.0;
  CMatrix P;
  CMatrix X;
  std::vector<CMatrix> W;
  double cond_X = 0.0;
  std::optional<double> theta_inv_norm;
  double fixed_point_residual = 0.0;
  double intertwining_residual = 0.0;  // max_i |X T_i - W_i X|
  double coisometry_residual = 0.0;    // |sum W_i W_i^* - I|
  double isometry_residual = 0.0;      // max_ij |W_i^* W_j - delta_ij I|
  int horizon = 0;
};
SimilarityReport similarity_to_cuntz(const RowContraction& t, int horizon, const Tolerance& tol);

struct CharFnCriterion {
  Verdict invertible = Verdict::Undetermined;
  std::optional<double> theta_inv_norm;
  std::vector<int> degrees;
  std::vector<double> sigma_mins;
};
/// sigma_min of square truncations to_matrix(theta, m) for each m in degrees.
CharFnCriterion invertible_charfn_criterion(const MultiAnalyticOp& theta, const std::vector<int>& degrees);
/// Throws NotCNC when H_c is nonzero and Precondition when a degree exceeds N_w.
CharFnCriterion invertible_charfn_criterion(const RowContraction& t, int N_w, const std::vector<int>& degrees);
/// Uses the supplied defect data, for truncations of operators whose defects are known.
CharFnCriterion invertible_charfn_criterion(const RowContraction& t, const DefectData& dd, int N_w,
                                            const std::vector<int>& degrees);

}  // namespace fockmodel
