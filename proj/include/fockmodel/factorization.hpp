#pragma once

#include <string>

#include "fockmodel/dilation.hpp"
#include "fockmodel/fockspace.hpp"
#include "fockmodel/model.hpp"
#include "fockmodel/multianalytic.hpp"
#include "fockmodel/rowcontraction.hpp"

namespace fockmodel {

/// Theta = Theta_2 Theta_1 with Theta_1 : F^2(x)E -> F^2(x)F and
/// Theta_2 : F^2(x)F -> F^2(x)E_*, truncated at working degree N_w.
///
/// Defects are PSD square roots of I - M^*M where M keeps every output degree.
/// Y f = Delta_2 Theta_1 f (+) Delta_1 f, so X maps Delta_Theta f to Y f.
struct Factorization {
  MultiAnalyticOp theta;
  MultiAnalyticOp theta1;
  MultiAnalyticOp theta2;
  int N_w = 0;
  TruncatedFock in{1, 0, 0};   // F^2_{<=N_w} (x) E
  TruncatedFock mid{1, 0, 0};  // F^2_{<=N_w+deg1} (x) F
  CMatrix M1;                  // mid.dim() x in.dim()
  CMatrix delta;               // Delta_Theta on in
  CMatrix delta1;              // Delta_1 on in
  CMatrix delta2;              // Delta_2 on mid
  CMatrix Y;                   // (mid.dim() + in.dim()) x in.dim()
  CMatrix X;                   // range(Delta_Theta) coordinates -> mid (+) in
  double product_residual = 0.0;   // coefficient distance of theta and theta2 theta1
  double identity_residual = 0.0;  // |D_Theta^2 - M1^* D_2^2 M1 - D_1^2|
  double isometry_residual = 0.0;  // |Y^*Y - Delta_Theta^2|
  bool regular = false;
  int regularity_margin = 0;       // targets of degree <= margin were tested
  double regularity_residual = 0.0;
};

/// Uses multiply(theta2, theta1) as Theta.
Factorization build_X(const MultiAnalyticOp& theta1, const MultiAnalyticOp& theta2, int N_w, const Tolerance& tol);
/// Uses the supplied Theta; the product is compared coefficient-wise.
Factorization build_X(const MultiAnalyticOp& theta, const MultiAnalyticOp& theta1, const MultiAnalyticOp& theta2,
                      int N_w, const Tolerance& tol);

/// |X C_i - diag(F_i, E_i) X| on inputs of degree <= N_w - 1.
double intertwining_residual(const Factorization& f, const Tolerance& tol);

struct CuntzTriple {
  bool C = false;  // defect row isometry of Theta
  bool E = false;  // of Theta_1
  bool F = false;  // of Theta_2
};
CuntzTriple cuntz_triple(const Factorization& f, const Tolerance& tol);

/// Each rule is Yes/No when it applies (predicting regular or not) and
/// Undetermined otherwise.
struct RegularityShortcuts {
  Verdict inner_factor2 = Verdict::Undetermined;
  Verdict inner_theta_rule = Verdict::Undetermined;
  Verdict rank_rule = Verdict::Undetermined;
  long rank_theta = -1;  // -1 when the truncated rank keeps growing
  long rank1 = -1;
  long rank2 = -1;
  bool regular = false;
};
/// Throws StructureViolation when an applicable rule disagrees with build_X.
RegularityShortcuts regularity_shortcuts(const MultiAnalyticOp& theta1, const MultiAnalyticOp& theta2, int N_w,
                                         const Tolerance& tol);

/// Subspaces H1 (invariant) and H2 = H minus H1 of the model of f.theta, in
/// the model's ambient coordinates.
struct ModelSubspaces {
  Model model;
  Subspace H1;
  Subspace H2;
  double invariance_residual = 0.0;   // max_i |(I - P_H1) T_i P_H1|
  double complement_residual = 0.0;   // distance of H2 from H minus H1
  double membership_residual = 0.0;   // Theta_2^* f + Delta_2 g over H2
};
ModelSubspaces subspaces_from_factorization(const Factorization& f, const Tolerance& tol);

/// Regular factorization of Theta_L induced by a joint invariant subspace.
struct SubspaceFactorization {
  Factorization factorization;
  DilationSystem dilation;
  Subspace Q;                       // wandering subspace of V on K minus (H minus H1)
  double product_residual = 0.0;    // coefficient distance Theta_L vs Psi_2 Psi_1
  bool round_trip_checked = false;
  double round_trip_distance = 0.0; // image of H1 vs H1 from the factorization
  Subspace H1_image;                // image of H1 in the model coordinates
};
SubspaceFactorization factorization_from_subspace(const RowContraction& t, const Subspace& H1, int N);

struct TriangulationCheck {
  Verdict A_coincides = Verdict::Undetermined;  // char_fn(A) vs pure part of Theta_1
  Verdict B_coincides = Verdict::Undetermined;  // char_fn(B) vs pure part of Theta_2
  double A_residual = 0.0;
  double B_residual = 0.0;
  long dim_H1 = 0;
  long dim_H2 = 0;
  bool subspace_nontrivial = false;
  bool factorization_nontrivial = false;  // neither factor a unitary constant
  bool nontriviality_agrees = false;
};
TriangulationCheck factor_triangulation_check(const Factorization& f, const Tolerance& tol);

enum class FactorRelation { Contained, Contains, Equal };
const char* to_string(FactorRelation r);

/// Contained: H1 of f inside H1' of g and Theta_1' = Psi Theta_1.
/// Contains: the reverse, with Theta_1 = Psi Theta_1'.
struct FactorComparison {
  FactorRelation relation = FactorRelation::Equal;
  MultiAnalyticOp psi;
  bool psi_unitary_constant = false;
  double solve_residual = 0.0;
  double product_residual = 0.0;
};
/// Throws NotComparable when neither H1 contains the other.
FactorComparison compare_factorizations(const Factorization& f, const Factorization& g, const Tolerance& tol);

/// Inner-outer factorization of char_fn(t) pulled back to H through the
/// Poisson kernel: H_0 is the image of the inner factor's block.
struct InnerOuterSplit {
  Subspace H0;
  Subspace H1;
  Factorization factorization;
  long kernel_dim = 0;  // dim of the Poisson kernel's null space
};
InnerOuterSplit inner_outer_split(const RowContraction& t, int N_w, const Tolerance& tol);

}  // namespace fockmodel
