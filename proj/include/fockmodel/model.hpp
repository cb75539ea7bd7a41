#pragma once

#include <string>
#include <vector>

#include "fockmodel/fockspace.hpp"
#include "fockmodel/multianalytic.hpp"
#include "fockmodel/rowcontraction.hpp"

namespace fockmodel {

/// Truncated model space of a contractive multi-analytic operator.
///
/// Inputs f range over F^2_{<=N}(x)E. The defect Delta_Theta is replaced by
/// J = G^{1/2} in range coordinates, G = I - Theta^*Theta compressed to those
/// inputs (computed with every output degree kept). The ambient space is
/// K = (F^2_{<=N}(x)E_*) (+) range J and H = K minus the graph of f -> P_N Theta f (+) J f.
struct ModelSpace {
  MultiAnalyticOp theta;
  int N_w = 0;
  TruncatedFock in{1, 0, 0};
  TruncatedFock out{1, 0, 0};
  CMatrix J;       // r x in.dim()
  long K = 0;      // out.dim() + r
  CMatrix graph;   // K x in.dim()
  Subspace H;
  double graph_identity_residual = 0.0;  // |M^*M + J^*J - I| with exact outputs

  long defect_rank() const { return J.rows(); }
};

ModelSpace model_space(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol);

struct DefectRowIsometry {
  std::vector<CMatrix> C;  // on range J, r x r
  bool is_cuntz = false;
  double cuntz_residual = 0.0;      // distance of J(degree 0) from J(degree >= 1)
  double isometry_residual = 0.0;   // |C_i^* C_j - delta_ij| on the defined range
  double conditioning = 1.0;
  long defined_rank = 0;            // dim J(inputs of degree <= N-1)
};

DefectRowIsometry defect_row_isometry(const ModelSpace& space, const Tolerance& tol);
DefectRowIsometry defect_row_isometry(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol);

struct Model {
  ModelSpace space;
  DefectRowIsometry defect;
  RowContraction T;             // in the orthonormal basis of space.H
  std::vector<CMatrix> V;       // S_i (x) I (+) C_i on K
  double projection_residual = 0.0;  // |(I - P_H) V_i^* P_H|
  double isometry_residual = 0.0;    // V_i^* V_j - delta_ij on degrees <= N-1 (+) domain of C
};

Model model_from_theta(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol);

struct ModelOfT {
  Model model;
  MultiAnalyticOp theta;
  CMatrix U;                     // H -> model H coordinates
  double embedding_residual = 0.0;
  double moment_residual = 0.0;
  int moment_margin = 3;
};

/// Poisson embedding h -> sum_alpha e_alpha (x) B_*^* Delta_{T*} T_alpha^* h into F^2_{<=N}(x)D_*.
CMatrix poisson_embedding(const RowContraction& t, int N_w);

ModelOfT model_of_T(const RowContraction& t, int N_w, int moment_margin = 3);

/// max over |alpha|, |beta| <= margin of |T_alpha T_beta^* - U^* S_alpha S_beta^* U|.
double moment_distance(const RowContraction& t, const RowContraction& s, const CMatrix& u, int margin);

struct PurePartCheck {
  Verdict coincide = Verdict::Undetermined;
  bool hypothesis_met = false;
  double residual = 0.0;
  long model_dim = 0;
  std::string reason;
};

PurePartCheck model_charfn_is_pure_part(const MultiAnalyticOp& theta, int N_w, const Tolerance& tol);

}  // namespace fockmodel
