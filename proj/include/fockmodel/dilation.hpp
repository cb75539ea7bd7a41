#pragma once

#include <vector>

#include "fockmodel/fockspace.hpp"
#include "fockmodel/rowcontraction.hpp"

namespace fockmodel {

/// Truncated minimal isometric dilation on K = H (+) (F^2_{<=N-1} (x) D),
///   V_i (h (+) xi) = T_i h (+) (1 (x) D_i h + e_i (x) xi).
struct DilationSystem {
  RowContraction T;
  int N = 1;
  long defect_dim = 0;      // dim D
  CMatrix delta_T;          // nd x nd
  Subspace D;               // range of delta_T in C^{nd}
  TruncatedFock fock{1, 0, 0};
  long K = 0;
  std::vector<CMatrix> V;
  Subspace L;
  Subspace L_star;
  Subspace residual;
  bool residual_converged = false;
  int nilpotency = -1;      // smallest m with Phi^m(I) = 0, or -1
  bool exact = false;       // nilpotency in [0, N-1]
  double isometry_residual = 0.0;
  double dilation_residual = 0.0;
  double minimality_residual = 0.0;

  /// Columns embedding H into K.
  CMatrix embed_H() const;
  /// V_alpha.
  CMatrix product(const Word& alpha) const;
};

DilationSystem build_dilation(const RowContraction& t, int N);

struct WanderingPair {
  Subspace L;
  Subspace L_star;
};
WanderingPair wandering_subspaces(const DilationSystem& ds);

struct WoldResult {
  Subspace residual;
  bool residual_converged = false;
  Subspace wandering;
  int iterations = 0;
  bool converged = false;
  double leakage = 0.0;        // max distance of the limit's eigenvalues from {0, 1}
  double identity_residual = 0.0;  // |space - (residual (+) span V_alpha wandering)|
};

/// Wold decomposition of the row isometry V restricted to the invariant subspace
/// `space` (ambient coordinates in and out).
WoldResult wold(const std::vector<CMatrix>& V, const Subspace& space, const Tolerance& tol, int horizon = 200);
WoldResult wold(const std::vector<CMatrix>& V, const Tolerance& tol, int horizon = 200);

/// Synthesis map e_alpha (x) e_j -> V_alpha w_j for |alpha| <= margin; its adjoint
/// is the Fourier representation of span{V_alpha W}.
struct FourierRep {
  TruncatedFock space{1, 0, 0};
  CMatrix synth;
  double orthonormality_residual = 0.0;
  double intertwining_residual = 0.0;
};

FourierRep fourier_representation(const std::vector<CMatrix>& V, const Subspace& W, int margin, const Tolerance& tol);

}  // namespace fockmodel
