#pragma once

#include "fockmodel/dilation.hpp"
#include "fockmodel/multianalytic.hpp"
#include "fockmodel/rowcontraction.hpp"

namespace fockmodel {

struct DefectData {
  CMatrix delta_T_star;  // d x d
  CMatrix delta_T;       // nd x nd
  Subspace D_star;       // range of delta_T_star
  Subspace D;            // range of delta_T
  double identity_residual = 0.0;

  /// Slot injection C^d -> C^{nd} for generator i (1-based).
  CMatrix slot(int i, int n, long d) const;
};

DefectData defects(const RowContraction& t);

/// Symbol of the characteristic function at h (D coordinates), as a vector in
/// F^2_{<=n_w} (x) D_* (D_* coordinates).
FockVector char_symbol(const RowContraction& t, const CVector& h, int n_w);
FockVector char_symbol(const RowContraction& t, const DefectData& dd, const CVector& h, int n_w);

/// Fourier coefficients of the characteristic function up to word length deg.
MultiAnalyticOp char_fn(const RowContraction& t, int deg);
/// Same, with explicitly supplied defect data.
MultiAnalyticOp char_fn(const RowContraction& t, const DefectData& dd, int deg);

/// Theta_L read off the dilation: coefficient at beta is P_{L_*} V_{reverse(beta)}^* |_L.
MultiAnalyticOp char_fn_geometric(const DilationSystem& ds);

}  // namespace fockmodel
