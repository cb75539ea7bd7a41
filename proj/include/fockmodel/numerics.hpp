#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

namespace fockmodel {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
/// Singular value decomposition used throughout; dispatches to LAPACK gesvd.
using Svd = Eigen::JacobiSVD<CMatrix>;

struct Tolerance {
  double rank_tol = 1e-9;
  double eq_tol = 1e-8;

  /// Defaults, with eq_tol overridden by FOCKMODEL_DEFAULT_TOL when set.
  static Tolerance from_env();
  void validate() const;
};

/// Orthonormal basis of a subspace of C^ambient, stored column-wise.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(CMatrix basis);
  static Subspace zero(long ambient);
  static Subspace full(long ambient);

  long ambient() const noexcept { return ambient_; }
  long dim() const noexcept { return basis_.cols(); }
  const CMatrix& basis() const noexcept { return basis_; }
  CMatrix projector() const { return basis_ * basis_.adjoint(); }

 private:
  long ambient_ = 0;
  CMatrix basis_;
};

double op_norm(const CMatrix& a);
double sigma_min(const CMatrix& a);
CMatrix hermitian_part(const CMatrix& a);

/// Hermitian PSD square root; eigenvalues in [-eq_tol, 0) are clamped.
CMatrix psd_sqrt(const CMatrix& a, const Tolerance& tol);
/// Inverse square root on the support, zero elsewhere.
CMatrix psd_pinv_sqrt(const CMatrix& a, const Tolerance& tol);

/// Threshold for counting a singular value as nonzero.
double rank_threshold(double sigma_max, const Tolerance& tol);

Subspace range_basis(const CMatrix& a, const Tolerance& tol);
Subspace kernel_basis(const CMatrix& a, const Tolerance& tol);
long numerical_rank(const CMatrix& a, const Tolerance& tol);

/// Range of a hermitian PSD Gram matrix G, with the eigenvalues kept.
/// Vectors v_k with G v_k = lambda_k v_k and lambda_k > rank_tol * max(1, |G|).
struct GramRange {
  CMatrix vectors;
  RVector values;
};
GramRange gram_range(const CMatrix& g, const Tolerance& tol);

Subspace complement(const Subspace& a);
Subspace intersect(const Subspace& a, const Subspace& b, const Tolerance& tol);
Subspace sum(const Subspace& a, const Subspace& b, const Tolerance& tol);
Subspace image(const CMatrix& m, const Subspace& a, const Tolerance& tol);
/// Vectors x with m x in b.
Subspace preimage(const CMatrix& m, const Subspace& b, const Tolerance& tol);
/// Largest residual |(I - P_a) b_k| over basis vectors of b.
double containment_residual(const Subspace& a, const Subspace& b);
bool contains(const Subspace& a, const Subspace& b, const Tolerance& tol);
/// Spectral norm of P_a - P_b.
double subspace_distance(const Subspace& a, const Subspace& b);

/// Unitary U minimizing |U a - b|_F, or nullopt when b a^H is rank deficient.
std::optional<CMatrix> align_unitary(const CMatrix& a, const CMatrix& b, const Tolerance& tol);
/// Polar unitary factor of a square matrix (no degeneracy check).
CMatrix polar_unitary(const CMatrix& m);

/// Least-squares solution of a x = b via complete orthogonal decomposition.
CMatrix lstsq(const CMatrix& a, const CMatrix& b);
/// Pseudo-inverse dropping singular values at or below rank_threshold.
CMatrix pinv(const CMatrix& a, const Tolerance& tol);

/// Block-diagonal stacking.
CMatrix direct_sum(const CMatrix& a, const CMatrix& b);

}  // namespace fockmodel
