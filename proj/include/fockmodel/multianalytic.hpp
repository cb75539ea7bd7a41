#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fockmodel/fockspace.hpp"
#include "fockmodel/numerics.hpp"
#include "fockmodel/words.hpp"

namespace fockmodel {

/// Multi-analytic operator F^2 (x) E -> F^2 (x) E_* given by finitely many
/// Fourier coefficients theta_(alpha), so that A ~ sum_alpha R_alpha (x) theta_(alpha).
class MultiAnalyticOp {
 public:
  MultiAnalyticOp() = default;
  MultiAnalyticOp(int n, long dim_in, long dim_out);

  static MultiAnalyticOp constant(int n, const CMatrix& m);
  static MultiAnalyticOp identity(int n, long dim);

  int n() const noexcept { return n_; }
  long dim_in() const noexcept { return dim_in_; }
  long dim_out() const noexcept { return dim_out_; }
  /// Largest stored word length (0 for constants and the zero operator).
  int deg() const;

  void set(const Word& w, const CMatrix& m);
  void add(const Word& w, const CMatrix& m);
  CMatrix coeff(const Word& w) const;
  const std::map<Word, CMatrix>& coeffs() const noexcept { return coeffs_; }

 private:
  int n_ = 1;
  long dim_in_ = 0;
  long dim_out_ = 0;
  std::map<Word, CMatrix> coeffs_;
};

/// Drops coefficients with Frobenius norm <= thr.
MultiAnalyticOp prune(const MultiAnalyticOp& op, double thr);

/// Matrix from F^2_{<=in_deg} (x) E to F^2_{<=out_deg} (x) E_*; block at
/// (gamma alpha~, gamma) is theta_(alpha).
CMatrix to_matrix(const MultiAnalyticOp& op, int in_deg, int out_deg);
inline CMatrix to_matrix(const MultiAnalyticOp& op, int n_w) { return to_matrix(op, n_w, n_w); }

/// Reads coefficients off symbol vectors: column j of `symbols` is the image of
/// 1 (x) e_j in F^2_{<=max_deg} (x) C^dim_out. Component at word beta lands in
/// theta_(reverse(beta)).
MultiAnalyticOp from_symbols(int n, long dim_out, int max_deg, const CMatrix& symbols, double prune_thr = 0.0);

/// max_i |A (S_i (x) I) - (S_i (x) I) A| on inputs of degree <= n_w - 1 - deg.
/// Very large defect blocks report the Frobenius norm instead.
double intertwining_defect(const MultiAnalyticOp& op, int n_w);

MultiAnalyticOp multiply(const MultiAnalyticOp& a, const MultiAnalyticOp& b);
MultiAnalyticOp adjoint_constant(const MultiAnalyticOp& op);
/// (I (x) left) op (I (x) right).
MultiAnalyticOp conjugate(const CMatrix& left, const MultiAnalyticOp& op, const CMatrix& right);
/// Coefficient-wise direct sum.
MultiAnalyticOp direct_sum(const MultiAnalyticOp& a, const MultiAnalyticOp& b);

struct Classification {
  bool inner = false;
  bool outer = false;
  bool purely_contractive = false;
  bool unitary_constant = false;
  int inner_margin = 0;  // inputs of degree <= inner_margin were tested
  int outer_margin = 0;  // outputs of degree <= outer_margin were tested
  double inner_residual = 0.0;
  double outer_residual = 0.0;
  double sigma_max_constant = 0.0;
};

Classification classify(const MultiAnalyticOp& op, int n_w, const Tolerance& tol);

struct PureUnitaryDecomposition {
  Subspace E_u;       // in E
  Subspace E_star_u;  // in E_*
  CMatrix W;          // unitary E_u -> E_star_u in the two bases
  Subspace E_0;
  Subspace E_star_0;
  MultiAnalyticOp pure;  // compression to E_0 -> E_star_0
};

PureUnitaryDecomposition pure_unitary_decomposition(const MultiAnalyticOp& op, const Tolerance& tol);

enum class Verdict { Yes, No, Undetermined };
const char* to_string(Verdict v);

struct Coincidence {
  Verdict coincide = Verdict::Undetermined;
  CMatrix W;       // E -> E'
  CMatrix W_star;  // E_* -> E_*'
  double residual = 0.0;
  std::string reason;
};

/// Searches unitaries with W_* theta_(alpha) = theta'_(alpha) W for every alpha.
Coincidence coincides(const MultiAnalyticOp& a, const MultiAnalyticOp& b, const Tolerance& tol);

struct InnerOuter {
  MultiAnalyticOp inner;
  MultiAnalyticOp outer;
  int margin = 0;  // product compared on coefficients of degree <= margin
  double product_residual = 0.0;
  Classification inner_class;
  Classification outer_class;
};

InnerOuter inner_outer_factorize(const MultiAnalyticOp& op, int n_w, const Tolerance& tol);

/// max_alpha |a_(alpha) - b_(alpha)| over words of length <= max_len.
double coefficient_distance(const MultiAnalyticOp& a, const MultiAnalyticOp& b, int max_len);

}  // namespace fockmodel
