#pragma once

#include <set>
#include <vector>

#include "fockmodel/numerics.hpp"
#include "fockmodel/words.hpp"

namespace fockmodel {

enum class Side { Left, Right };

inline constexpr long kMaxFockDimension = 200000;

/// F^2 truncated at degree N, tensored with C^m. Basis order is word-major.
class TruncatedFock {
 public:
  TruncatedFock(int n, int max_deg, long coeff_dim);

  int n() const noexcept { return n_; }
  int max_deg() const noexcept { return max_deg_; }
  long coeff_dim() const noexcept { return m_; }
  long word_count() const noexcept { return static_cast<long>(words_.size()); }
  long dim() const noexcept { return word_count() * m_; }
  const std::vector<Word>& words() const noexcept { return words_; }

  /// Row of basis vector e_w (x) e_k.
  long index(const Word& w, long k = 0) const { return word_index(w) * m_ + k; }
  /// First index of the block of words of length deg.
  long degree_offset(int deg) const;

 private:
  int n_;
  int max_deg_;
  long m_;
  std::vector<Word> words_;
};

using FockVector = CVector;

/// Matrix of S_i (x) I (left) or R_i (x) I (right); top-degree vectors map to 0.
CMatrix creation_matrix(const TruncatedFock& space, int i, Side side);

/// Orthogonal projector onto words whose length lies in degrees.
CMatrix degree_projector(const TruncatedFock& space, const std::set<int>& degrees);

/// Index list of basis vectors with word length in [lo, hi].
std::vector<long> degree_indices(const TruncatedFock& space, int lo, int hi);

/// Permutation e_w (x) k -> e_reverse(w) (x) k.
CMatrix flip_unitary(const TruncatedFock& space);

/// Selects columns of a listed in idx.
CMatrix take_cols(const CMatrix& a, const std::vector<long>& idx);
CMatrix take_rows(const CMatrix& a, const std::vector<long>& idx);

}  // namespace fockmodel
