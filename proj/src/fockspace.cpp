#include "fockmodel/fockspace.hpp"

#include "fockmodel/errors.hpp"

namespace fockmodel {

TruncatedFock::TruncatedFock(int n, int max_deg, long coeff_dim) : n_(n), max_deg_(max_deg), m_(coeff_dim) {
  if (n < 1) throw Error(ErrorKind::Precondition, "alphabet size must be positive");
  if (max_deg < 0) throw Error(ErrorKind::Precondition, "truncation degree must be non-negative");
  if (coeff_dim < 0) throw Error(ErrorKind::Precondition, "coefficient dimension must be non-negative");
  long long total = fockmodel::word_count(n, max_deg) * std::max<long>(coeff_dim, 1);
  if (total > kMaxFockDimension)
    throw Error(ErrorKind::DimensionGuard, "truncated Fock space of dimension " + std::to_string(total) +
                                              " exceeds " + std::to_string(kMaxFockDimension));
  words_ = enumerate_words(n, max_deg);
}

long TruncatedFock::degree_offset(int deg) const {
  return deg <= 0 ? 0 : static_cast<long>(fockmodel::word_count(n_, deg - 1)) * m_;
}

CMatrix creation_matrix(const TruncatedFock& space, int i, Side side) {
  if (i < 1 || i > space.n()) throw Error(ErrorKind::Precondition, "generator index out of range");
  const long m = space.coeff_dim();
  CMatrix s = CMatrix::Zero(space.dim(), space.dim());
  for (const Word& w : space.words()) {
    if (w.length() >= space.max_deg()) continue;
    Word g = Word::generator(space.n(), i);
    Word target = side == Side::Left ? concat(g, w) : concat(w, g);
    const long from = space.index(w), to = space.index(target);
    for (long k = 0; k < m; ++k) s(to + k, from + k) = 1.0;
  }
  return s;
}

std::vector<long> degree_indices(const TruncatedFock& space, int lo, int hi) {
  std::vector<long> idx;
  lo = std::max(lo, 0);
  hi = std::min(hi, space.max_deg());
  if (lo > hi) return idx;
  for (long r = space.degree_offset(lo); r < space.degree_offset(hi + 1); ++r) idx.push_back(r);
  return idx;
}

CMatrix degree_projector(const TruncatedFock& space, const std::set<int>& degrees) {
  CMatrix p = CMatrix::Zero(space.dim(), space.dim());
  for (int deg : degrees) {
    if (deg < 0 || deg > space.max_deg()) throw Error(ErrorKind::Precondition, "degree outside truncation");
    for (long r : degree_indices(space, deg, deg)) p(r, r) = 1.0;
  }
  return p;
}

CMatrix flip_unitary(const TruncatedFock& space) {
  const long m = space.coeff_dim();
  CMatrix u = CMatrix::Zero(space.dim(), space.dim());
  for (const Word& w : space.words()) {
    const long from = space.index(w), to = space.index(reverse(w));
    for (long k = 0; k < m; ++k) u(to + k, from + k) = 1.0;
  }
  return u;
}

CMatrix take_cols(const CMatrix& a, const std::vector<long>& idx) {
  CMatrix out(a.rows(), static_cast<long>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<long>(k)) = a.col(idx[k]);
  return out;
}

CMatrix take_rows(const CMatrix& a, const std::vector<long>& idx) {
  CMatrix out(static_cast<long>(idx.size()), a.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<long>(k)) = a.row(idx[k]);
  return out;
}

}  // namespace fockmodel
