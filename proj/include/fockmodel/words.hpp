#pragma once

#include <compare>
#include <string>
#include <utility>
#include <vector>

namespace fockmodel {

/// Element of the free semigroup on n generators. Letters are 1-based; the
/// empty word is the identity g0.
class Word {
 public:
  Word() = default;
  explicit Word(int n, std::vector<int> letters = {});

  static Word identity(int n) { return Word(n); }
  static Word generator(int n, int i) { return Word(n, {i}); }

  int alphabet() const noexcept { return n_; }
  int length() const noexcept { return static_cast<int>(letters_.size()); }
  bool empty() const noexcept { return letters_.empty(); }
  const std::vector<int>& letters() const noexcept { return letters_; }
  int operator[](int k) const { return letters_[static_cast<std::size_t>(k)]; }

  /// "g0" for the identity, otherwise dot-separated letters such as "g1.g2".
  std::string str() const;
  static Word parse(int n, const std::string& text);

  /// Graded-lexicographic comparison: shorter first, then by letters.
  std::strong_ordering operator<=>(const Word& o) const;
  bool operator==(const Word& o) const = default;

 private:
  int n_ = 1;
  std::vector<int> letters_;
};

Word concat(const Word& a, const Word& b);
Word reverse(const Word& a);

/// All words of length <= max_len in canonical graded-lexicographic order.
std::vector<Word> enumerate_words(int n, int max_len);

/// All (prefix, suffix) pairs whose concatenation is w, by prefix length.
std::vector<std::pair<Word, Word>> factorizations(const Word& w);

/// Number of words of length <= max_len.
long long word_count(int n, int max_len);

/// Position of w inside enumerate_words(w.alphabet(), ...).
long long word_index(const Word& w);

}  // namespace fockmodel
