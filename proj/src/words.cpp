#include "fockmodel/words.hpp"

#include <sstream>

#include "fockmodel/errors.hpp"

namespace fockmodel {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::StructureViolation: return "StructureViolation";
    case ErrorKind::NotCNC: return "NotCNC";
    case ErrorKind::NotWandering: return "NotWandering";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::RankUnstable: return "RankUnstable";
    case ErrorKind::TruncationUnstable: return "TruncationUnstable";
    case ErrorKind::NotComparable: return "NotComparable";
    case ErrorKind::NotPowerBounded: return "NotPowerBounded";
    case ErrorKind::DimensionGuard: return "DimensionGuard";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

Word::Word(int n, std::vector<int> letters) : n_(n), letters_(std::move(letters)) {
  if (n < 1) throw Error(ErrorKind::Precondition, "alphabet size must be positive");
  for (int l : letters_)
    if (l < 1 || l > n) throw Error(ErrorKind::Precondition, "letter out of range");
}

std::string Word::str() const {
  if (letters_.empty()) return "g0";
  std::string s;
  for (std::size_t k = 0; k < letters_.size(); ++k) {
    if (k) s += '.';
    s += 'g';
    s += std::to_string(letters_[k]);
  }
  return s;
}

Word Word::parse(int n, const std::string& text) {
  if (text == "g0" || text.empty()) return Word(n);
  std::vector<int> letters;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, '.')) {
    if (tok.size() < 2 || tok[0] != 'g')
      throw Error(ErrorKind::Parse, "bad word token '" + tok + "'");
    try {
      std::size_t used = 0;
      int l = std::stoi(tok.substr(1), &used);
      if (used != tok.size() - 1) throw std::invalid_argument(tok);
      letters.push_back(l);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Parse, "bad word token '" + tok + "'");
    }
  }
  return Word(n, std::move(letters));
}

std::strong_ordering Word::operator<=>(const Word& o) const {
  if (auto c = letters_.size() <=> o.letters_.size(); c != 0) return c;
  return letters_ <=> o.letters_;
}

Word concat(const Word& a, const Word& b) {
  if (a.alphabet() != b.alphabet())
    throw Error(ErrorKind::AlphabetMismatch, "concat of words over different alphabets");
  std::vector<int> l = a.letters();
  l.insert(l.end(), b.letters().begin(), b.letters().end());
  return Word(a.alphabet(), std::move(l));
}

Word reverse(const Word& a) {
  return Word(a.alphabet(), std::vector<int>(a.letters().rbegin(), a.letters().rend()));
}

long long word_count(int n, int max_len) {
  if (n < 1) throw Error(ErrorKind::Precondition, "alphabet size must be positive");
  long long total = 0, p = 1;
  for (int k = 0; k <= max_len; ++k) {
    total += p;
    p *= n;
  }
  return total;
}

long long word_index(const Word& w) {
  const int n = w.alphabet();
  long long offset = word_count(n, w.length() - 1);
  if (w.length() == 0) offset = 0;
  long long v = 0;
  for (int l : w.letters()) v = v * n + (l - 1);
  return offset + v;
}

std::vector<Word> enumerate_words(int n, int max_len) {
  if (n < 1) throw Error(ErrorKind::Precondition, "alphabet size must be positive");
  std::vector<Word> out;
  out.reserve(static_cast<std::size_t>(word_count(n, max_len)));
  out.emplace_back(n);
  std::size_t level_begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t level_end = out.size();
    for (std::size_t k = level_begin; k < level_end; ++k) {
      for (int i = 1; i <= n; ++i) {
        std::vector<int> l = out[k].letters();
        l.push_back(i);
        out.emplace_back(n, std::move(l));
      }
    }
    level_begin = level_end;
  }
  return out;
}

std::vector<std::pair<Word, Word>> factorizations(const Word& w) {
  std::vector<std::pair<Word, Word>> out;
  const auto& l = w.letters();
  for (std::size_t k = 0; k <= l.size(); ++k) {
    out.emplace_back(Word(w.alphabet(), {l.begin(), l.begin() + static_cast<long>(k)}),
                     Word(w.alphabet(), {l.begin() + static_cast<long>(k), l.end()}));
  }
  return out;
}

}  // namespace fockmodel
