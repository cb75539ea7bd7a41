#include "fockmodel/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fockmodel/errors.hpp"

namespace fockmodel::io {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::Parse, field + ": " + msg);
}

const Json& member(const Json& j, const char* key, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(field, std::string("missing field '") + key + "'");
  return *it;
}

long integer(const Json& j, const std::string& field, long lo) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  long v = j.get<long>();
  if (v < lo) fail(field, "must be >= " + std::to_string(lo));
  return v;
}

double real(const Json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "non-finite value");
  return v;
}

void check_format(const Json& j, const char* expected) {
  auto it = j.find("format");
  if (it != j.end() && (!it->is_string() || it->get<std::string>() != expected))
    fail("format", std::string("expected '") + expected + "'");
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real() + 0.0, m(r, c).imag() + 0.0}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j, const std::string& field, long rows, long cols) {
  if (!j.is_array()) fail(field, "expected an array of rows");
  const long r = static_cast<long>(j.size());
  if (rows >= 0 && r != rows) fail(field, "expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
  long c = cols;
  if (c < 0) c = r ? static_cast<long>(j[0].is_array() ? j[0].size() : 0) : 0;
  CMatrix m(r, c);
  for (long i = 0; i < r; ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) fail(rf, "expected a row array");
    if (static_cast<long>(row.size()) != c)
      fail(rf, "expected " + std::to_string(c) + " entries, got " + std::to_string(row.size()));
    for (long k = 0; k < c; ++k) {
      const std::string ef = rf + "[" + std::to_string(k) + "]";
      const Json& e = row[static_cast<std::size_t>(k)];
      if (!e.is_array() || e.size() != 2) fail(ef, "expected an [re, im] pair");
      m(i, k) = cplx(real(e[0], ef + "[0]"), real(e[1], ef + "[1]"));
    }
  }
  return m;
}

Json tuple_to_json(const TupleDocument& doc) {
  Json j;
  j["format"] = kTupleFormat;
  j["n"] = doc.n;
  j["d"] = doc.d;
  Json ms = Json::array();
  for (const auto& m : doc.matrices) ms.push_back(matrix_to_json(m));
  j["matrices"] = std::move(ms);
  if (doc.tolerances) j["tolerances"] = {{"rank_tol", doc.tolerances->rank_tol}, {"eq_tol", doc.tolerances->eq_tol}};
  if (!doc.labels.empty()) j["labels"] = doc.labels;
  return j;
}

TupleDocument tuple_from_json(const Json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  check_format(j, kTupleFormat);
  TupleDocument doc;
  doc.n = static_cast<int>(integer(member(j, "n", "<root>"), "n", 1));
  doc.d = integer(member(j, "d", "<root>"), "d", 0);
  const Json& ms = member(j, "matrices", "<root>");
  if (!ms.is_array() || static_cast<long>(ms.size()) != doc.n)
    fail("matrices", "expected an array of n = " + std::to_string(doc.n) + " matrices");
  for (int i = 0; i < doc.n; ++i)
    doc.matrices.push_back(matrix_from_json(ms[static_cast<std::size_t>(i)], "matrices[" + std::to_string(i) + "]",
                                            doc.d, doc.d));
  if (auto it = j.find("tolerances"); it != j.end()) {
    Tolerance t;
    if (auto r = it->find("rank_tol"); r != it->end()) t.rank_tol = real(*r, "tolerances.rank_tol");
    if (auto e = it->find("eq_tol"); e != it->end()) t.eq_tol = real(*e, "tolerances.eq_tol");
    try {
      t.validate();
    } catch (const Error& e) {
      fail("tolerances", e.what());
    }
    doc.tolerances = t;
  }
  if (auto it = j.find("labels"); it != j.end()) {
    if (!it->is_array()) fail("labels", "expected an array of strings");
    for (std::size_t k = 0; k < it->size(); ++k) {
      if (!(*it)[k].is_string()) fail("labels[" + std::to_string(k) + "]", "expected a string");
      doc.labels.push_back((*it)[k].get<std::string>());
    }
  }
  return doc;
}

Json operator_to_json(const MultiAnalyticOp& op) {
  Json j;
  j["format"] = kOperatorFormat;
  j["n"] = op.n();
  j["dim_in"] = op.dim_in();
  j["dim_out"] = op.dim_out();
  Json cs = Json::array();
  for (const auto& [w, m] : op.coeffs()) cs.push_back({{"word", w.str()}, {"matrix", matrix_to_json(m)}});
  j["coefficients"] = std::move(cs);
  return j;
}

MultiAnalyticOp operator_from_json(const Json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  check_format(j, kOperatorFormat);
  const int n = static_cast<int>(integer(member(j, "n", "<root>"), "n", 1));
  const long din = integer(member(j, "dim_in", "<root>"), "dim_in", 0);
  const long dout = integer(member(j, "dim_out", "<root>"), "dim_out", 0);
  MultiAnalyticOp op(n, din, dout);
  const Json& cs = member(j, "coefficients", "<root>");
  if (!cs.is_array()) fail("coefficients", "expected an array");
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const std::string f = "coefficients[" + std::to_string(k) + "]";
    const Json& w = member(cs[k], "word", f);
    if (!w.is_string()) fail(f + ".word", "expected a word string");
    Word word;
    try {
      word = Word::parse(n, w.get<std::string>());
    } catch (const Error& e) {
      fail(f + ".word", e.what());
    }
    op.add(word, matrix_from_json(member(cs[k], "matrix", f), f + ".matrix", dout, din));
  }
  return op;
}

Json subspace_to_json(const Subspace& s) {
  Json j;
  j["format"] = kSubspaceFormat;
  j["ambient"] = s.ambient();
  j["dim"] = s.dim();
  j["basis"] = matrix_to_json(s.basis());
  return j;
}

Subspace subspace_from_json(const Json& j, const Tolerance& tol) {
  if (!j.is_object()) fail("<root>", "expected an object");
  check_format(j, kSubspaceFormat);
  const long ambient = integer(member(j, "ambient", "<root>"), "ambient", 0);
  const Json& b = member(j, "basis", "<root>");
  if (b.is_array() && (b.empty() || (b[0].is_array() && b[0].empty()))) return Subspace::zero(ambient);
  CMatrix m = matrix_from_json(b, "basis", ambient);
  return range_basis(m, tol);
}

Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into line and column.
    long line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, source + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace fockmodel::io
