#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fockmodel/multianalytic.hpp"
#include "fockmodel/numerics.hpp"
#include "fockmodel/rowcontraction.hpp"

namespace fockmodel::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kTupleFormat = "fockmodel.tuple/1";
inline constexpr const char* kOperatorFormat = "fockmodel.multianalytic/1";
inline constexpr const char* kSubspaceFormat = "fockmodel.subspace/1";
inline constexpr const char* kReportSchema = "fockmodel.report/1";

/// n matrices of size d x d, entries as [re, im] pairs, row-major.
struct TupleDocument {
  int n = 1;
  long d = 0;
  std::vector<CMatrix> matrices;
  std::optional<Tolerance> tolerances;
  std::vector<std::string> labels;
};

/// Complex matrices as arrays of rows of [re, im] pairs.
Json matrix_to_json(const CMatrix& m);
/// `field` names the location used in diagnostics. Rejects non-finite entries.
CMatrix matrix_from_json(const Json& j, const std::string& field, long rows = -1, long cols = -1);

Json tuple_to_json(const TupleDocument& doc);
TupleDocument tuple_from_json(const Json& j);

/// Coefficients keyed by word strings ("g0", "g1.g2", ...).
Json operator_to_json(const MultiAnalyticOp& op);
MultiAnalyticOp operator_from_json(const Json& j);

/// Orthonormalized on read; columns of `basis` span the subspace.
Json subspace_to_json(const Subspace& s);
Subspace subspace_from_json(const Json& j, const Tolerance& tol);

/// Parses text, reporting line and column on syntax errors. Throws Parse.
Json parse_text(const std::string& text, const std::string& source);
std::string read_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes, std::uint64_t h = 14695981039346656037ULL);
std::string hex64(std::uint64_t v);

}  // namespace fockmodel::io
