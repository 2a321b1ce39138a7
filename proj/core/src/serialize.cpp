// JSON documents for form triples and relations. Complex entries are
// [re, im] pairs; matrices are arrays of rows.

#include <json.hpp>

#include "relforms/forms.hpp"
#include "relforms/relation.hpp"

namespace relforms {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back({a(i, j).real(), a(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Complex entry_from_json(const json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  throw Error(ErrorKind::ParseError, "expected a number or an [re, im] pair");
}

Matrix matrix_from_json(const json& rows, Index expected_rows, Index expected_cols,
                        const char* name) {
  if (!rows.is_array()) throw Error(ErrorKind::ParseError, std::string(name) + ": not an array");
  if (static_cast<Index>(rows.size()) != expected_rows) {
    throw Error(ErrorKind::DimensionMismatch, std::string(name) + ": wrong row count");
  }
  Matrix a(expected_rows, expected_cols);
  for (Index i = 0; i < expected_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != expected_cols) {
      throw Error(ErrorKind::DimensionMismatch, std::string(name) + ": wrong column count");
    }
    for (Index j = 0; j < expected_cols; ++j) {
      a(i, j) = entry_from_json(row[static_cast<std::size_t>(j)]);
    }
  }
  return a;
}

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

Index read_dim(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key) || !doc[key].is_number_integer() ||
      doc[key].get<long>() < 0) {
    throw Error(ErrorKind::ParseError, std::string("missing or invalid '") + key + "'");
  }
  return doc[key].get<Index>();
}

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw Error(ErrorKind::ParseError, std::string("missing '") + key + "'");
  }
  return doc[key];
}

}  // namespace

std::string to_json(const FormTriple& f) {
  json doc;
  doc["dimV"] = f.dim_v();
  doc["dimH"] = f.dim_h();
  doc["dimHt"] = f.dim_ht();
  doc["M"] = matrix_to_json(f.m());
  doc["J"] = matrix_to_json(f.j());
  doc["Jt"] = matrix_to_json(f.jt());
  doc["tol"] = f.tol();
  return doc.dump();
}

FormTriple form_from_json(std::string_view text) {
  const json doc = parse(text);
  const Index nv = read_dim(doc, "dimV");
  const Index nh = read_dim(doc, "dimH");
  Matrix m = matrix_from_json(field(doc, "M"), nv, nv, "M");
  Matrix j = matrix_from_json(field(doc, "J"), nh, nv, "J");
  std::optional<Matrix> jt;
  if (doc.contains("Jt")) {
    const Index nht = read_dim(doc, "dimHt");
    jt = matrix_from_json(doc["Jt"], nht, nv, "Jt");
  }
  const double tol = doc.value("tol", kDefaultTol);
  return FormTriple(std::move(m), std::move(j), std::move(jt), tol);
}

std::string to_json(const LinearRelation& a) {
  json doc;
  doc["dimH"] = a.dim_h();
  doc["basis"] = matrix_to_json(a.basis());
  doc["tol"] = a.tol();
  return doc.dump();
}

LinearRelation relation_from_json(std::string_view text) {
  const json doc = parse(text);
  const Index nh = read_dim(doc, "dimH");
  const json& rows = field(doc, "basis");
  const Index cols =
      rows.is_array() && !rows.empty() ? static_cast<Index>(rows[0].size()) : 0;
  Matrix basis = matrix_from_json(rows, 2 * nh, cols, "basis");
  return LinearRelation(nh, std::move(basis), doc.value("tol", kDefaultTol));
}

}  // namespace relforms
