#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "cli.hpp"

namespace relforms::cli {

namespace {

using nlohmann::json;

constexpr std::pair<ColumnType, std::string_view> kTypeNames[] = {
    {ColumnType::Real, "real"},       {ColumnType::Integer, "integer"},
    {ColumnType::Text, "text"},       {ColumnType::Complex, "complex"},
    {ColumnType::Bool, "bool"},
};

std::string_view type_name(ColumnType t) {
  for (const auto& [type, name] : kTypeNames) {
    if (type == t) return name;
  }
  return "real";
}

ColumnType type_from_name(std::string_view s) {
  for (const auto& [type, name] : kTypeNames) {
    if (name == s) return type;
  }
  throw Error(ErrorKind::ParseError, "unknown column type '" + std::string(s) + "'");
}

bool matches(ColumnType t, const Cell& c) {
  switch (t) {
    case ColumnType::Real: return std::holds_alternative<double>(c);
    case ColumnType::Integer: return std::holds_alternative<long>(c);
    case ColumnType::Text: return std::holds_alternative<std::string>(c);
    case ColumnType::Complex: return std::holds_alternative<Complex>(c);
    case ColumnType::Bool: return std::holds_alternative<bool>(c);
  }
  return false;
}

std::string real_text(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

json real_json(double x) {
  if (std::isfinite(x)) return x;
  return real_text(x);
}

double real_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
  }
  throw Error(ErrorKind::ParseError, "expected a real value, got " + j.dump());
}

json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return real_json(v);
        } else if constexpr (std::is_same_v<T, Complex>) {
          return json::array({real_json(v.real()), real_json(v.imag())});
        } else {
          return v;
        }
      },
      c);
}

Cell cell_from_json(ColumnType t, const json& j) {
  switch (t) {
    case ColumnType::Real: return real_from_json(j);
    case ColumnType::Integer:
      if (!j.is_number_integer()) break;
      return j.get<long>();
    case ColumnType::Text:
      if (!j.is_string()) break;
      return j.get<std::string>();
    case ColumnType::Complex:
      if (!j.is_array() || j.size() != 2) break;
      return Complex(real_from_json(j[0]), real_from_json(j[1]));
    case ColumnType::Bool:
      if (!j.is_boolean()) break;
      return j.get<bool>();
  }
  throw Error(ErrorKind::ParseError, "cell " + j.dump() + " does not match its column type");
}

Table assertion_table(const std::vector<Assertion>& assertions) {
  Table t{"assertions",
          {{"name", ColumnType::Text}, {"passed", ColumnType::Bool}, {"detail", ColumnType::Text}},
          {}};
  for (const auto& a : assertions) t.add_row({a.name, a.passed, a.detail});
  return t;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorKind::DimensionMismatch, "table " + name + ": row has " +
                                                  std::to_string(row.size()) + " cells, expected " +
                                                  std::to_string(columns.size()));
  }
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (!matches(columns[k].type, row[k])) {
      throw Error(ErrorKind::InvalidInput,
                  "table " + name + ": cell type mismatch in column " + columns[k].name);
    }
  }
  rows.push_back(std::move(row));
}

bool Report::passed() const {
  for (const auto& a : assertions) {
    if (!a.passed) return false;
  }
  return true;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    if (k > 0) out += ',';
    const auto& c = t.columns[k];
    out += c.type == ColumnType::Complex ? csv_quote(c.name + "_re") + "," + csv_quote(c.name + "_im")
                                         : csv_quote(c.name);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k > 0) out += ',';
      std::visit(
          [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              out += real_text(v);
            } else if constexpr (std::is_same_v<T, long>) {
              out += std::to_string(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
              out += csv_quote(v);
            } else if constexpr (std::is_same_v<T, Complex>) {
              out += real_text(v.real()) + "," + real_text(v.imag());
            } else {
              out += v ? "true" : "false";
            }
          },
          row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Report& r) {
  json tables = json::array();
  for (const auto& t : r.tables) {
    json cols = json::array();
    for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"type", type_name(c.type)}});
    json rows = json::array();
    for (const auto& row : t.rows) {
      json jr = json::array();
      for (const auto& cell : row) jr.push_back(cell_json(cell));
      rows.push_back(std::move(jr));
    }
    tables.push_back({{"name", t.name}, {"columns", std::move(cols)}, {"rows", std::move(rows)}});
  }
  json assertions = json::array();
  for (const auto& a : r.assertions) {
    assertions.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  return json{{"tables", std::move(tables)}, {"assertions", std::move(assertions)}}.dump(2);
}

Report report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    Report r;
    for (const auto& jt : j.at("tables")) {
      Table t;
      t.name = jt.at("name").get<std::string>();
      for (const auto& jc : jt.at("columns")) {
        t.columns.push_back(
            {jc.at("name").get<std::string>(), type_from_name(jc.at("type").get<std::string>())});
      }
      for (const auto& jr : jt.at("rows")) {
        if (!jr.is_array() || jr.size() != t.columns.size()) {
          throw Error(ErrorKind::ParseError, "table " + t.name + ": malformed row");
        }
        std::vector<Cell> row;
        for (std::size_t k = 0; k < jr.size(); ++k) {
          row.push_back(cell_from_json(t.columns[k].type, jr[k]));
        }
        t.add_row(std::move(row));
      }
      r.tables.push_back(std::move(t));
    }
    for (const auto& ja : j.at("assertions")) {
      r.assertions.push_back({ja.at("name").get<std::string>(), ja.at("passed").get<bool>(),
                              ja.at("detail").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("report JSON: ") + e.what());
  }
}

void emit(const Report& report, const ExperimentConfig& config) {
  namespace fs = std::filesystem;
  std::vector<Table> tables = report.tables;
  if (config.format == Format::Csv) tables.push_back(assertion_table(report.assertions));

  if (config.out.empty()) {
    if (config.format == Format::Json) {
      std::cout << to_json(report) << '\n';
    } else {
      for (std::size_t k = 0; k < tables.size(); ++k) {
        if (k > 0) std::cout << '\n';
        std::cout << "# " << tables[k].name << '\n' << to_csv(tables[k]);
      }
    }
    for (const auto& a : report.artifacts) std::cout << "\n# " << a.file_name << '\n' << a.content;
    std::cout.flush();
    if (!std::cout) throw Error(ErrorKind::IoError, "cannot write to stdout");
    return;
  }

  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string());
  }
  if (config.format == Format::Json) {
    write_file(dir / "report.json", to_json(report) + "\n");
  } else {
    for (const auto& t : tables) write_file(dir / (t.name + ".csv"), to_csv(t));
  }
  for (const auto& a : report.artifacts) write_file(dir / a.file_name, a.content);
}

}  // namespace relforms::cli
