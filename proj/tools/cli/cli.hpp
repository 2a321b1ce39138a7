#pragma once

// Batch experiment runner behind the relforms executable.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "relforms/convergence.hpp"
#include "relforms/numkernel.hpp"

namespace relforms::cli {

enum class Command { Examples, DtnEigs, DtnResolvent, Converge, Semigroup, Mesh };
enum class Format { Csv, Json };

std::string_view to_string(Command c);
Command command_from_string(std::string_view s);
Format format_from_string(std::string_view s);

/// "square:N", "disk:L" or "file:PATH".
struct MeshSpec {
  std::string kind = "square";
  long param = 8;
  std::string path;

  static MeshSpec parse(std::string_view text);
  std::string str() const;
};

struct ExperimentConfig {
  Command command = Command::Examples;
  std::string id;              // preset id; empty for custom runs
  MeshSpec mesh;
  double m = 0.0;              // constant potential (limit potential for sequences)
  std::string coefficients;    // optional coefficient JSON file
  int n_max = 20;
  std::vector<double> s_values{1.0};
  std::vector<double> t_values{0.1, 1.0};
  int k = 5;
  int refine = 0;
  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  std::string out;
  Format format = Format::Csv;

  /// Throws InvalidInput for missing or out-of-range fields.
  void validate() const;
};

/// Strips an optional "example-" or "theorem-" prefix.
std::string canonical_id(std::string_view id);

/// Known preset ids in battery order.
const std::vector<std::string>& preset_ids();

/// Throws InvalidInput for unknown ids.
ExperimentConfig preset(std::string_view id);

/// YAML document; every key must be known. Values not present keep `base`.
ExperimentConfig config_from_yaml(std::string_view text, ExperimentConfig base = {});

/// RELFORMS_TOL when set and valid, else kDefaultTol.
double default_tolerance();

enum class ColumnType { Real, Integer, Text, Complex, Bool };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
};

using Cell = std::variant<double, long, std::string, Complex, bool>;

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  /// Checks the cell types against the columns.
  void add_row(std::vector<Cell> row);
};

/// A named text file produced by a run, e.g. a written mesh.
struct Artifact {
  std::string file_name;
  std::string content;
};

struct Report {
  std::vector<Table> tables;
  std::vector<Assertion> assertions;
  std::vector<Artifact> artifacts;

  bool passed() const;
};

std::string to_csv(const Table& t);
std::string to_json(const Report& r);
Report report_from_json(std::string_view text);

/// Runs one experiment. Input errors propagate as relforms::Error.
Report run(const ExperimentConfig& config);

/// Writes the report to config.out (a directory) or stdout. Throws IoError.
void emit(const Report& report, const ExperimentConfig& config);

}  // namespace relforms::cli
