#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include <yaml-cpp/yaml.h>

#include "cli.hpp"

namespace relforms::cli {

namespace {

struct CommandName {
  Command command;
  std::string_view name;
};

constexpr CommandName kCommands[] = {
    {Command::Examples, "examples"},   {Command::DtnEigs, "dtn-eigs"},
    {Command::DtnResolvent, "dtn-resolvent"}, {Command::Converge, "converge"},
    {Command::Semigroup, "semigroup"}, {Command::Mesh, "mesh"},
};

long parse_long(std::string_view text, std::string_view what) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::InvalidInput,
                std::string(what) + ": expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

ExperimentConfig make(Command command, std::string id) {
  ExperimentConfig c;
  c.command = command;
  c.id = std::move(id);
  return c;
}

[[noreturn]] void yaml_error(const YAML::Mark& mark, const std::string& message) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(mark.line + 1) + ": " + message,
              mark.line + 1);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) yaml_error(node.Mark(), key + ": expected a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    yaml_error(node.Mark(), key + ": invalid value '" + node.Scalar() + "'");
  }
}

std::vector<double> number_list(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return {scalar<double>(node, key)};
  if (!node.IsSequence()) yaml_error(node.Mark(), key + ": expected a number or a list");
  std::vector<double> out;
  for (const auto& item : node) out.push_back(scalar<double>(item, key));
  return out;
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& entry : kCommands) {
    if (entry.command == c) return entry.name;
  }
  return "unknown";
}

Command command_from_string(std::string_view s) {
  for (const auto& entry : kCommands) {
    if (entry.name == s) return entry.command;
  }
  throw Error(ErrorKind::InvalidInput, "unknown command '" + std::string(s) + "'");
}

MeshSpec MeshSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::InvalidInput,
                "mesh spec must be square:N, disk:L or file:PATH, got '" + std::string(text) + "'");
  }
  MeshSpec spec;
  spec.kind = std::string(text.substr(0, colon));
  const std::string_view arg = text.substr(colon + 1);
  if (spec.kind == "file") {
    if (arg.empty()) throw Error(ErrorKind::InvalidInput, "mesh file path is empty");
    spec.param = 0;
    spec.path = std::string(arg);
  } else if (spec.kind == "square" || spec.kind == "disk") {
    spec.param = parse_long(arg, "mesh " + spec.kind);
    if (spec.param < (spec.kind == "square" ? 1 : 0)) {
      throw Error(ErrorKind::InvalidInput, "mesh parameter out of range: " + std::string(text));
    }
  } else {
    throw Error(ErrorKind::InvalidInput, "unknown mesh generator '" + spec.kind + "'");
  }
  return spec;
}

std::string MeshSpec::str() const {
  return kind == "file" ? "file:" + path : kind + ":" + std::to_string(param);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidInput, m); };
  if (!(tol > 0.0) || !std::isfinite(tol)) fail("tol must be positive");
  if (n_max < 1) fail("n_max must be at least 1");
  if (k < 1) fail("k must be at least 1");
  if (refine < 0) fail("refine must be nonnegative");
  if (!std::isfinite(m)) fail("m must be finite");
  if (s_values.empty()) fail("s must not be empty");
  for (double s : s_values) {
    if (s == 0.0 || !std::isfinite(s)) fail("s values must be finite and nonzero");
  }
  for (double t : t_values) {
    if (t < 0.0 || !std::isfinite(t)) fail("t values must be finite and nonnegative");
  }
  if ((command == Command::Semigroup) && t_values.empty()) fail("semigroup needs t values");
  if (command == Command::Examples && id.empty()) fail("examples needs an id");
}

std::string canonical_id(std::string_view id) {
  for (std::string_view prefix : {"example-", "theorem-"}) {
    if (id.substr(0, prefix.size()) == prefix) return std::string(id.substr(prefix.size()));
  }
  return std::string(id);
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"identity", "5.2", "5.4", "5.13", "5.14",
                                            "5.15",     "6.1", "7.3", "7.4",  "7.5",
                                            "7.7",      "8.2", "8.3", "8.4"};
  return ids;
}

ExperimentConfig preset(std::string_view raw_id) {
  const std::string id = canonical_id(raw_id);
  if (id == "all") return make(Command::Examples, "all");
  if (id == "identity" || id == "8.2" || id == "8.3") return make(Command::Examples, id);
  if (id == "8.4") {
    auto c = make(Command::Examples, id);
    c.mesh = MeshSpec::parse("square:4");
    return c;
  }
  if (id == "5.2" || id == "5.4" || id == "5.13" || id == "5.14" || id == "5.15") {
    auto c = make(Command::Converge, id);
    c.n_max = 10;
    if (id == "5.2") c.s_values = {0.5, 1.0, 2.0};
    return c;
  }
  if (id == "6.1") {
    auto c = make(Command::Semigroup, id);
    c.n_max = 10;
    c.t_values = {1.0};
    return c;
  }
  if (id == "7.3" || id == "7.4" || id == "7.7") {
    auto c = make(Command::Converge, id);
    c.mesh = MeshSpec::parse("square:8");
    c.n_max = 20;
    if (id == "7.3") c.m = 1.0;
    return c;
  }
  if (id == "7.5") {
    auto c = make(Command::Semigroup, id);
    c.mesh = MeshSpec::parse("square:8");
    c.n_max = 20;
    c.t_values = {0.1, 1.0};
    return c;
  }
  throw Error(ErrorKind::InvalidInput, "unknown preset '" + std::string(raw_id) + "'");
}

ExperimentConfig config_from_yaml(std::string_view text, ExperimentConfig base) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    yaml_error(e.mark, e.msg);
  }
  if (root.IsNull()) return base;
  if (!root.IsMap()) yaml_error(root.Mark(), "config must be a mapping");
  ExperimentConfig c = std::move(base);
  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    const YAML::Node& v = entry.second;
    try {
      if (key == "command") {
        c.command = command_from_string(scalar<std::string>(v, key));
      } else if (key == "id") {
        c.id = canonical_id(scalar<std::string>(v, key));
      } else if (key == "mesh") {
        c.mesh = MeshSpec::parse(scalar<std::string>(v, key));
      } else if (key == "m") {
        c.m = scalar<double>(v, key);
      } else if (key == "coefficients") {
        c.coefficients = scalar<std::string>(v, key);
      } else if (key == "n_max") {
        c.n_max = scalar<int>(v, key);
      } else if (key == "s") {
        c.s_values = number_list(v, key);
      } else if (key == "t") {
        c.t_values = number_list(v, key);
      } else if (key == "k") {
        c.k = scalar<int>(v, key);
      } else if (key == "refine") {
        c.refine = scalar<int>(v, key);
      } else if (key == "tol") {
        c.tol = scalar<double>(v, key);
      } else if (key == "seed") {
        c.seed = scalar<std::uint64_t>(v, key);
      } else if (key == "out") {
        c.out = scalar<std::string>(v, key);
      } else if (key == "format") {
        c.format = format_from_string(scalar<std::string>(v, key));
      } else {
        yaml_error(entry.first.Mark(), "unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError) throw;
      yaml_error(v.Mark(), e.what());
    }
  }
  return c;
}

double default_tolerance() {
  const char* env = std::getenv("RELFORMS_TOL");
  if (env == nullptr || *env == '\0') return kDefaultTol;
  char* end = nullptr;
  errno = 0;
  const double tol = std::strtod(env, &end);
  if (errno != 0 || *end != '\0' || !(tol > 0.0) || !std::isfinite(tol)) {
    throw Error(ErrorKind::InvalidInput,
                "RELFORMS_TOL must be a positive number, got '" + std::string(env) + "'");
  }
  return tol;
}

Format format_from_string(std::string_view s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw Error(ErrorKind::InvalidInput, "unknown format '" + std::string(s) + "'");
}

}  // namespace relforms::cli
