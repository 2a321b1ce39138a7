#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli.hpp"

namespace {

using namespace relforms;
using namespace relforms::cli;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> id;
  std::optional<std::string> mesh;
  std::optional<double> m;
  std::optional<std::string> coefficients;
  std::optional<int> n_max;
  std::optional<std::vector<double>> s;
  std::optional<std::vector<double>> t;
  std::optional<int> k;
  std::optional<int> refine;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

void print_error(std::string_view kind, const std::string& message,
                 std::optional<long> index = std::nullopt) {
  // Error::what() starts with "<kind>: "; the kind has its own field.
  std::string text = message;
  const std::string prefix = std::string(kind) + ": ";
  if (text.rfind(prefix, 0) == 0) text.erase(0, prefix.size());
  nlohmann::json j{{"error", {{"kind", kind}, {"message", text}}}};
  if (index) j["error"]["index"] = *index;
  std::cerr << j.dump() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "YAML experiment config");
  sub->add_option("--tol", f.tol, "Rank and comparison tolerance");
  sub->add_option("--seed", f.seed, "Seed for randomized steps");
  sub->add_option("--out", f.out, "Output directory (default: stdout)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_mesh(CLI::App* sub, Flags& f) {
  sub->add_option("--mesh", f.mesh, "square:N, disk:L or file:PATH");
  sub->add_option("--refine", f.refine, "Uniform refinements applied to the mesh");
}

ExperimentConfig build_config(Command command, const Flags& f) {
  std::optional<std::string> yaml;
  std::string id = f.id ? canonical_id(*f.id) : "";
  if (f.config) {
    yaml = read_file(*f.config);
    const ExperimentConfig peek = config_from_yaml(*yaml, ExperimentConfig{command});
    if (peek.command != command) {
      throw Error(ErrorKind::InvalidInput, "config command '" + std::string(to_string(peek.command)) +
                                               "' does not match subcommand '" +
                                               std::string(to_string(command)) + "'");
    }
    if (id.empty()) id = peek.id;
  }

  ExperimentConfig c;
  if (!id.empty() && id != "all") {
    c = preset(id);
    if (command != Command::Examples && c.command != command) {
      throw Error(ErrorKind::InvalidInput,
                  "preset '" + id + "' belongs to the " + std::string(to_string(c.command)) +
                      " command");
    }
  }
  c.command = command;
  c.id = id;
  c.tol = default_tolerance();
  if (yaml) c = config_from_yaml(*yaml, c);

  if (f.mesh) c.mesh = MeshSpec::parse(*f.mesh);
  if (f.m) c.m = *f.m;
  if (f.coefficients) c.coefficients = *f.coefficients;
  if (f.n_max) c.n_max = *f.n_max;
  if (f.s) c.s_values = *f.s;
  if (f.t) c.t_values = *f.t;
  if (f.k) c.k = *f.k;
  if (f.refine) c.refine = *f.refine;
  if (f.tol) c.tol = *f.tol;
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out = *f.out;
  if (f.format) c.format = format_from_string(*f.format);
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relations from forms: examples, DtN problems and convergence sweeps", "relforms"};
  app.require_subcommand(1);
  Flags f;

  auto* examples = app.add_subcommand("examples", "Run a self-verifying preset, or 'all'");
  examples->add_option("--id", f.id, "Preset id");

  auto* dtn_eigs = app.add_subcommand("dtn-eigs", "Steklov and Dirichlet eigenvalues");
  add_mesh(dtn_eigs, f);
  dtn_eigs->add_option("--m", f.m, "Constant potential");
  dtn_eigs->add_option("--coefficients", f.coefficients, "Coefficient JSON file");
  dtn_eigs->add_option("--k", f.k, "Number of eigenvalues");

  auto* dtn_res = app.add_subcommand("dtn-resolvent", "DtN resolvent norms along two paths");
  add_mesh(dtn_res, f);
  dtn_res->add_option("--m", f.m, "Constant potential");
  dtn_res->add_option("--coefficients", f.coefficients, "Coefficient JSON file");
  dtn_res->add_option("--s", f.s, "Imaginary shifts")->delimiter(',');

  auto* converge = app.add_subcommand("converge", "Convergence sweep over a form sequence");
  converge->add_option("--preset,--id", f.id, "Preset id");
  add_mesh(converge, f);
  converge->add_option("--m", f.m, "Limit potential; members use m + 1/n");
  converge->add_option("--coefficients", f.coefficients, "Coefficient JSON file");
  converge->add_option("--n-max", f.n_max, "Sequence length");
  converge->add_option("--s", f.s, "Imaginary shifts")->delimiter(',');

  auto* semigroup = app.add_subcommand("semigroup", "Semigroup convergence experiment");
  semigroup->add_option("--preset,--id", f.id, "Preset id");
  add_mesh(semigroup, f);
  semigroup->add_option("--m", f.m, "Limit potential; members use m + 1/n");
  semigroup->add_option("--n-max", f.n_max, "Sequence length");
  semigroup->add_option("--t", f.t, "Times")->delimiter(',');

  auto* mesh = app.add_subcommand("mesh", "Generate, refine and write a mesh");
  add_mesh(mesh, f);

  for (auto* sub : {examples, dtn_eigs, dtn_res, converge, semigroup, mesh}) add_common(sub, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("InvalidInput", e.what());
    return 1;
  }

  try {
    const Command command = command_from_string(app.get_subcommands().front()->get_name());
    const ExperimentConfig config = build_config(command, f);
    const Report report = run(config);
    emit(report, config);
    if (!report.passed()) {
      nlohmann::json failed = nlohmann::json::array();
      for (const auto& a : report.assertions) {
        if (!a.passed) failed.push_back({{"name", a.name}, {"detail", a.detail}});
      }
      std::cerr << nlohmann::json{{"assertion_failures", failed}}.dump() << '\n';
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    print_error(to_string(e.kind()), e.what(), e.index());
    return 1;
  } catch (const std::exception& e) {
    print_error("InternalInvariantViolation", e.what());
    return 1;
  }
}
