// Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails. `--only N` selects criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "relforms/convergence.hpp"
#include "relforms/fem2d.hpp"
#include "relforms/limits.hpp"
#include "relforms/relation.hpp"
#include "support/fixtures.hpp"
#include "support/random.hpp"

namespace {

using namespace relforms;
using namespace relforms::testing;

constexpr Complex kI(0.0, 1.0);

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects sub-checks; the first failures are kept for the report line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_ < 3) detail_ += (detail_.empty() ? "" : "; ") + what;
    ++failures_;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }

  Outcome outcome() const {
    if (failures_ == 0) return {true, notes_};
    return {false, std::to_string(failures_) + " failed: " + detail_ +
                       (notes_.empty() ? "" : " | " + notes_)};
  }

 private:
  int failures_ = 0;
  std::string detail_;
  std::string notes_;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

SubspaceBasis line(double x, double y) {
  Vector v(2);
  v << x, y;
  return SubspaceBasis(v / v.norm(), kDefaultTol);
}

double resolvent_error(const LinearRelation& a, const LinearRelation& b, double s) {
  return spectral_norm(resolvent(a, -kI * s) - resolvent(b, -kI * s));
}

std::vector<double> errors_at(const ConvergenceReport& r, std::size_t k) {
  std::vector<double> e;
  for (const auto& rec : r.records) e.push_back(rec.resolvent_errors[k]);
  return e;
}

// 1. Zero-limit family: exact graphs and resolvent distance 1/|s|.
Outcome zero_limit_exactness() {
  Checks c;
  const LinearRelation limit = from_form(limit_zero_form());
  const double g0 = gap_hat(limit.as_subspace(), line(1, 0));
  c.expect(g0 <= 1e-12, "limit gap " + sci(g0));
  double worst_gap = 0.0;
  double worst_res = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const LinearRelation a = from_form(scaled_antidiag(n));
    worst_gap = std::max(worst_gap, gap_hat(a.as_subspace(), line(0, 1)));
    for (double s : {0.5, 1.0, 2.0}) {
      worst_res = std::max(worst_res, std::abs(resolvent_error(a, limit, s) - 1.0 / s));
    }
  }
  c.expect(worst_gap <= 1e-12, "member gap " + sci(worst_gap));
  c.expect(worst_res <= 1e-12, "resolvent deviation " + sci(worst_res));
  c.note("max gap " + sci(std::max(g0, worst_gap)) + ", max |err - 1/|s|| " + sci(worst_res));
  return c.outcome();
}

// 2. Tilted family: scalar graphs with bound -n.
Outcome tilted_family() {
  Checks c;
  const LinearRelation limit = from_form(triple2(antidiag()));
  double worst_gap = 0.0, worst_lb = 0.0, worst_res = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const LinearRelation a = from_form(tilted_plus(n));
    worst_gap = std::max(worst_gap, gap_hat(a.as_subspace(), line(1, -n)));
    worst_lb = std::max(worst_lb, std::abs(lower_bound(a) + n));
    worst_res = std::max(worst_res,
                         std::abs(resolvent_error(a, limit, 1.0) - 1.0 / std::sqrt(n * n + 1.0)));
  }
  c.expect(worst_gap <= 1e-12, "basis angle " + sci(worst_gap));
  c.expect(worst_lb <= 1e-12, "lower bound deviation " + sci(worst_lb));
  c.expect(worst_res <= 1e-12, "resolvent deviation " + sci(worst_res));
  const auto lb = uniform_lower_bound(family_sequence(Family::TiltedPlus, 10));
  c.expect(!lb.uniform, "reported uniform");
  c.note("max angle " + sci(worst_gap) + ", max |lb + n| " + sci(worst_lb) + ", max resolvent dev " +
         sci(worst_res));
  return c.outcome();
}

// 3. Independence of the hypotheses.
Outcome independence() {
  Checks c;
  auto converges = [](Family f) {
    const auto r = resolvent_convergence(family_sequence(f, 20));
    return tends_to_zero(errors_at(r, 0));
  };
  auto uniform = [](Family f) { return uniform_lower_bound(family_sequence(f, 20)).uniform; };

  c.expect(uniform(Family::ZeroLimit), "zero-limit family not uniform");
  c.expect(!converges(Family::ZeroLimit), "zero-limit family resolvents converge");
  c.expect(!uniform(Family::TiltedPlus), "tilted family uniform");
  c.expect(converges(Family::TiltedPlus), "tilted family resolvents do not converge");

  const auto drop = dim_track(family_sequence(Family::DiagDrop, 20));
  bool w_drop = drop.limit.dim_w == 1;
  for (const auto& rec : drop.records) w_drop = w_drop && rec.dim_w == 0;
  c.expect(w_drop, "diagonal family has no dim W drop");
  c.expect(converges(Family::DiagDrop), "diagonal family resolvents do not converge");

  const auto minus = dim_track(family_sequence(Family::TiltedMinus, 20));
  bool v_drop = minus.limit.dim_vcap == 1;
  for (const auto& rec : minus.records) v_drop = v_drop && rec.dim_vcap == 0;
  c.expect(v_drop, "negative tilt has no dim V drop");
  const auto lb = uniform_lower_bound(family_sequence(Family::TiltedMinus, 20));
  c.expect(lb.uniform && std::abs(lb.bound - 1.0) <= 1e-12, "negative tilt bound " + sci(lb.bound));
  c.note("outcomes (uniform, converges): zero-limit (T,F), tilted (F,T); drops recorded");
  return c.outcome();
}

// 4. Random symmetric triples.
Outcome symmetric_suite() {
  Checks c;
  Rng rng(20240401);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const FormTriple f = random_symmetric_triple(rng, 12);
    const LinearRelation a = from_form(f);
    const std::string tag = "trial " + std::to_string(trial);
    c.expect(selfadjoint_check(a), tag + " not selfadjoint");
    for (double s : {0.5, 1.0, 2.0, -1.0}) {
      const Matrix r = resolvent(a, -kI * s);
      const double bound = spectral_norm(r) - 1.0 / std::abs(s);
      const double adj = spectral_norm(r.adjoint() - resolvent(a, kI * s));
      const double dual = spectral_norm(resolvent_via_form(f, s) - r);
      const double ker = gap_hat(svd_rank(r, 1e-10).nullspace, mul_part(a));
      worst = std::max({worst, adj, dual});
      c.expect(bound <= 1e-10, tag + " resolvent norm excess " + sci(bound));
      c.expect(adj <= 1e-10, tag + " adjoint identity " + sci(adj));
      c.expect(dual <= 1e-10, tag + " dual path " + sci(dual));
      c.expect(ker <= 1e-10, tag + " kernel identity " + sci(ker));
    }
    const double restrict_gap =
        gap_hat(a.as_subspace(), from_form(restrict(f, orth_complement(w_space(f)))).as_subspace());
    c.expect(restrict_gap <= 1e-10, tag + " restriction gap " + sci(restrict_gap));
    const double lb = lower_bound(a);
    // +inf only for a purely multivalued graph (empty single-valued part).
    c.expect(!std::isnan(lb) && lb > -std::numeric_limits<double>::infinity() &&
                 (std::isfinite(lb) || mul_part(a).dim() == a.dim_h()),
             tag + " lower bound " + sci(lb));
  }
  c.note("200 triples, worst adjoint/dual deviation " + sci(worst));
  return c.outcome();
}

// 5. Random accretive triples and the non-accretive full graph.
Outcome accretive_suite() {
  Checks c;
  Rng rng(20240402);
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = accretivity_check(from_form(random_accretive_triple(rng, 12)));
    c.expect(r.accretive && r.m_accretive, "trial " + std::to_string(trial));
  }
  const LinearRelation full = from_form(triple2(mat2(0, 1, 0, 0)));
  c.expect(full.dim() == 2 * full.dim_h(), "graph is not full");
  c.expect(!accretivity_check(full).accretive, "full graph reported accretive");
  c.note("200 triples m-accretive, full graph dim " + std::to_string(full.dim()));
  return c.outcome();
}

// 6. Euler approximations and the tilted blow-up.
Outcome semigroup_checks() {
  Checks c;
  Rng rng(20240403);
  double lo = 10.0, hi = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    // Redraw purely multivalued graphs: their semigroup and Euler steps are both 0.
    std::optional<LinearRelation> drawn;
    while (!drawn || mul_part(*drawn).dim() == drawn->dim_h()) {
      const Index dv = uniform_index(rng, 2, 8);
      const Index dh = uniform_index(rng, 1, 8);
      const Matrix b = random_matrix(rng, dv, dv);
      const Matrix m = b * b.adjoint() / static_cast<double>(dv) + 0.1 * Matrix::Identity(dv, dv);
      drawn = from_form(FormTriple(m, random_trace_map(rng, dh, dv)));
    }
    const LinearRelation& a = *drawn;
    const Matrix exact = semigroup(a, 1.0);
    double e[3];
    for (int k = 0; k < 3; ++k) {
      e[k] = spectral_norm(euler_semigroup(a, 1.0, 1000L << k) - exact);
    }
    for (double ratio : {e[0] / e[1], e[1] / e[2]}) {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      c.expect(std::abs(ratio - 2.0) <= 0.05,
               "trial " + std::to_string(trial) + " ratio " + sci(ratio));
    }
  }
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double expected = std::exp(static_cast<double>(n));
    const double rel = std::abs(spectral_norm(semigroup(from_form(tilted_plus(n)), 1.0)) - expected) /
                       expected;
    worst = std::max(worst, rel);
  }
  c.expect(worst <= 1e-9, "blow-up relative error " + sci(worst));
  c.note("halving ratios in [" + sci(lo) + ", " + sci(hi) + "], blow-up rel err " + sci(worst));
  return c.outcome();
}

fem::AssembledSystem unit_system(const fem::Mesh& mesh, double c = 0.0) {
  return fem::assemble(mesh, fem::CoefficientField::identity(mesh.num_triangles(), c));
}

// 7. FEM spectra.
Outcome fem_spectra() {
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  const double lambda1 = fem::dirichlet_eigs(unit_system(fem::mesh_unit_square(32)), 1).front();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double target = 2.0 * std::numbers::pi * std::numbers::pi;
  const double rel = std::abs(lambda1 - target) / target;
  c.expect(rel <= 0.01, "Dirichlet relative error " + sci(rel));
  c.expect(secs < 10.0, "Dirichlet runtime " + sci(secs) + " s");

  const auto disk = unit_system(fem::mesh_disk(4));
  const auto st = fem::steklov_eigs(disk, 5);
  const double expected[] = {0, 1, 1, 2, 2};
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double dev = std::abs(st[k] - expected[k]) / std::max(1.0, expected[k]);
    worst = std::max(worst, dev);
  }
  c.expect(worst <= 0.02, "Steklov deviation " + sci(worst));
  const double lb = lower_bound(fem::dtn_graph(disk));
  c.expect(std::abs(lb) <= 1e-8, "constant mode bound " + sci(lb));
  c.note("lambda1 " + sci(lambda1) + " (" + sci(100 * rel) + "%, " + sci(secs) +
         " s), Steklov max dev " + sci(worst) + ", lb " + sci(lb));
  return c.outcome();
}

// 8. Onset of the multivalued part at the ground state.
Outcome multivalued_onset() {
  Checks c;
  const fem::Mesh mesh = fem::mesh_unit_square(16);
  const double lambda1 = fem::dirichlet_eigs(unit_system(mesh), 1).front();
  std::string dims;
  for (double factor : {0.9, 1.0, 1.1}) {
    const Index d = mul_part(fem::dtn_graph(unit_system(mesh, -factor * lambda1))).dim();
    dims += (dims.empty() ? "" : "/") + std::to_string(d);
    c.expect(d == (factor == 1.0 ? 1 : 0), "factor " + sci(factor) + " dim " + std::to_string(d));
  }
  c.note("dims at 0.9/1/1.1 lambda1: " + dims);
  return c.outcome();
}

// 9. Resolvent convergence for m_n = 1 + 1/n.
Outcome potential_sequence() {
  Checks c;
  const fem::Mesh mesh = fem::mesh_unit_square(16);
  const Index nt = mesh.num_triangles();
  std::vector<fem::CoefficientField> fields;
  for (int n = 1; n <= 50; ++n) fields.push_back(fem::CoefficientField::identity(nt, 1.0 + 1.0 / n));
  const auto seq = fem::coefficient_sequence(mesh, fields, fem::CoefficientField::identity(nt, 1.0),
                                             {1.0});
  const auto e = errors_at(resolvent_convergence(seq), 0);
  bool monotone = true;
  for (std::size_t k = 3; k < e.size(); ++k) monotone = monotone && e[k] <= e[k - 1];
  c.expect(monotone, "not monotone after n=3");
  c.expect(e.back() <= 1e-6, "error at n=50 is " + sci(e.back()) + " > 1e-6");
  c.note("errors n=1 " + sci(e.front()) + ", n=10 " + sci(e[9]) + ", n=50 " + sci(e.back()));
  return c.outcome();
}

// 10. Lower bounds diverge as the potential approaches the ground state.
Outcome ground_state_divergence() {
  Checks c;
  const fem::Mesh mesh = fem::mesh_unit_square(16);
  const Index nt = mesh.num_triangles();
  const double lambda1 = fem::dirichlet_eigs(unit_system(mesh), 1).front();
  std::vector<fem::CoefficientField> fields;
  for (int k = 1; k <= 4; ++k) {
    fields.push_back(fem::CoefficientField::identity(nt, -lambda1 * (1.0 - std::pow(10.0, -k))));
  }
  const auto seq = fem::coefficient_sequence(mesh, fields,
                                             fem::CoefficientField::identity(nt, -lambda1), {1.0});
  const auto lb = uniform_lower_bound(seq);
  std::string values;
  for (std::size_t k = 0; k < lb.bounds.size(); ++k) {
    values += (k ? ", " : "") + sci(lb.bounds[k]);
    if (k > 0) c.expect(lb.bounds[k] < lb.bounds[k - 1], "bounds not decreasing");
  }
  c.expect(lb.bounds.back() < -1e3, "final bound " + sci(lb.bounds.back()));
  c.expect(!lb.uniform, "reported uniform");
  c.note("bounds " + values);
  return c.outcome();
}

// 11. The four gap conditions agree on every fixture sequence.
Outcome gap_lemma() {
  Checks c;
  std::vector<std::pair<std::string, FormSequence>> seqs;
  for (auto [name, f] : {std::pair{"zero-limit", Family::ZeroLimit}, {"tilted", Family::TiltedPlus},
                         {"diagonal", Family::DiagDrop}, {"negative tilt", Family::TiltedMinus}}) {
    seqs.emplace_back(name, family_sequence(f, 20));
  }
  seqs.emplace_back("constant", constant_sequence(tilted_plus(1), 10));
  int count = 0;
  for (const auto& [name, seq] : seqs) {
    for (SubspaceChoice w : {SubspaceChoice::W, SubspaceChoice::VcapKer}) {
      const auto g = gap_equivalence_report(seq, w);
      c.expect(g.agree(), name + (w == SubspaceChoice::W ? " W" : " VcapKer"));
      c.expect(g.forward_gap_to_zero, name + " forward gap");
      ++count;
    }
  }
  c.note(std::to_string(count) + " sequence/subspace pairs agree");
  return c.outcome();
}

// 12. Byte-identical battery output.
Outcome determinism() {
  Checks c;
  auto battery_csv = [] {
    cli::ExperimentConfig config;
    config.id = "all";
    const cli::Report r = cli::run(config);
    std::string out;
    for (const auto& t : r.tables) out += cli::to_csv(t);
    for (const auto& a : r.assertions) out += a.name + (a.passed ? ",1," : ",0,") + a.detail + "\n";
    return std::pair{out, r.passed()};
  };
  const auto [first, ok1] = battery_csv();
  const auto [second, ok2] = battery_csv();
  c.expect(first == second, "outputs differ");
  c.expect(ok1 && ok2, "a preset failed its fixture expectations");
  c.note(std::to_string(first.size()) + " bytes identical");
  return c.outcome();
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "zero-limit family exactness", zero_limit_exactness},
      {2, "tilted family graphs, bounds and resolvents", tilted_family},
      {3, "independence of hypotheses", independence},
      {4, "random symmetric property suite", symmetric_suite},
      {5, "random accretive suite", accretive_suite},
      {6, "Euler order and blow-up", semigroup_checks},
      {7, "FEM spectral accuracy", fem_spectra},
      {8, "multivalued onset at the ground state", multivalued_onset},
      {9, "resolvent convergence for m + 1/n", potential_sequence},
      {10, "lower bounds diverge near the ground state", ground_state_divergence},
      {11, "gap conditions agree", gap_lemma},
      {12, "deterministic preset battery", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (const auto& cr : criteria) {
    if (!selected.empty() && !selected.count(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d: %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name,
                secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
