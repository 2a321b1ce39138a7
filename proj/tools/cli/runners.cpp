#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "relforms/fem2d.hpp"
#include "relforms/limits.hpp"
#include "relforms/relation.hpp"

namespace relforms::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of value-versus-expected checks; each check name becomes one assertion.
class Expectations {
 public:
  void eq(const std::string& check, double n, double value, double expected, double tol) {
    add(check, n, value, expected, "==", tol, std::abs(value - expected) <= tol);
  }
  void le(const std::string& check, double n, double value, double bound, double tol = 0.0) {
    add(check, n, value, bound, "<=", tol, value <= bound + tol);
  }
  void ge(const std::string& check, double n, double value, double bound, double tol = 0.0) {
    add(check, n, value, bound, ">=", tol, value >= bound - tol);
  }
  void flag(const std::string& check, double n, bool value, bool expected) {
    eq(check, n, value ? 1.0 : 0.0, expected ? 1.0 : 0.0, 0.0);
  }

  void finish(Report& report) {
    if (table_.rows.empty()) return;
    for (const auto& [check, counts] : counts_) {
      report.assertions.push_back({"fixture:" + check, counts.first == counts.second,
                                   std::to_string(counts.first) + "/" +
                                       std::to_string(counts.second) + " rows match"});
    }
    report.tables.push_back(std::move(table_));
  }

 private:
  void add(const std::string& check, double n, double value, double expected, const char* rel,
           double tol, bool pass) {
    table_.add_row({check, n, value, expected, std::string(rel), tol, pass});
    auto it = std::find_if(counts_.begin(), counts_.end(),
                           [&](const auto& e) { return e.first == check; });
    if (it == counts_.end()) {
      counts_.push_back({check, {0, 0}});
      it = counts_.end() - 1;
    }
    it->second.first += pass ? 1 : 0;
    it->second.second += 1;
  }

  Table table_{"expectations",
               {{"check", ColumnType::Text},
                {"n", ColumnType::Real},
                {"value", ColumnType::Real},
                {"expected", ColumnType::Real},
                {"relation", ColumnType::Text},
                {"tolerance", ColumnType::Real},
                {"pass", ColumnType::Bool}},
               {}};
  std::vector<std::pair<std::string, std::pair<long, long>>> counts_;
};

SubspaceBasis line(const Vector& v, double tol) { return SubspaceBasis(v / v.norm(), tol); }

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// ---- mesh and coefficient inputs -------------------------------------------

fem::Mesh build_mesh(const ExperimentConfig& c) {
  fem::Mesh mesh;
  fem::BoundaryProjection project;
  if (c.mesh.kind == "square") {
    mesh = fem::mesh_unit_square(c.mesh.param);
  } else if (c.mesh.kind == "disk") {
    mesh = fem::mesh_disk(c.mesh.param);
    project = [](const fem::Point& p) { return fem::Point(p / p.norm()); };
  } else {
    mesh = fem::mesh_read(read_text(c.mesh.path));
  }
  for (int r = 0; r < c.refine; ++r) mesh = fem::mesh_refine(mesh, project);
  return mesh;
}

fem::CoefficientField build_coefficients(const fem::Mesh& mesh, const ExperimentConfig& c) {
  const Index nt = mesh.num_triangles();
  fem::CoefficientField field = c.coefficients.empty()
                                    ? fem::CoefficientField::identity(nt)
                                    : fem::coefficients_from_json(read_text(c.coefficients), nt);
  for (double& ci : field.c) ci += c.m;
  return field;
}

std::vector<double> indices(int n_max) {
  std::vector<double> out;
  for (int n = 1; n <= n_max; ++n) out.push_back(n);
  return out;
}

// ---- two-dimensional fixture families (V = C^2, H = C, J = [1, 0]) -----------

FormTriple fixture_triple(double m11, double m12, double m21, double m22, double tol) {
  Matrix m(2, 2);
  m << m11, m12, m21, m22;
  Matrix j(1, 2);
  j << 1.0, 0.0;
  return FormTriple(m, j, std::nullopt, tol);
}

bool is_fixture_family(const std::string& id) {
  return id == "5.2" || id == "5.4" || id == "5.13" || id == "5.14" || id == "5.15" || id == "6.1";
}

FormSequence fixture_sequence(const ExperimentConfig& c) {
  const double tol = c.tol;
  std::vector<FormTriple> members;
  FormTriple limit = fixture_triple(0, 1, 1, 0, tol);
  for (int n = 1; n <= c.n_max; ++n) {
    const double e = 1.0 / n;
    if (c.id == "5.2" || c.id == "5.15") {
      members.push_back(fixture_triple(0, e, e, 0, tol));
    } else if (c.id == "5.4" || c.id == "6.1") {
      members.push_back(fixture_triple(0, 1, 1, e, tol));
    } else if (c.id == "5.13") {
      members.push_back(fixture_triple(1, 0, 0, e, tol));
    } else {
      members.push_back(fixture_triple(0, 1, 1, -e, tol));
    }
  }
  if (c.id == "5.2" || c.id == "5.15") limit = fixture_triple(0, 0, 0, 0, tol);
  if (c.id == "5.13") limit = fixture_triple(1, 0, 0, 0, tol);
  return make_form_sequence(std::move(members), std::move(limit), 2.0, c.s_values);
}

// ---- FEM sequences -------------------------------------------------------------

double dirichlet_ground_state(const fem::Mesh& mesh) {
  const auto sys = fem::assemble(mesh, fem::CoefficientField::identity(mesh.num_triangles()));
  const auto eig = fem::dirichlet_eigs(sys, 1);
  if (eig.empty()) throw Error(ErrorKind::InvalidInput, "mesh has no interior vertices");
  return eig.front();
}

FormSequence fem_sequence(const ExperimentConfig& c, const fem::Mesh& mesh) {
  const Index nt = mesh.num_triangles();
  std::vector<fem::CoefficientField> fields;
  fem::CoefficientField limit = fem::CoefficientField::identity(nt);
  if (c.id == "7.4") {
    // Potentials -lambda_n with lambda_n increasing to the first Dirichlet
    // eigenvalue; the gap shrinks geometrically to 1e-4 of it.
    const double lambda1 = dirichlet_ground_state(mesh);
    for (int n = 1; n <= c.n_max; ++n) {
      const double gap = lambda1 * std::pow(10.0, -4.0 * n / c.n_max);
      fields.push_back(fem::CoefficientField::identity(nt, gap - lambda1));
    }
    limit = fem::CoefficientField::identity(nt, -lambda1);
  } else if (c.id == "7.7") {
    auto a = [](const fem::Point& p) {
      Eigen::Matrix2d m;
      m << 1.0 + p.x(), 0.25, 0.25, 1.0 + p.y();
      return m;
    };
    auto one = [](const fem::Point&) { return 1.0; };
    for (int n = 1; n <= c.n_max; ++n) {
      const double e = 1.0 / n;
      auto an = [&a, e](const fem::Point& p) {
        Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
        d(0, 0) = std::pow(std::cos(std::numbers::pi * p.x()), 2);
        d(1, 1) = std::pow(std::sin(std::numbers::pi * p.y()), 2);
        return Eigen::Matrix2d(a(p) + e * d);
      };
      fields.push_back(fem::CoefficientField::sample(mesh, an, one));
    }
    limit = fem::CoefficientField::sample(mesh, a, one);
  } else {
    // m_n = m + 1/n on top of the configured coefficients.
    limit = build_coefficients(mesh, c);
    for (int n = 1; n <= c.n_max; ++n) {
      fem::CoefficientField f = limit;
      for (double& ci : f.c) ci += 1.0 / n;
      fields.push_back(std::move(f));
    }
  }
  return fem::coefficient_sequence(mesh, fields, limit, c.s_values, indices(c.n_max), c.tol);
}

// ---- tables --------------------------------------------------------------------

Table records_table(const ConvergenceReport& r) {
  Table t{"records",
          {{"n", ColumnType::Real},
           {"form_error", ColumnType::Real},
           {"dim_w", ColumnType::Integer},
           {"dim_vcap", ColumnType::Integer},
           {"delta_w", ColumnType::Real},
           {"delta_w_rev", ColumnType::Real},
           {"proj_error_w", ColumnType::Real},
           {"delta_v", ColumnType::Real},
           {"delta_v_rev", ColumnType::Real},
           {"proj_error_v", ColumnType::Real}},
          {}};
  for (double s : r.s_values) t.columns.push_back({"resolvent_error_s=" + num(s), ColumnType::Real});
  t.columns.push_back({"lower_bound", ColumnType::Real});
  for (const auto& rec : r.records) {
    std::vector<Cell> row{rec.n,           rec.form_error,   static_cast<long>(rec.dim_w),
                          static_cast<long>(rec.dim_vcap),   rec.delta_w,
                          rec.delta_w_rev, rec.proj_error_w, rec.delta_v,
                          rec.delta_v_rev, rec.proj_error_v};
    for (double e : rec.resolvent_errors) row.push_back(e);
    row.push_back(rec.lower_bound);
    t.add_row(std::move(row));
  }
  return t;
}

struct RelationSummary {
  long dim_v = 0;
  long dim_h = 0;
  long graph_dim = 0;
  long mul_dim = 0;
  bool symmetric = false;
  bool selfadjoint = false;
  bool accretive = false;
  bool m_accretive = false;
  double lower_bound = kNaN;
  double resolvent_norm = kNaN;  // ||(A + iI)^{-1}||, inf when not invertible
};

RelationSummary summarize(const FormTriple& f, const LinearRelation& a) {
  RelationSummary s;
  s.dim_v = f.dim_v();
  s.dim_h = f.dim_h();
  s.graph_dim = a.dim();
  s.mul_dim = mul_part(a).dim();
  s.symmetric = is_symmetric_relation(a);
  s.selfadjoint = s.symmetric && selfadjoint_check(a);
  const auto acc = accretivity_check(a);
  s.accretive = acc.accretive;
  s.m_accretive = acc.m_accretive;
  if (s.selfadjoint) s.lower_bound = lower_bound(a);
  try {
    s.resolvent_norm = spectral_norm(resolvent(a, Complex(0.0, -1.0)));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotInvertible) throw;
    s.resolvent_norm = kInf;
  }
  return s;
}

Table relation_table(const std::string& name, const RelationSummary& s) {
  Table t{name,
          {{"dim_v", ColumnType::Integer},
           {"dim_h", ColumnType::Integer},
           {"graph_dim", ColumnType::Integer},
           {"mul_dim", ColumnType::Integer},
           {"symmetric", ColumnType::Bool},
           {"selfadjoint", ColumnType::Bool},
           {"accretive", ColumnType::Bool},
           {"m_accretive", ColumnType::Bool},
           {"lower_bound", ColumnType::Real},
           {"resolvent_norm_s=1", ColumnType::Real}},
          {}};
  t.add_row({s.dim_v, s.dim_h, s.graph_dim, s.mul_dim, s.symmetric, s.selfadjoint, s.accretive,
             s.m_accretive, s.lower_bound, s.resolvent_norm});
  return t;
}

Table limit_table(const FormSequence& seq, const ConvergenceReport& r) {
  const RelationSummary s = summarize(seq.limit, from_form(seq.limit));
  Table t = relation_table("limit", s);
  t.columns.insert(t.columns.begin() + 2, {{"dim_w", ColumnType::Integer},
                                           {"dim_vcap", ColumnType::Integer}});
  t.rows.front().insert(t.rows.front().begin() + 2,
                        {static_cast<long>(r.limit.dim_w), static_cast<long>(r.limit.dim_vcap)});
  return t;
}

std::vector<double> resolvent_column(const ConvergenceReport& r, std::size_t k) {
  std::vector<double> out;
  for (const auto& rec : r.records) out.push_back(rec.resolvent_errors[k]);
  return out;
}

bool nonincreasing_after(const std::vector<double>& e, std::size_t first) {
  for (std::size_t k = first + 1; k < e.size(); ++k) {
    if (e[k] > e[k - 1]) return false;
  }
  return true;
}

// ---- converge ------------------------------------------------------------------

void fixture_expectations(const ExperimentConfig& c, const FormSequence& seq,
                          const ConvergenceReport& r, Expectations& x) {
  const double tol = 1e-12;
  const auto& id = c.id;
  const auto& recs = r.records;
  if (id == "5.2") {
    x.eq("dim_v", 0, static_cast<double>(seq.limit.dim_v()), 2, 0);
    x.eq("dim_h", 0, static_cast<double>(seq.limit.dim_h()), 1, 0);
    x.le("limit_graph_gap_to_Cx0", 0,
         gap_hat(from_form(seq.limit).as_subspace(), line(vec2(1, 0), c.tol)), 0, tol);
    for (std::size_t k = 0; k < seq.members.size(); ++k) {
      x.le("member_graph_gap_to_0xC", seq.indices[k],
           gap_hat(from_form(seq.members[k]).as_subspace(), line(vec2(0, 1), c.tol)), 0, tol);
    }
    for (std::size_t j = 0; j < r.s_values.size(); ++j) {
      const double s = r.s_values[j];
      for (const auto& rec : recs) {
        x.eq("resolvent_error_s=" + num(s), rec.n, rec.resolvent_errors[j], 1.0 / std::abs(s), tol);
      }
    }
  } else if (id == "5.4") {
    for (std::size_t k = 0; k < seq.members.size(); ++k) {
      const double n = seq.indices[k];
      x.le("member_graph_gap_to_line(1,-n)", n,
           gap_hat(from_form(seq.members[k]).as_subspace(), line(vec2(1, -n), c.tol)), 0, tol);
      x.eq("lower_bound", n, recs[k].lower_bound, -n, tol * n);
      for (std::size_t j = 0; j < r.s_values.size(); ++j) {
        const double s = r.s_values[j];
        x.eq("resolvent_error_s=" + num(s), n, recs[k].resolvent_errors[j],
             1.0 / std::hypot(n, s), tol);
      }
    }
    x.flag("uniform_lower_bound", 0, uniform_lower_bound(seq).uniform, false);
  } else if (id == "5.13") {
    for (const auto& rec : recs) x.eq("member_dim_w", rec.n, static_cast<double>(rec.dim_w), 0, 0);
    x.eq("limit_dim_w", 0, static_cast<double>(r.limit.dim_w), 1, 0);
    for (std::size_t j = 0; j < r.s_values.size(); ++j) {
      for (const auto& rec : recs) {
        x.le("resolvent_error_s=" + num(r.s_values[j]), rec.n, rec.resolvent_errors[j], 0, tol);
      }
    }
  } else if (id == "5.14") {
    for (const auto& rec : recs) {
      x.eq("member_dim_vcap", rec.n, static_cast<double>(rec.dim_vcap), 0, 0);
    }
    x.eq("limit_dim_vcap", 0, static_cast<double>(r.limit.dim_vcap), 1, 0);
    const auto lb = uniform_lower_bound(seq);
    x.flag("uniform_lower_bound", 0, lb.uniform, true);
    x.eq("bound", 0, lb.bound, 1.0, tol);
  } else if (id == "5.15") {
    x.flag("uniform_lower_bound", 0, uniform_lower_bound(seq).uniform, true);
    for (std::size_t j = 0; j < r.s_values.size(); ++j) {
      x.flag("resolvent_errors_tend_to_zero_s=" + num(r.s_values[j]), 0,
             tends_to_zero(resolvent_column(r, j)), false);
    }
  } else if (id == "7.3" || id == "7.7") {
    for (const auto& rec : recs) x.eq("member_dim_w", rec.n, static_cast<double>(rec.dim_w), 0, 0);
    x.eq("limit_dim_w", 0, static_cast<double>(r.limit.dim_w), 0, 0);
    if (id == "7.7") x.flag("uniform_ellipticity", 0, check_uniform_ellipticity(seq).pass, true);
    for (std::size_t j = 0; j < r.s_values.size(); ++j) {
      const auto e = resolvent_column(r, j);
      const std::string s = num(r.s_values[j]);
      x.flag("resolvent_errors_nonincreasing_after_n=3_s=" + s, 0, nonincreasing_after(e, 2),
             true);
      x.flag("resolvent_errors_tend_to_zero_s=" + s, 0, tends_to_zero(e), true);
    }
  } else if (id == "7.4") {
    std::vector<double> lb;
    for (const auto& rec : recs) lb.push_back(rec.lower_bound);
    bool decreasing = true;
    for (std::size_t k = 1; k < lb.size(); ++k) decreasing = decreasing && lb[k] < lb[k - 1];
    x.flag("lower_bound_strictly_decreasing", 0, decreasing, true);
    x.le("final_lower_bound", recs.back().n, lb.back(), -1e3);
    x.eq("limit_mul_dim", 0, static_cast<double>(mul_part(from_form(seq.limit)).dim()), 1, 0);
  }
}

Report run_converge(const ExperimentConfig& c) {
  std::optional<fem::Mesh> mesh;
  if (!is_fixture_family(c.id)) mesh = build_mesh(c);
  const FormSequence seq = mesh ? fem_sequence(c, *mesh) : fixture_sequence(c);
  const ConvergenceReport r = analyze(seq);
  Report out;
  out.tables.push_back(records_table(r));
  out.tables.push_back(limit_table(seq, r));
  out.assertions = r.assertions;
  Expectations x;
  fixture_expectations(c, seq, r, x);
  x.finish(out);
  return out;
}

// ---- semigroup -----------------------------------------------------------------

Report run_semigroup(const ExperimentConfig& c) {
  SemigroupReport r;
  if (c.id == "6.1") {
    r = semigroup_convergence(fixture_sequence(c), c.t_values);
  } else {
    if (!c.coefficients.empty()) {
      throw Error(ErrorKind::InvalidInput, "semigroup supports constant potentials only");
    }
    const fem::Mesh mesh = build_mesh(c);
    std::vector<double> m_list;
    for (int n = 1; n <= c.n_max; ++n) m_list.push_back(c.m + 1.0 / n);
    r = fem::dtn_semigroup_experiment(mesh, m_list, c.m, c.t_values,
                                      fem::DtnOptions{1e-6, c.tol});
  }
  Report out;
  Table t{"semigroup",
          {{"n", ColumnType::Real}, {"t", ColumnType::Real}, {"error", ColumnType::Real}},
          {}};
  for (std::size_t k = 0; k < r.indices.size(); ++k) {
    for (std::size_t j = 0; j < r.t_values.size(); ++j) {
      t.add_row({r.indices[k], r.t_values[j], r.errors[k][j]});
    }
  }
  out.tables.push_back(std::move(t));
  out.assertions = r.assertions;
  Expectations x;
  if (c.id == "6.1") {
    // ||e^{-tA_n}|| = e^{nt} and the limit semigroup vanishes.
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
      for (std::size_t j = 0; j < r.t_values.size(); ++j) {
        const double expected = std::exp(r.indices[k] * r.t_values[j]);
        x.eq("blow_up_t=" + num(r.t_values[j]), r.indices[k], r.errors[k][j], expected,
             1e-9 * expected);
      }
    }
  } else if (c.id == "7.5") {
    x.flag("hypotheses_hold", 0, r.hypotheses_hold, true);
  }
  x.finish(out);
  return out;
}

// ---- single relations ----------------------------------------------------------

Report relation_report(Expectations& x, const RelationSummary& s) {
  Report out;
  out.tables.push_back(relation_table("relation", s));
  x.finish(out);
  return out;
}

Report run_relation_preset(const ExperimentConfig& c) {
  Expectations x;
  if (c.id == "identity") {
    const Matrix one = Matrix::Identity(1, 1);
    const FormTriple f(one, one, std::nullopt, c.tol);
    const auto s = summarize(f, from_form(f));
    x.eq("graph_dim", 0, static_cast<double>(s.graph_dim), 1, 0);
    x.eq("lower_bound", 0, s.lower_bound, 1.0, 1e-14);
    x.eq("resolvent_norm_s=1", 0, s.resolvent_norm, std::sqrt(0.5), 1e-14);
    return relation_report(x, s);
  }
  if (c.id == "8.2") {
    // Accretive, non-symmetric form with H-ellipticity; j = T.
    Matrix m(3, 3);
    m << 2.0, Complex(1, 1), 0.0, Complex(-1, 1), 3.0, 0.5, 0.0, -0.5, 1.0;
    Matrix t(2, 3);
    t << 1.0, 0.0, 1.0, 0.0, 1.0, -1.0;
    const FormTriple f(m, t, std::nullopt, c.tol);
    const LinearRelation b2 = from_form(f);
    // B = {(Tu, y) : T^H y = M u} with M invertible: u = M^{-1} T^H y.
    const Matrix tmt = t * m.partialPivLu().solve(t.adjoint());
    const LinearRelation b = LinearRelation::from_pairs(tmt, Matrix::Identity(2, 2), c.tol);
    const auto s = summarize(f, b2);
    x.le("gap_B_to_B2", 0, gap_hat(b.as_subspace(), b2.as_subspace()), 0, 1e-12);
    x.eq("mu_at_omega=0", 0, ellipticity(f, 0.0).mu, 1.0, 1e-12);
    x.flag("accretive", 0, s.accretive, true);
    x.flag("m_accretive", 0, s.m_accretive, true);
    x.flag("symmetric", 0, s.symmetric, false);
    return relation_report(x, s);
  }
  if (c.id == "8.3") {
    const FormTriple f = fixture_triple(0, 1, 0, 0, c.tol);
    const auto s = summarize(f, from_form(f));
    x.eq("graph_dim", 0, static_cast<double>(s.graph_dim), 2, 0);
    x.flag("accretive", 0, s.accretive, false);
    x.flag("jt_elliptic_at_omega=1", 0, ellipticity(f, 1.0).satisfied, true);
    return relation_report(x, s);
  }
  if (c.id == "8.4") {
    const fem::Mesh mesh = build_mesh(c);
    const FormTriple f = fem::mean_free_trace_triple(mesh, c.tol);
    const auto s = summarize(f, from_form(f));
    const std::vector<double> grid{0.0, 1.0, 10.0, 100.0, 1e4};
    x.flag("j_elliptic_for_some_omega", 0, j_ellipticity_search(f, grid).satisfied, false);
    const auto sys = fem::assemble(mesh, fem::CoefficientField::identity(mesh.num_triangles()));
    const Vector one = fem::FormReducer(sys, c.tol).to_v(RealVector::Ones(mesh.num_vertices()));
    x.le("constant_witness", 0, std::abs(f(one, one)) + (f.j() * one).squaredNorm(), 0, 1e-9);
    x.flag("selfadjoint", 0, s.selfadjoint, true);
    x.flag("m_accretive", 0, s.m_accretive, true);
    x.ge("lower_bound", 0, s.lower_bound, 0.0, 1e-8);
    return relation_report(x, s);
  }
  throw Error(ErrorKind::InvalidInput, "preset '" + c.id + "' is not a relation example");
}

// ---- DtN -----------------------------------------------------------------------

Report run_dtn_eigs(const ExperimentConfig& c) {
  const fem::Mesh mesh = build_mesh(c);
  const auto sys = fem::assemble(mesh, build_coefficients(mesh, c));
  const auto steklov = fem::steklov_eigs(sys, c.k, fem::DtnOptions{1e-6, c.tol});
  const Index interior = static_cast<Index>(sys.interior_index.size());
  const auto dirichlet = fem::dirichlet_eigs(sys, std::min<Index>(c.k, interior));
  Report out;
  Table summary{"summary",
                {{"vertices", ColumnType::Integer},
                 {"boundary_vertices", ColumnType::Integer},
                 {"dirichlet_margin", ColumnType::Real}},
                {}};
  summary.add_row({static_cast<long>(mesh.num_vertices()),
                   static_cast<long>(sys.boundary_index.size()), fem::dirichlet_margin(sys)});
  out.tables.push_back(std::move(summary));
  for (const auto& [name, values] : {std::pair{"steklov", &steklov}, {"dirichlet", &dirichlet}}) {
    Table t{name, {{"index", ColumnType::Integer}, {"eigenvalue", ColumnType::Real}}, {}};
    for (std::size_t k = 0; k < values->size(); ++k) {
      t.add_row({static_cast<long>(k), (*values)[k]});
    }
    out.tables.push_back(std::move(t));
  }
  return out;
}

Report run_dtn_resolvent(const ExperimentConfig& c) {
  const fem::Mesh mesh = build_mesh(c);
  const auto sys = fem::assemble(mesh, build_coefficients(mesh, c));
  const LinearRelation graph = fem::dtn_graph(sys, c.tol);
  const FormTriple f = fem::to_form_triple(sys, c.tol);
  Report out;
  Table t{"resolvent",
          {{"s", ColumnType::Real},
           {"norm", ColumnType::Real},
           {"bound", ColumnType::Real},
           {"dual_path_difference", ColumnType::Real}},
          {}};
  for (double s : c.s_values) {
    const Matrix r1 = resolvent(graph, Complex(0.0, -s));
    const Matrix r2 = resolvent_via_form(f, s);
    const double norm = spectral_norm(r1);
    const double diff = spectral_norm(r1 - r2);
    const double bound = 1.0 / std::abs(s);
    t.add_row({s, norm, bound, diff});
    out.assertions.push_back({"resolvent_bound_s=" + num(s), norm <= bound * (1.0 + 1e-10),
                              "norm " + num(norm) + ", bound " + num(bound)});
    out.assertions.push_back({"dual_path_s=" + num(s), diff <= 1e-9 * bound,
                              "difference " + num(diff)});
  }
  out.tables.push_back(std::move(t));
  return out;
}

// ---- mesh ----------------------------------------------------------------------

Report run_mesh(const ExperimentConfig& c) {
  const fem::Mesh mesh = build_mesh(c);
  Report out;
  Table t{"mesh",
          {{"spec", ColumnType::Text},
           {"refine", ColumnType::Integer},
           {"vertices", ColumnType::Integer},
           {"triangles", ColumnType::Integer},
           {"boundary_edges", ColumnType::Integer},
           {"area", ColumnType::Real},
           {"perimeter", ColumnType::Real}},
          {}};
  t.add_row({c.mesh.str(), static_cast<long>(c.refine), static_cast<long>(mesh.num_vertices()),
             static_cast<long>(mesh.num_triangles()),
             static_cast<long>(mesh.boundary_edges.size()), mesh.area(), mesh.perimeter()});
  out.tables.push_back(std::move(t));
  out.artifacts.push_back({"mesh.txt", fem::mesh_write(mesh)});
  return out;
}

// ---- presets -------------------------------------------------------------------

// Presets run exactly as defined; only the tolerance and seed carry over.
Report run_preset(const ExperimentConfig& c, const std::string& id) {
  ExperimentConfig p = preset(id);
  p.tol = c.tol;
  p.seed = c.seed;
  p.validate();
  return p.command == Command::Examples ? run_relation_preset(p) : run(p);
}

Report run_battery(const ExperimentConfig& c) {
  Report out;
  for (const auto& id : preset_ids()) {
    Report r = run_preset(c, id);
    for (auto& t : r.tables) {
      t.name = id + "_" + t.name;
      out.tables.push_back(std::move(t));
    }
    for (auto& a : r.assertions) {
      a.name = id + ":" + a.name;
      out.assertions.push_back(std::move(a));
    }
    for (auto& a : r.artifacts) {
      a.file_name = id + "_" + a.file_name;
      out.artifacts.push_back(std::move(a));
    }
  }
  return out;
}

}  // namespace

Report run(const ExperimentConfig& config) {
  config.validate();
  switch (config.command) {
    case Command::Examples:
      return config.id == "all" ? run_battery(config) : run_preset(config, config.id);
    case Command::Converge: return run_converge(config);
    case Command::Semigroup: return run_semigroup(config);
    case Command::DtnEigs: return run_dtn_eigs(config);
    case Command::DtnResolvent: return run_dtn_resolvent(config);
    case Command::Mesh: return run_mesh(config);
  }
  throw Error(ErrorKind::InvalidInput, "unknown command");
}

}  // namespace relforms::cli
