#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "relforms/fem2d.hpp"

namespace relforms::fem {
namespace {

constexpr double kPi = std::numbers::pi;

AssembledSystem square_system(Index n, double m = 0.0) {
  const Mesh mesh = mesh_unit_square(n);
  return assemble(mesh, CoefficientField::identity(mesh.num_triangles(), m));
}

TEST(Mesh, UnitSquareCounts) {
  for (Index n : {1, 2, 5}) {
    const Mesh m = mesh_unit_square(n);
    EXPECT_EQ(m.num_vertices(), (n + 1) * (n + 1));
    EXPECT_EQ(m.num_triangles(), 2 * n * n);
    EXPECT_EQ(static_cast<Index>(m.boundary_edges.size()), 4 * n);
    EXPECT_NEAR(m.area(), 1.0, 1e-14);
    EXPECT_NEAR(m.perimeter(), 4.0, 1e-14);
    EXPECT_NO_THROW(m.validate());
  }
}

TEST(Mesh, DiskLevels) {
  const Mesh d0 = mesh_disk(0);
  EXPECT_EQ(d0.num_vertices(), 7);
  EXPECT_NO_THROW(d0.validate());
  const Mesh d4 = mesh_disk(4);
  EXPECT_NO_THROW(d4.validate());
  EXPECT_NEAR(d4.area(), kPi, 0.01 * kPi);
  for (const Edge& e : d4.boundary_edges) {
    EXPECT_NEAR(d4.vertices[static_cast<std::size_t>(e[0])].norm(), 1.0, 1e-12);
  }
}

TEST(Mesh, RefineMatchesFinerSquare) {
  const Mesh r = mesh_refine(mesh_unit_square(1));
  const Mesh s = mesh_unit_square(2);
  EXPECT_EQ(r.num_vertices(), s.num_vertices());
  EXPECT_EQ(r.num_triangles(), s.num_triangles());
  EXPECT_EQ(r.boundary_edges.size(), s.boundary_edges.size());
  EXPECT_NO_THROW(r.validate());
  const Mesh q = mesh_refine(mesh_unit_square(3));
  EXPECT_NEAR(q.area(), 1.0, 1e-14);
}

TEST(Mesh, WriteReadRoundTrip) {
  const Mesh m = mesh_disk(2);
  const Mesh r = mesh_read(mesh_write(m));
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_EQ(r.vertices[i], m.vertices[i]);
  EXPECT_EQ(r.triangles, m.triangles);
  EXPECT_EQ(r.boundary_edges, m.boundary_edges);
  EXPECT_EQ(mesh_write(r), mesh_write(m));
}

TEST(Mesh, ParseErrorsCarryLineNumbers) {
  const char* text = "# header\nv 0 0\nv 1 0\nv 0 1\nt 0 1\n";
  try {
    mesh_read(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_EQ(e.index(), 5);
  }
  try {
    mesh_read("v 0 0\nq 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.index(), 2);
  }
}

TEST(Mesh, ValidationCatchesDefects) {
  Mesh m = mesh_unit_square(1);
  m.boundary_edges.pop_back();
  EXPECT_THROW(m.validate(), Error);
  Mesh flat = mesh_read("v 0 0\nv 1 0\nv 2 0\nt 0 1 2\nb 0 1\nb 1 2\nb 2 0\n");
  try {
    flat.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateElement);
    EXPECT_EQ(e.index(), 0);
  }
}

TEST(Assemble, StiffnessAndMassIdentities) {
  const AssembledSystem sys = square_system(1);
  EXPECT_LE(sys.k.rowwise().sum().cwiseAbs().maxCoeff(), 1e-14);
  const RealVector one = RealVector::Ones(sys.num_vertices());
  EXPECT_NEAR(one.dot(sys.m_omega * one), 1.0, 1e-14);
  const RealVector ob = RealVector::Ones(sys.m_gamma.rows());
  EXPECT_NEAR(ob.dot(sys.m_gamma * ob), 4.0, 1e-14);
  EXPECT_TRUE(sys.k.isApprox(sys.k.transpose()));
  EXPECT_TRUE(sys.interior_index.empty());
}

TEST(Assemble, DiskMassIdentities) {
  const Mesh mesh = mesh_disk(3);
  const auto sys = assemble(mesh, CoefficientField::identity(mesh.num_triangles()));
  const RealVector one = RealVector::Ones(sys.num_vertices());
  EXPECT_NEAR(one.dot(sys.m_omega * one), mesh.area(), 1e-12);
  const RealVector ob = RealVector::Ones(sys.m_gamma.rows());
  EXPECT_NEAR(ob.dot(sys.m_gamma * ob), mesh.perimeter(), 1e-12);
}

TEST(Assemble, DegenerateElement) {
  Mesh m = mesh_unit_square(2);
  m.vertices[4] = m.vertices[0];
  try {
    assemble(m, CoefficientField::identity(m.num_triangles()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateElement);
    ASSERT_TRUE(e.index().has_value());
  }
}

TEST(Assemble, CoefficientLengthMismatch) {
  const Mesh m = mesh_unit_square(2);
  try {
    assemble(m, CoefficientField::identity(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Coefficients, JsonFile) {
  const auto f = coefficients_from_json(R"({"a_kl": [[2, 0.5, 3], [1, 0, 1]], "c": 4})", 2);
  EXPECT_EQ(f.a[0](0, 1), 0.5);
  EXPECT_EQ(f.a[0](1, 0), 0.5);
  EXPECT_EQ(f.c[1], 4.0);
  const auto g = coefficients_from_json(R"({"a_kl": "identity", "c": [1, 2]})", 2);
  EXPECT_EQ(g.a[1], Eigen::Matrix2d::Identity());
  EXPECT_NEAR(g.mu_ell(), 1.0, 1e-15);
  EXPECT_THROW(coefficients_from_json(R"({"a": 1})", 2), Error);
  EXPECT_THROW(coefficients_from_json(R"({"c": [1]})", 2), Error);
}

TEST(ToFormTriple, DirichletFormHasTrivialW) {
  const auto sys = square_system(8);
  const FormTriple f = to_form_triple(sys);
  EXPECT_TRUE(is_symmetric(f));
  EXPECT_EQ(w_space(f).dim(), 0);
  const Vector one = FormReducer(sys).to_v(RealVector::Ones(sys.num_vertices()));
  EXPECT_NEAR((f.j() * one).squaredNorm(), 4.0, 1e-12);
}

TEST(DirichletEigs, UnitSquare) {
  const auto ev = dirichlet_eigs(square_system(32), 1);
  EXPECT_NEAR(ev[0], 2.0 * kPi * kPi, 0.01 * 2.0 * kPi * kPi);
}

TEST(DirichletEigs, Disk) {
  const Mesh mesh = mesh_disk(4);
  const auto ev = dirichlet_eigs(assemble(mesh, CoefficientField::identity(mesh.num_triangles())), 1);
  EXPECT_NEAR(ev[0], 5.7832, 0.02 * 5.7832);
}

TEST(DirichletEigs, ShiftIdentity) {
  const auto a = dirichlet_eigs(square_system(6, 0.5), 4);
  const auto b = dirichlet_eigs(square_system(6, 0.5 + 3.0), 4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], a[i] + 3.0, 1e-9 * b[i]);
}

TEST(DirichletEigs, TooMany) {
  try {
    dirichlet_eigs(square_system(2), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(DtnGraph, ConstantsHaveZeroNormalDerivative) {
  const auto sys = square_system(6);
  const FormReducer reducer(sys);
  const LinearRelation d0 = dtn_graph(sys);
  EXPECT_TRUE(selfadjoint_check(d0));
  const Vector g = reducer.to_h(RealVector::Ones(sys.m_gamma.rows()));
  EXPECT_LE(distance_to_relation(d0, g, Vector::Zero(g.size())), 1e-8);
  EXPECT_NEAR(lower_bound(d0), 0.0, 1e-8);
}

TEST(DtnGraph, ResolventPathsAgree) {
  const auto sys = square_system(5);
  const FormTriple f = to_form_triple(sys);
  EXPECT_LE(spectral_norm(resolvent_via_form(f, 1.0) -
                          resolvent(dtn_graph(sys), Complex(0.0, -1.0))),
            1e-10);
}

TEST(DtnGraph, MultivaluedAtDirichletEigenvalue) {
  const Mesh mesh = mesh_unit_square(6);
  const double l1 = dirichlet_eigs(square_system(6), 1)[0];
  const auto sys = assemble(mesh, CoefficientField::identity(mesh.num_triangles(), -l1));
  const LinearRelation d = dtn_graph(sys);
  EXPECT_GE(mul_part(d).dim(), 1);
  EXPECT_TRUE(selfadjoint_check(d));
}

TEST(Steklov, DiskSpectrum) {
  const Mesh mesh = mesh_disk(4);
  const auto ev =
      steklov_eigs(assemble(mesh, CoefficientField::identity(mesh.num_triangles())), 5);
  const double expected[] = {0, 1, 1, 2, 2};
  EXPECT_NEAR(ev[0], 0.0, 1e-8);
  for (int i = 1; i < 5; ++i) EXPECT_NEAR(ev[i], expected[i], 0.02 * expected[i]);
}

TEST(Steklov, SquareAndMonotonicity) {
  const auto e0 = steklov_eigs(square_system(6, 0.0), 4);
  const auto e1 = steklov_eigs(square_system(6, 1.0), 4);
  EXPECT_NEAR(e0[0], 0.0, 1e-8);
  for (std::size_t i = 0; i < e0.size(); ++i) EXPECT_GT(e1[i], e0[i]);
}

TEST(Steklov, NearDirichletSpectrum) {
  const double l1 = dirichlet_eigs(square_system(4), 1)[0];
  try {
    steklov_eigs(square_system(4, -l1), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearDirichletSpectrum);
  }
}

TEST(Steklov, RefinementReducesError) {
  double prev = 0.0;
  for (Index level : {2, 3, 4}) {
    const Mesh mesh = mesh_disk(level);
    const auto ev =
        steklov_eigs(assemble(mesh, CoefficientField::identity(mesh.num_triangles())), 2);
    const double err = std::abs(ev[1] - 1.0);
    if (level > 2) EXPECT_LT(err, 0.8 * prev);
    prev = err;
  }
}

TEST(CoefficientSequence, SharedMapsAndConvergence) {
  const Mesh mesh = mesh_unit_square(4);
  const Index nt = mesh.num_triangles();
  std::vector<CoefficientField> fields;
  for (int n = 1; n <= 10; ++n) {
    CoefficientField f = CoefficientField::identity(nt);
    for (auto& a : f.a) a *= 1.0 + 1.0 / n;
    fields.push_back(f);
  }
  const auto seq = coefficient_sequence(mesh, fields, CoefficientField::identity(nt), {1.0});
  EXPECT_EQ(seq.omega, 1.0);
  EXPECT_TRUE(check_uniform_ellipticity(seq).pass);
  const auto r = resolvent_convergence(seq);
  for (const auto& rec : r.records) EXPECT_EQ(rec.dim_w, 0);
  EXPECT_TRUE(r.all_passed());
  for (std::size_t k = 1; k < r.records.size(); ++k) {
    EXPECT_LT(r.records[k].resolvent_errors[0], r.records[k - 1].resolvent_errors[0]);
  }
}

TEST(CoefficientSequence, MeshMismatch) {
  const Mesh mesh = mesh_unit_square(2);
  const std::vector<CoefficientField> fields{CoefficientField::identity(3)};
  try {
    coefficient_sequence(mesh, fields, CoefficientField::identity(mesh.num_triangles()), {1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(SemigroupExperiment, PositivePotential) {
  const Mesh mesh = mesh_unit_square(8);
  std::vector<double> m;
  for (int n = 1; n <= 8; ++n) m.push_back(1.0 + 1.0 / n);
  const std::vector<double> t{0.1, 1.0};
  const auto r = dtn_semigroup_experiment(mesh, m, 1.0, t);
  EXPECT_TRUE(r.hypotheses_hold);
  EXPECT_TRUE(r.all_passed());
  for (std::size_t k = 1; k < r.errors.size(); ++k) EXPECT_LT(r.errors[k][1], r.errors[k - 1][1]);
}

TEST(SemigroupExperiment, ConstantSequence) {
  const Mesh mesh = mesh_unit_square(4);
  const std::vector<double> m(4, 2.0);
  const std::vector<double> t{1.0};
  const auto r = dtn_semigroup_experiment(mesh, m, 2.0, t);
  for (const auto& row : r.errors) EXPECT_EQ(row[0], 0.0);
}

TEST(SemigroupExperiment, DirichletCrossingExcluded) {
  const Mesh mesh = mesh_unit_square(4);
  const double l1 = dirichlet_eigs(square_system(4), 1)[0];
  const std::vector<double> m{-l1 + 0.5};
  const std::vector<double> t{1.0};
  try {
    dtn_semigroup_experiment(mesh, m, -l1, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NearDirichletSpectrum);
  }
}

TEST(UniquenessRadius, Deterministic) {
  const Mesh mesh = mesh_unit_square(3);
  const auto base = CoefficientField::identity(mesh.num_triangles());
  const auto a = uniqueness_radius(mesh, base, 7, 3, 0.5, 4);
  const auto b = uniqueness_radius(mesh, base, 7, 3, 0.5, 4);
  EXPECT_EQ(a.radius, b.radius);
  EXPECT_GT(a.radius, 0.0);
  EXPECT_GT(a.trials, 0);
}

}  // namespace
}  // namespace relforms::fem
