#pragma once

// Conforming P1 finite elements on polygonal domains in the plane.
//
// Nodal coefficient vectors u are mapped to orthonormal coordinates through
// the Cholesky factor of the H^1 Gram matrix: xi = L^T u with G = L L^T.
// Boundary traces use the factor of the boundary mass matrix in the same way,
// so the FormTriple and LinearRelation machinery sees plain Euclidean spaces.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relforms/convergence.hpp"
#include "relforms/forms.hpp"
#include "relforms/relation.hpp"

namespace relforms::fem {

using Point = Eigen::Vector2d;
using Triangle = std::array<Index, 3>;
using Edge = std::array<Index, 2>;

struct Mesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;     // counterclockwise
  std::vector<Edge> boundary_edges;    // oriented along the boundary

  Index num_vertices() const { return static_cast<Index>(vertices.size()); }
  Index num_triangles() const { return static_cast<Index>(triangles.size()); }

  /// Throws DegenerateElement for non-positive areas and InvalidInput for
  /// indices out of range, open boundary loops, or non-conforming edges.
  void validate() const;
  double area() const;
  double perimeter() const;
};

double triangle_area(const Mesh& mesh, Index t);

Mesh mesh_unit_square(Index n);

/// Hexagonal fan inscribed in the unit circle, red-refined `level` times.
Mesh mesh_disk(Index level);

using BoundaryProjection = std::function<Point(const Point&)>;

/// Red refinement: each triangle splits into four. New boundary midpoints
/// are passed through `project` when given.
Mesh mesh_refine(const Mesh& mesh, const BoundaryProjection& project = {});

/// Lines `v x y`, `t i j k`, `b i j`; `#` starts a comment.
Mesh mesh_read(std::string_view text);
std::string mesh_write(const Mesh& mesh);

struct CoefficientField {
  std::vector<Eigen::Matrix2d> a;  // per triangle, symmetric
  std::vector<double> c;           // per triangle

  static CoefficientField identity(Index num_triangles, double c = 0.0);
  /// Samples `a` and `c` at triangle barycenters.
  static CoefficientField sample(const Mesh& mesh,
                                 const std::function<Eigen::Matrix2d(const Point&)>& a,
                                 const std::function<double(const Point&)>& c);

  /// Smallest eigenvalue of a over all triangles.
  double mu_ell() const;
  double min_c() const;
  /// Throws NotHermitian for non-symmetric a and DimensionMismatch unless
  /// both lists have `num_triangles` entries.
  void validate(Index num_triangles) const;
};

/// JSON {"a_kl": [[a11, a12, a22], ...] | "identity", "c": [...] | number}.
CoefficientField coefficients_from_json(std::string_view text, Index num_triangles);

struct AssembledSystem {
  RealMatrix k;        // stiffness for the coefficient field
  RealMatrix k_id;     // unit-coefficient stiffness
  RealMatrix c;        // potential term
  RealMatrix m_omega;  // domain mass
  RealMatrix m_gamma;  // boundary mass on boundary vertices
  RealMatrix tr;       // boundary vertices x all vertices selection
  RealMatrix g;        // k_id + m_omega
  std::vector<Index> interior_index;
  std::vector<Index> boundary_index;

  Index num_vertices() const { return k.rows(); }
};

AssembledSystem assemble(const Mesh& mesh, const CoefficientField& coeff);

/// Holds the Cholesky factors of G, M_Gamma and M_Omega so that several
/// coefficient fields on one mesh reduce to triples sharing J and Jt.
class FormReducer {
 public:
  explicit FormReducer(const AssembledSystem& sys, double tol = kDefaultTol);

  /// Triple for the form with matrix k + c (nodal basis).
  FormTriple reduce(const RealMatrix& k_plus_c) const;
  FormTriple reduce(const AssembledSystem& sys) const { return reduce(sys.k + sys.c); }

  /// Orthonormal V coordinates of a nodal vector.
  Vector to_v(const RealVector& nodal) const;
  /// Orthonormal H coordinates of boundary nodal values.
  Vector to_h(const RealVector& boundary_values) const;

  const Matrix& j() const { return j_; }
  const Matrix& jt() const { return jt_; }
  const RealMatrix& l_gamma() const { return l_gamma_; }

 private:
  RealMatrix l_;
  RealMatrix l_gamma_;
  Matrix j_;
  Matrix jt_;
  double tol_;
};

FormTriple to_form_triple(const AssembledSystem& sys, double tol = kDefaultTol);

/// k smallest eigenvalues of (K + C, M_Omega) on interior vertices.
std::vector<double> dirichlet_eigs(const AssembledSystem& sys, Index k);

LinearRelation dtn_graph(const AssembledSystem& sys, double tol = kDefaultTol);

struct DtnOptions {
  /// Minimum |λ| over the discrete Dirichlet spectrum of -Δ + m.
  double dirichlet_margin = 1e-6;
  double tol = kDefaultTol;
};

/// Smallest |λ| over the discrete Dirichlet spectrum, +inf without interior.
double dirichlet_margin(const AssembledSystem& sys);

/// k smallest eigenvalues of the single-valued part of the DtN graph.
std::vector<double> steklov_eigs(const AssembledSystem& sys, Index k,
                                 const DtnOptions& options = {});

/// Assembles each field on `mesh` and reduces with shared J and Jt.
/// omega = max(0, 1 - min c) over all fields makes the family uniformly
/// elliptic with mu >= min(mu_ell, 1).
FormSequence coefficient_sequence(const Mesh& mesh, std::span<const CoefficientField> fields,
                                  const CoefficientField& limit, std::vector<double> s_values,
                                  std::vector<double> indices = {},
                                  double tol = kDefaultTol);

/// Constant potentials m_n -> m with unit coefficients. Checks the Dirichlet
/// margin of the limit and runs semigroup_convergence.
SemigroupReport dtn_semigroup_experiment(const Mesh& mesh, std::span<const double> m_list,
                                         double m_limit, std::span<const double> t_values,
                                         const DtnOptions& options = {},
                                         const ConvergenceOptions& conv = {});

/// Dirichlet form with j = B Tr, where B removes the boundary mean.
FormTriple mean_free_trace_triple(const Mesh& mesh, double tol = kDefaultTol);

struct UniquenessRadius {
  double radius = 0.0;      // largest tested eps keeping dim W = 0
  bool failure_found = false;
  Index trials = 0;
};

/// Bisection on the sup-norm of random symmetric per-triangle perturbations
/// of `base` for which every sample keeps dim W(a) = 0.
UniquenessRadius uniqueness_radius(const Mesh& mesh, const CoefficientField& base,
                                   std::uint64_t seed, Index samples = 8,
                                   double eps_max = 1.0, Index iterations = 12);

}  // namespace relforms::fem
