#pragma once

// Linear relations (graphs) in H ⊕ H.
//
// A relation is stored as an orthonormal basis of a subspace of H ⊕ H. The
// first dim_h rows of the basis hold x-components, the last dim_h rows hold
// y-components. Two relations are equal when their gap is within tolerance.

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relforms/forms.hpp"
#include "relforms/limits.hpp"
#include "relforms/numkernel.hpp"

namespace relforms {

class LinearRelation {
 public:
  /// `basis` must have 2 * dim_h rows and orthonormal columns.
  LinearRelation(Index dim_h, Matrix basis, double tol = kDefaultTol);

  /// Span of the pairs (x_k, y_k) given column-wise; orthonormalized.
  static LinearRelation from_pairs(const Matrix& x, const Matrix& y,
                                   double tol = kDefaultTol);

  Index dim_h() const noexcept { return dim_h_; }
  Index dim() const noexcept { return basis_.cols(); }
  const Matrix& basis() const noexcept { return basis_; }
  double tol() const noexcept { return tol_; }

  auto x_block() const { return basis_.topRows(dim_h_); }
  auto y_block() const { return basis_.bottomRows(dim_h_); }

  SubspaceBasis as_subspace() const { return SubspaceBasis(basis_, tol_); }

 private:
  Index dim_h_;
  Matrix basis_;
  double tol_;
};

struct SingleValuedPart {
  SubspaceBasis h1;          // A(0)^⊥
  Matrix op;                 // acts on h1 coordinates
  SubspaceBasis multivalued; // A(0)
};

struct AccretivityResult {
  bool accretive = false;
  bool m_accretive = false;
};

inline const std::vector<double> kDefaultSelfAdjointShifts{1.0, -1.0, 0.5};

/// A = { (J u, y) : M u = J^H y }, the graph associated with the triple.
LinearRelation from_form(const FormTriple& f);

/// A = { (x, y + B x) : x in H1, y in H1^⊥ } with B given in h1 coordinates.
/// With `require_hermitian`, throws NotHermitian unless B is Hermitian.
LinearRelation from_operator(const Matrix& b, const SubspaceBasis& h1,
                             bool require_hermitian = false);

/// Graph of a square matrix on all of H.
LinearRelation operator_graph(const Matrix& b, double tol = kDefaultTol);

/// A + λI.
LinearRelation shift(const LinearRelation& a, Complex lambda);
LinearRelation dagger(const LinearRelation& a);
SubspaceBasis domain(const LinearRelation& a);
SubspaceBasis range(const LinearRelation& a);
/// A(0) = { y : (0, y) in A }.
SubspaceBasis mul_part(const LinearRelation& a);

bool relations_equal(const LinearRelation& a, const LinearRelation& b, double tol);

/// Distance of the pair (x, y) to the graph.
double distance_to_relation(const LinearRelation& a, const Vector& x, const Vector& y);

/// X^H Y Hermitian within tol.
bool is_symmetric_relation(const LinearRelation& a);

/// (A - λI)^{-1}. Throws NotInvertible when λ is not in the resolvent set.
Matrix resolvent(const LinearRelation& a, Complex lambda);

/// (A + isI)^{-1} = J1 (M1 + is J1^H J1)^{-1} J1^H after restricting to
/// W(a)^⊥. Requires a symmetric triple and s != 0.
Matrix resolvent_via_form(const FormTriple& f, double s);

bool selfadjoint_check(const LinearRelation& a,
                       std::span<const double> s_list = kDefaultSelfAdjointShifts);

/// Throws NotSelfAdjoint if the relation fails selfadjoint_check.
SingleValuedPart single_valued_part(const LinearRelation& a);

/// Smallest eigenvalue of the single-valued part, +inf when A(0) = H.
double lower_bound(const LinearRelation& a);

/// e^{-tA} = 0 ⊕ e^{-tA°} in H coordinates.
Matrix semigroup(const LinearRelation& a, double t);

/// ((I + (t/n) A)^{-1})^n computed from resolvents.
Matrix euler_semigroup(const LinearRelation& a, double t, long n);

AccretivityResult accretivity_check(const LinearRelation& a);

struct ResolventTransferReport {
  // errors[k][p]: member k, probe p.
  std::vector<std::vector<double>> lambda_errors;
  std::vector<std::vector<double>> mu_errors;
  double sup_norm_lambda = 0.0;
  double sup_norm_mu = 0.0;
  bool preconditions_ok = true;
  std::string precondition_failure;
  bool lambda_converges = false;
  bool mu_converges = false;
  /// μ-errors tend to zero whenever λ-errors do.
  bool consistent = false;
};

ResolventTransferReport resolvent_transfer_check(std::span<const LinearRelation> seq,
                                                 const LinearRelation& limit,
                                                 Complex lambda, Complex mu,
                                                 std::span<const Vector> probes,
                                                 const ZeroLimitPolicy& policy = {});

std::string to_json(const LinearRelation& a);
LinearRelation relation_from_json(std::string_view text);

}  // namespace relforms
