#pragma once

// Sesquilinear forms a on V together with maps j: V -> H and j~: V -> H~,
// all expressed in orthonormal coordinates.
//
// Convention: a(u, v) = v^H M u, linear in u and conjugate-linear in v,
// matching an inner product that is linear in its first argument.

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "relforms/numkernel.hpp"

namespace relforms {

class FormTriple {
 public:
  /// `jt` defaults to the identity on V. Throws DimensionMismatch on
  /// inconsistent shapes and InvalidInput on non-finite entries.
  FormTriple(Matrix m, Matrix j, std::optional<Matrix> jt = std::nullopt,
             double tol = kDefaultTol);

  Index dim_v() const noexcept { return m_.rows(); }
  Index dim_h() const noexcept { return j_.rows(); }
  Index dim_ht() const noexcept { return jt_.rows(); }

  /// Form matrix M.
  const Matrix& m() const noexcept { return m_; }
  const Matrix& j() const noexcept { return j_; }
  const Matrix& jt() const noexcept { return jt_; }
  double tol() const noexcept { return tol_; }

  Complex operator()(const Vector& u, const Vector& v) const;

 private:
  Matrix m_;
  Matrix j_;
  Matrix jt_;
  double tol_;
};

struct EllipticityCertificate {
  double mu = 0.0;
  double omega = 0.0;
  bool satisfied = false;
};

SubspaceBasis ker_j(const FormTriple& f);

/// W(a) = ker J ∩ ker M, the space of non-uniqueness.
SubspaceBasis w_space(const FormTriple& f);

/// V(a) = { u : a(u, v) = 0 for all v in ker J }.
SubspaceBasis v_space(const FormTriple& f);

/// V(a) ∩ ker J.
SubspaceBasis v_cap_ker(const FormTriple& f);

bool is_symmetric(const FormTriple& f);

/// λ_min(Herm M) >= -tol.
bool is_accretive(const FormTriple& f);

/// mu = λ_min(Herm M + omega Jt^H Jt); satisfied iff mu > tol.
EllipticityCertificate ellipticity(const FormTriple& f, double omega);

/// Sweeps `omega_grid` with J in place of Jt and returns the first omega that
/// certifies j-ellipticity, or the best (unsatisfied) mu.
EllipticityCertificate j_ellipticity_search(const FormTriple& f,
                                            std::span<const double> omega_grid);

/// Restriction to the subspace spanned by `q`: M1 = Q^H M Q, J1 = J Q,
/// Jt1 = Jt Q.
FormTriple restrict(const FormTriple& f, const SubspaceBasis& q);

/// Restriction to V(a) ∩ (V(a) ∩ ker J)^⊥. The restricted J is injective
/// and the associated graph is unchanged.
FormTriple reduced_injective_triple(const FormTriple& f);

std::string to_json(const FormTriple& f);
FormTriple form_from_json(std::string_view text);

}  // namespace relforms
