#include "relforms/forms.hpp"

#include <algorithm>
#include <limits>

namespace relforms {

FormTriple::FormTriple(Matrix m, Matrix j, std::optional<Matrix> jt, double tol)
    : m_(std::move(m)), j_(std::move(j)), tol_(tol) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "form: M must be square");
  }
  const Index dim_v = m_.rows();
  if (j_.cols() != dim_v) {
    throw Error(ErrorKind::DimensionMismatch, "form: J column count must equal dim V");
  }
  jt_ = jt ? std::move(*jt) : Matrix::Identity(dim_v, dim_v);
  if (jt_.cols() != dim_v) {
    throw Error(ErrorKind::DimensionMismatch, "form: Jt column count must equal dim V");
  }
  if (tol_ < 0.0) throw Error(ErrorKind::InvalidInput, "form: negative tolerance");
  require_finite(m_, "form M");
  require_finite(j_, "form J");
  require_finite(jt_, "form Jt");
}

Complex FormTriple::operator()(const Vector& u, const Vector& v) const {
  if (u.size() != dim_v() || v.size() != dim_v()) {
    throw Error(ErrorKind::DimensionMismatch, "form: argument size differs from dim V");
  }
  return v.dot(m_ * u);  // Eigen's dot conjugates the left operand
}

SubspaceBasis ker_j(const FormTriple& f) { return svd_rank(f.j(), f.tol()).nullspace; }

SubspaceBasis w_space(const FormTriple& f) {
  Matrix stacked(f.dim_h() + f.dim_v(), f.dim_v());
  stacked.topRows(f.dim_h()) = f.j();
  stacked.bottomRows(f.dim_v()) = f.m();
  return svd_rank(stacked, f.tol()).nullspace;
}

SubspaceBasis v_space(const FormTriple& f) {
  const SubspaceBasis kernel = ker_j(f);
  if (kernel.is_zero()) return SubspaceBasis::full(f.dim_v(), f.tol());
  // a(u, v) = v^H M u vanishes for all v in ker J iff K^H M u = 0.
  return svd_rank(Matrix(kernel.basis().adjoint() * f.m()), f.tol(), spectral_norm(f.m()))
      .nullspace;
}

SubspaceBasis v_cap_ker(const FormTriple& f) { return intersect(v_space(f), ker_j(f)); }

bool is_symmetric(const FormTriple& f) { return is_hermitian(f.m(), f.tol()); }

bool is_accretive(const FormTriple& f) {
  if (f.dim_v() == 0) return true;
  return min_eigenvalue(hermitian_part(f.m())) >= -f.tol();
}

namespace {

EllipticityCertificate certify(const FormTriple& f, const Matrix& map, double omega) {
  if (omega < 0.0) throw Error(ErrorKind::InvalidInput, "ellipticity: omega must be >= 0");
  if (f.dim_v() == 0) {
    return {std::numeric_limits<double>::infinity(), omega, true};
  }
  const Matrix shifted = hermitian_part(f.m()) + omega * (map.adjoint() * map);
  const double mu = min_eigenvalue(shifted);
  return {mu, omega, mu > f.tol()};
}

}  // namespace

EllipticityCertificate ellipticity(const FormTriple& f, double omega) {
  return certify(f, f.jt(), omega);
}

EllipticityCertificate j_ellipticity_search(const FormTriple& f,
                                            std::span<const double> omega_grid) {
  if (omega_grid.empty()) {
    throw Error(ErrorKind::InvalidInput, "j_ellipticity_search: empty omega grid");
  }
  EllipticityCertificate best{-std::numeric_limits<double>::infinity(), omega_grid.front(),
                              false};
  for (double omega : omega_grid) {
    const auto cert = certify(f, f.j(), omega);
    if (cert.satisfied) return cert;
    if (cert.mu > best.mu) best = cert;
  }
  return best;
}

FormTriple restrict(const FormTriple& f, const SubspaceBasis& q) {
  if (q.ambient_dim() != f.dim_v()) {
    throw Error(ErrorKind::DimensionMismatch, "restrict: subspace ambient differs from dim V");
  }
  const Matrix& b = q.basis();
  return FormTriple(Matrix(b.adjoint() * f.m() * b), Matrix(f.j() * b),
                    Matrix(f.jt() * b), f.tol());
}

FormTriple reduced_injective_triple(const FormTriple& f) {
  const SubspaceBasis va = v_space(f);
  const SubspaceBasis va_ker = intersect(va, ker_j(f));
  const SubspaceBasis v1 = intersect(va, orth_complement(va_ker));
  FormTriple reduced = restrict(f, v1);
  if (svd_rank(reduced.j(), f.tol(), spectral_norm(f.j())).rank != reduced.dim_v()) {
    throw Error(ErrorKind::InternalInvariantViolation,
                "reduced_injective_triple: restricted J is not injective");
  }
  return reduced;
}

}  // namespace relforms
