#include "relforms/relation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace relforms {

LinearRelation::LinearRelation(Index dim_h, Matrix basis, double tol)
    : dim_h_(dim_h), basis_(std::move(basis)), tol_(tol) {
  if (basis_.rows() != 2 * dim_h_) {
    throw Error(ErrorKind::DimensionMismatch, "relation: basis must have 2*dim_h rows");
  }
  // Delegates the orthonormality check.
  SubspaceBasis check(basis_, tol_);
  (void)check;
}

LinearRelation LinearRelation::from_pairs(const Matrix& x, const Matrix& y, double tol) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "relation: x and y blocks differ in shape");
  }
  Matrix stacked(2 * x.rows(), x.cols());
  stacked.topRows(x.rows()) = x;
  stacked.bottomRows(y.rows()) = y;
  return LinearRelation(x.rows(), orthonormalize(stacked, tol).basis(), tol);
}

LinearRelation from_form(const FormTriple& f) {
  const Index nv = f.dim_v();
  const Index nh = f.dim_h();
  Matrix system(nv, nv + nh);
  system.leftCols(nv) = f.m();
  system.rightCols(nh) = -f.j().adjoint();
  const SubspaceBasis kernel = svd_rank(system, f.tol()).nullspace;
  const Matrix u = kernel.basis().topRows(nv);
  const Matrix y = kernel.basis().bottomRows(nh);
  return LinearRelation::from_pairs(Matrix(f.j() * u), y, f.tol());
}

LinearRelation from_operator(const Matrix& b, const SubspaceBasis& h1, bool require_hermitian) {
  if (b.rows() != h1.dim() || b.cols() != h1.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "from_operator: B must be dim(H1) square");
  }
  if (require_hermitian && !is_hermitian(b, h1.tol())) {
    throw Error(ErrorKind::NotHermitian, "from_operator: B is not Hermitian");
  }
  const Index n = h1.ambient_dim();
  const SubspaceBasis perp = orth_complement(h1);
  Matrix x = Matrix::Zero(n, n);
  Matrix y = Matrix::Zero(n, n);
  x.leftCols(h1.dim()) = h1.basis();
  y.leftCols(h1.dim()) = h1.basis() * b;
  y.rightCols(perp.dim()) = perp.basis();
  return LinearRelation::from_pairs(x, y, h1.tol());
}

LinearRelation operator_graph(const Matrix& b, double tol) {
  if (b.rows() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "operator_graph: matrix is not square");
  }
  return LinearRelation::from_pairs(Matrix::Identity(b.rows(), b.cols()), b, tol);
}

LinearRelation shift(const LinearRelation& a, Complex lambda) {
  return LinearRelation::from_pairs(a.x_block(), Matrix(a.y_block() + lambda * a.x_block()),
                                    a.tol());
}

LinearRelation dagger(const LinearRelation& a) {
  Matrix swapped(a.basis().rows(), a.dim());
  swapped.topRows(a.dim_h()) = a.y_block();
  swapped.bottomRows(a.dim_h()) = a.x_block();
  return LinearRelation(a.dim_h(), std::move(swapped), a.tol());
}

SubspaceBasis domain(const LinearRelation& a) { return orthonormalize(a.x_block(), a.tol(), 1.0); }

SubspaceBasis range(const LinearRelation& a) { return orthonormalize(a.y_block(), a.tol(), 1.0); }

SubspaceBasis mul_part(const LinearRelation& a) {
  if (a.dim() == 0) return SubspaceBasis(a.dim_h(), a.tol());
  const SubspaceBasis coeffs = svd_rank(a.x_block(), a.tol(), 1.0).nullspace;
  if (coeffs.is_zero()) return SubspaceBasis(a.dim_h(), a.tol());
  return orthonormalize(Matrix(a.y_block() * coeffs.basis()), a.tol(), 1.0);
}

bool relations_equal(const LinearRelation& a, const LinearRelation& b, double tol) {
  if (a.dim_h() != b.dim_h() || a.dim() != b.dim()) return false;
  return gap_hat(a.as_subspace(), b.as_subspace()) <= tol;
}

double distance_to_relation(const LinearRelation& a, const Vector& x, const Vector& y) {
  if (x.size() != a.dim_h() || y.size() != a.dim_h()) {
    throw Error(ErrorKind::DimensionMismatch, "distance_to_relation: vector size");
  }
  Vector pair(2 * a.dim_h());
  pair << x, y;
  return distance_to_span(a.basis(), pair);
}

bool is_symmetric_relation(const LinearRelation& a) {
  if (a.dim() == 0) return true;
  const Matrix pairing = a.x_block().adjoint() * a.y_block();
  return spectral_norm(pairing - pairing.adjoint()) <=
         a.tol() * std::max(1.0, spectral_norm(pairing));
}

namespace {

std::string format_complex(Complex z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

// Solves R * coeff = rhs for square nonsingular coeff. NotInvertible when the
// smallest singular value is at most tol * max(sigma_max, scale).
Matrix right_solve(const Matrix& rhs, const Matrix& coeff, double tol, double scale,
                   Complex lambda) {
  Eigen::BDCSVD<Matrix> svd(coeff, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double ref = std::max(sv.size() > 0 ? sv(0) : 0.0, scale);
  if (sv.size() == 0 || ref == 0.0 || sv(sv.size() - 1) <= tol * ref) {
    throw Error(ErrorKind::NotInvertible,
                "resolvent: lambda " + format_complex(lambda) + " is not in the resolvent set");
  }
  // coeff^{-1} = V S^{-1} U^H
  const Matrix inv =
      svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  return rhs * inv;
}

}  // namespace

Matrix resolvent(const LinearRelation& a, Complex lambda) {
  const Index n = a.dim_h();
  if (n == 0) return Matrix(0, 0);
  if (a.dim() != n) {
    throw Error(ErrorKind::NotInvertible,
                "resolvent: relation dimension " + std::to_string(a.dim()) +
                    " differs from dim H; lambda " + format_complex(lambda) +
                    " is not in the resolvent set");
  }
  // The basis is orthonormal, so its blocks have unit scale.
  const Matrix coeff = a.y_block() - lambda * a.x_block();
  return right_solve(a.x_block(), coeff, a.tol(), 1.0, lambda);
}

Matrix resolvent_via_form(const FormTriple& f, double s) {
  if (s == 0.0) throw Error(ErrorKind::InvalidInput, "resolvent_via_form: s must be nonzero");
  if (!is_symmetric(f)) {
    throw Error(ErrorKind::NotHermitian, "resolvent_via_form: form is not symmetric");
  }
  const FormTriple reduced = restrict(f, orth_complement(w_space(f)));
  const Index nh = f.dim_h();
  if (reduced.dim_v() == 0) return Matrix::Zero(nh, nh);
  const Matrix& j1 = reduced.j();
  const Matrix b = reduced.m() + Complex(0.0, s) * (j1.adjoint() * j1);
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= f.tol() * sv(0)) {
    throw Error(ErrorKind::InternalInvariantViolation,
                "resolvent_via_form: reduced operator is singular");
  }
  const Matrix b_inv_jh =
      svd.matrixV() * sv.cwiseInverse().asDiagonal() * (svd.matrixU().adjoint() * j1.adjoint());
  return j1 * b_inv_jh;
}

bool selfadjoint_check(const LinearRelation& a, std::span<const double> s_list) {
  if (s_list.empty()) {
    throw Error(ErrorKind::InvalidInput, "selfadjoint_check: empty shift list");
  }
  if (!is_symmetric_relation(a)) return false;
  const Index n = a.dim_h();
  if (a.dim() != n) return false;
  for (double s : s_list) {
    if (s == 0.0) throw Error(ErrorKind::InvalidInput, "selfadjoint_check: s must be nonzero");
    const Complex is(0.0, s);
    Matrix r;
    try {
      r = resolvent(a, -is);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NotInvertible) return false;
      throw;
    }
    const Matrix y = Matrix::Identity(n, n) - is * r;
    const auto rebuilt = LinearRelation::from_pairs(r, y, a.tol());
    if (!relations_equal(rebuilt, a, a.tol())) return false;
  }
  return true;
}

SingleValuedPart single_valued_part(const LinearRelation& a) {
  if (!selfadjoint_check(a)) {
    throw Error(ErrorKind::NotSelfAdjoint, "single_valued_part: relation is not self-adjoint");
  }
  SubspaceBasis multivalued = mul_part(a);
  SubspaceBasis h1 = orth_complement(multivalued);
  const Index k = h1.dim();
  if (k == 0) return SingleValuedPart{std::move(h1), Matrix(0, 0), std::move(multivalued)};

  // x ranges over H1 and A°x = P_H1 y, so B solves B X1 = Y1 in H1 coordinates.
  const Matrix x1 = h1.basis().adjoint() * a.x_block();
  const Matrix y1 = h1.basis().adjoint() * a.y_block();
  Eigen::BDCSVD<Matrix> svd(x1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  if (sv(k - 1) <= a.tol() * sv(0)) {
    throw Error(ErrorKind::InternalInvariantViolation,
                "single_valued_part: domain does not fill A(0)^perp");
  }
  Matrix b = y1 * svd.matrixV().leftCols(k) * sv.head(k).cwiseInverse().asDiagonal() *
             svd.matrixU().leftCols(k).adjoint();
  if (!is_hermitian(b, std::max(a.tol(), 1e-9))) {
    throw Error(ErrorKind::InternalInvariantViolation,
                "single_valued_part: operator part is not Hermitian");
  }
  return SingleValuedPart{std::move(h1), hermitian_part(b), std::move(multivalued)};
}

double lower_bound(const LinearRelation& a) {
  const SingleValuedPart part = single_valued_part(a);
  if (part.op.size() == 0) return std::numeric_limits<double>::infinity();
  return min_eigenvalue(part.op);
}

Matrix semigroup(const LinearRelation& a, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "semigroup: t must be positive");
  const SingleValuedPart part = single_valued_part(a);
  const Index n = a.dim_h();
  if (part.op.size() == 0) return Matrix::Zero(n, n);
  const HermitianEig eig = hermitian_eig(part.op);
  const RealVector decay = (-t * eig.eigenvalues).array().exp();
  const Matrix local =
      eig.eigenvectors * decay.asDiagonal() * eig.eigenvectors.adjoint();
  return part.h1.basis() * local * part.h1.basis().adjoint();
}

Matrix euler_semigroup(const LinearRelation& a, double t, long n) {
  if (!(t > 0.0) || n < 1) {
    throw Error(ErrorKind::InvalidInput, "euler_semigroup: need t > 0 and n >= 1");
  }
  if (!selfadjoint_check(a)) {
    throw Error(ErrorKind::NotSelfAdjoint, "euler_semigroup: relation is not self-adjoint");
  }
  const double tau = t / static_cast<double>(n);
  // (I + tau A)^{-1} = (1/tau) (A + (1/tau) I)^{-1}
  Matrix step = resolvent(a, Complex(-1.0 / tau, 0.0)) / tau;
  Matrix result = Matrix::Identity(a.dim_h(), a.dim_h());
  for (long e = n; e > 0; e >>= 1) {
    if (e & 1) result = result * step;
    if (e > 1) step = step * step;
  }
  return result;
}

AccretivityResult accretivity_check(const LinearRelation& a) {
  AccretivityResult out;
  if (a.dim() == 0) {
    out.accretive = true;
  } else {
    const Matrix pairing = a.x_block().adjoint() * a.y_block();
    out.accretive = min_eigenvalue(hermitian_part(pairing)) >= -a.tol();
  }
  if (!out.accretive || a.dim() != a.dim_h()) return out;
  if (a.dim_h() == 0) {
    out.m_accretive = true;
    return out;
  }
  const Matrix shifted = a.y_block() + a.x_block();
  out.m_accretive = svd_rank(shifted, a.tol(), 1.0).rank == a.dim_h();
  return out;
}

ResolventTransferReport resolvent_transfer_check(std::span<const LinearRelation> seq,
                                                 const LinearRelation& limit,
                                                 Complex lambda, Complex mu,
                                                 std::span<const Vector> probes,
                                                 const ZeroLimitPolicy& policy) {
  ResolventTransferReport report;
  Matrix r_lambda, r_mu;
  try {
    r_lambda = resolvent(limit, lambda);
    r_mu = resolvent(limit, mu);
  } catch (const Error& e) {
    report.preconditions_ok = false;
    report.precondition_failure = std::string("limit: ") + e.what();
    return report;
  }
  for (std::size_t k = 0; k < seq.size(); ++k) {
    Matrix rn_lambda, rn_mu;
    try {
      rn_lambda = resolvent(seq[k], lambda);
      rn_mu = resolvent(seq[k], mu);
    } catch (const Error& e) {
      report.preconditions_ok = false;
      report.precondition_failure = "member " + std::to_string(k) + ": " + e.what();
      return report;
    }
    report.sup_norm_lambda = std::max(report.sup_norm_lambda, spectral_norm(rn_lambda));
    report.sup_norm_mu = std::max(report.sup_norm_mu, spectral_norm(rn_mu));
    std::vector<double> el, em;
    for (const Vector& p : probes) {
      el.push_back(((rn_lambda - r_lambda) * p).norm());
      em.push_back(((rn_mu - r_mu) * p).norm());
    }
    report.lambda_errors.push_back(std::move(el));
    report.mu_errors.push_back(std::move(em));
  }
  if (!std::isfinite(report.sup_norm_lambda) || !std::isfinite(report.sup_norm_mu)) {
    report.preconditions_ok = false;
    report.precondition_failure = "resolvent norms are not uniformly bounded";
  }
  auto converges = [&](const std::vector<std::vector<double>>& errors) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      std::vector<double> column;
      column.reserve(errors.size());
      for (const auto& row : errors) column.push_back(row[p]);
      if (!tends_to_zero(column, policy)) return false;
    }
    return true;
  };
  report.lambda_converges = converges(report.lambda_errors);
  report.mu_converges = converges(report.mu_errors);
  report.consistent = !report.lambda_converges || report.mu_converges;
  return report;
}

}  // namespace relforms
