#include "relforms/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace relforms {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double orthonormality_tolerance(double tol, Index dim) {
  return std::max(tol, 1e3 * kEps * static_cast<double>(std::max<Index>(dim, 1)));
}

double stored_tol(double tol) { return tol > 0.0 ? tol : kDefaultTol; }

}  // namespace

SubspaceBasis::SubspaceBasis(Index ambient_dim, double tol)
    : ambient_dim_(ambient_dim), basis_(ambient_dim, 0), tol_(tol) {
  if (ambient_dim < 0 || tol < 0.0) {
    throw Error(ErrorKind::InvalidInput, "subspace: negative dimension or tolerance");
  }
}

SubspaceBasis::SubspaceBasis(Matrix basis, double tol)
    : ambient_dim_(basis.rows()), basis_(std::move(basis)), tol_(tol) {
  if (tol < 0.0) throw Error(ErrorKind::InvalidInput, "subspace: negative tolerance");
  if (basis_.cols() > ambient_dim_) {
    throw Error(ErrorKind::InvalidInput, "subspace: more basis columns than ambient dimension");
  }
  require_finite(basis_, "subspace basis");
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.adjoint() * basis_;
    const double err =
        (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (err > orthonormality_tolerance(tol, ambient_dim_)) {
      throw Error(ErrorKind::InvalidInput,
                  "subspace: basis columns are not orthonormal (error " +
                      std::to_string(err) + ")");
    }
  }
}

SubspaceBasis SubspaceBasis::full(Index ambient_dim, double tol) {
  return SubspaceBasis(Matrix::Identity(ambient_dim, ambient_dim), tol);
}

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw Error(ErrorKind::InvalidInput, std::string(what) + ": non-finite entries");
  }
}

RankDecomposition svd_rank(const Matrix& a, double tol, double scale) {
  require_finite(a, "svd_rank");
  if (tol < 0.0) throw Error(ErrorKind::InvalidInput, "svd_rank: negative tolerance");
  const Index rows = a.rows();
  const Index cols = a.cols();
  const double keep = stored_tol(tol);

  if (rows == 0 || cols == 0) {
    return RankDecomposition{0, 0.0, RealVector(0), SubspaceBasis(rows, keep),
                             SubspaceBasis::full(cols, keep)};
  }

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sv = svd.singularValues();
  const double ref = std::max(sv.size() > 0 ? sv(0) : 0.0, scale);
  const double threshold =
      tol > 0.0 ? tol * ref : static_cast<double>(std::max(rows, cols)) * kEps * ref;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;

  return RankDecomposition{
      rank, threshold, sv,
      SubspaceBasis(Matrix(svd.matrixU().leftCols(rank)), keep),
      SubspaceBasis(Matrix(svd.matrixV().rightCols(cols - rank)), keep)};
}

SubspaceBasis orthonormalize(const Matrix& cols, double tol, double scale) {
  return svd_rank(cols, tol, scale).range;
}

SubspaceBasis intersect(const SubspaceBasis& u, const SubspaceBasis& w) {
  if (u.ambient_dim() != w.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "intersect: ambient dimensions differ");
  }
  const Index n = u.ambient_dim();
  const double tol = std::max(u.tol(), w.tol());
  if (u.is_zero() || w.is_zero()) return SubspaceBasis(n, tol);

  Matrix stacked(2 * n, n);
  stacked.topRows(n) = Matrix::Identity(n, n) - projector(u);
  stacked.bottomRows(n) = Matrix::Identity(n, n) - projector(w);
  auto result = svd_rank(stacked, tol, 1.0).nullspace;
  // Both projectors vanish on the intersection, so its dimension cannot
  // exceed either input.
  if (result.dim() > std::min(u.dim(), w.dim())) {
    throw Error(ErrorKind::InternalInvariantViolation,
                "intersect: result larger than an operand");
  }
  return result;
}

SubspaceBasis orth_complement(const SubspaceBasis& u) {
  const Index n = u.ambient_dim();
  if (u.is_zero()) return SubspaceBasis::full(n, u.tol());
  if (u.dim() == n) return SubspaceBasis(n, u.tol());
  Eigen::HouseholderQR<Matrix> qr(u.basis());
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return SubspaceBasis(Matrix(q.rightCols(n - u.dim())), u.tol());
}

Matrix projector(const SubspaceBasis& u) {
  const Index n = u.ambient_dim();
  if (u.is_zero()) return Matrix::Zero(n, n);
  return u.basis() * u.basis().adjoint();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double gap_delta(const SubspaceBasis& m, const SubspaceBasis& n) {
  if (m.ambient_dim() != n.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "gap: ambient dimensions differ");
  }
  if (m.is_zero()) return 0.0;
  if (n.is_zero()) return 1.0;
  const Matrix residual = m.basis() - n.basis() * (n.basis().adjoint() * m.basis());
  return std::clamp(spectral_norm(residual), 0.0, 1.0);
}

double gap_hat(const SubspaceBasis& m, const SubspaceBasis& n) {
  return std::max(gap_delta(m, n), gap_delta(n, m));
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, spectral_norm(a));
  return spectral_norm(a - a.adjoint()) <= tol * scale;
}

HermitianEig hermitian_eig(const Matrix& a, double tol) {
  require_finite(a, "hermitian_eig");
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "hermitian_eig: matrix is not square");
  }
  if (!is_hermitian(a, tol)) {
    throw Error(ErrorKind::NotHermitian, "hermitian_eig: input is not Hermitian");
  }
  if (a.size() == 0) return HermitianEig{RealVector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(a));
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::InternalInvariantViolation, "hermitian_eig: solver failed");
  }
  return HermitianEig{eig.eigenvalues(), eig.eigenvectors()};
}

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(hermitian),
                                            Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

Matrix cholesky(const Matrix& g, double tol) {
  require_finite(g, "cholesky");
  if (g.rows() != g.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "cholesky: matrix is not square");
  }
  if (!is_hermitian(g, tol)) {
    throw Error(ErrorKind::NotPositiveDefinite, "cholesky: input is not Hermitian");
  }
  const Index n = g.rows();
  if (n == 0) return Matrix(0, 0);
  Eigen::LLT<Matrix> llt(hermitian_part(g));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "cholesky: matrix is not positive definite");
  }
  Matrix l = llt.matrixL();
  const double diag_scale = g.diagonal().real().cwiseAbs().maxCoeff();
  const double pivot_floor = 100.0 * kEps * static_cast<double>(n) * diag_scale;
  for (Index i = 0; i < n; ++i) {
    if (std::norm(l(i, i)) <= pivot_floor) {
      throw Error(ErrorKind::NotPositiveDefinite, "cholesky: matrix is numerically singular");
    }
  }
  return l;
}

double distance_to_span(const Matrix& basis, const Vector& v) {
  if (basis.cols() == 0) return v.norm();
  return (v - basis * (basis.adjoint() * v)).norm();
}

}  // namespace relforms
