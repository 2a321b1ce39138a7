#pragma once

// Dense complex linear algebra and subspace geometry.
//
// Every rank decision in the library goes through svd_rank. A tolerance
// `tol > 0` is relative: singular values at or below tol * sigma_max count
// as zero. `tol == 0` selects max(rows, cols) * eps * sigma_max. Callers whose
// matrix may be pure roundoff pass `scale`, the norm of the data it was built
// from; the threshold then uses max(sigma_max, scale) in place of sigma_max.

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "relforms/errors.hpp"

namespace relforms {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerance carried by subspaces, triples and relations unless overridden.
inline constexpr double kDefaultTol = 1e-10;

/// Orthonormal column basis of a subspace of C^ambient_dim.
class SubspaceBasis {
 public:
  /// The zero subspace.
  explicit SubspaceBasis(Index ambient_dim, double tol = kDefaultTol);

  /// Takes ownership of `basis`; throws InvalidInput unless the columns are
  /// orthonormal within `tol` (absolute, entrywise on basis^H basis - I).
  SubspaceBasis(Matrix basis, double tol);

  static SubspaceBasis full(Index ambient_dim, double tol = kDefaultTol);

  Index ambient_dim() const noexcept { return ambient_dim_; }
  Index dim() const noexcept { return basis_.cols(); }
  bool is_zero() const noexcept { return basis_.cols() == 0; }
  const Matrix& basis() const noexcept { return basis_; }
  double tol() const noexcept { return tol_; }

 private:
  Index ambient_dim_;
  Matrix basis_;
  double tol_;
};

struct RankDecomposition {
  Index rank = 0;
  double threshold = 0.0;
  RealVector singular_values;
  SubspaceBasis range;
  SubspaceBasis nullspace;
};

struct HermitianEig {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns
};

RankDecomposition svd_rank(const Matrix& a, double tol = 0.0, double scale = 0.0);

/// Orthonormal basis for the column space of `cols`. Dependent columns are
/// dropped by the svd_rank threshold.
SubspaceBasis orthonormalize(const Matrix& cols, double tol = 0.0, double scale = 0.0);

/// U ∩ W from the null space of the stacked complementary projectors.
SubspaceBasis intersect(const SubspaceBasis& u, const SubspaceBasis& w);

SubspaceBasis orth_complement(const SubspaceBasis& u);

/// P = B B^H.
Matrix projector(const SubspaceBasis& u);

/// δ(M, N) = ||(I - P_N) P_M||_2. Zero when M = {0}.
double gap_delta(const SubspaceBasis& m, const SubspaceBasis& n);

/// max(δ(M, N), δ(N, M)).
double gap_hat(const SubspaceBasis& m, const SubspaceBasis& n);

/// Throws NotHermitian if ||A - A^H|| > tol * max(1, ||A||).
HermitianEig hermitian_eig(const Matrix& a, double tol = kDefaultTol);

/// Lower-triangular L with L L^H = G.
Matrix cholesky(const Matrix& g, double tol = kDefaultTol);

double spectral_norm(const Matrix& a);
Matrix hermitian_part(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol);
double min_eigenvalue(const Matrix& hermitian);

/// Throws InvalidInput naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what);

/// Distance from v to span of the orthonormal columns of `basis`.
double distance_to_span(const Matrix& basis, const Vector& v);

}  // namespace relforms
