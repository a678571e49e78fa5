#pragma once

#include <string_view>
#include <vector>

#include "edgeview/linalg.hpp"

namespace edgeview::numerics {

inline constexpr double kSymmetryTolerance = 1e-10;

/// Real symmetric matrix with validated entries.
///
/// Construction checks that every entry is finite and that the matrix is
/// symmetric within kSymmetryTolerance relative to its largest-magnitude
/// entry; the stored entries are then exactly symmetrized.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(Matrix entries, double tolerance = kSymmetryTolerance);

  Index order() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// Eigenvalues sorted non-increasing with matching orthonormal eigenvector columns.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

/// Generalized pairs additionally carry the 2-norm condition number of B.
struct GeneralizedEigenPairs {
  Vector values;
  Matrix vectors;  // B-orthonormal columns
  double condition = 0.0;
};

// k largest eigenpairs. Each eigenvector is sign-normalized so that its
// largest-magnitude entry is positive.
EigenPairs sym_eig(const SymmetricMatrix& s, Index k);

// P = Y^T (Y Y^T + ridge I)^{-1} Y. With ridge = 0 a singular Gram raises
// RankDeficiency naming `label`.
SymmetricMatrix row_space_projector(const Matrix& y, double ridge, std::string_view label = "view");

// Default ridge: 1e-10 * trace(Y Y^T) / rows.
double default_ridge(const Matrix& y);

/// Low-rank factor F (n x m) with F F^T = Y^T (Y Y^T + ridge I)^{-1} Y.
///
/// For ridge = 0 and full row rank, F has orthonormal columns spanning the
/// row space of Y. Also returns the inverse Gram so callers can form
/// (Y Y^T + ridge I)^{-1} Y G without a second factorization.
struct ProjectorFactor {
  Matrix factor;
  Matrix gram_inverse;
};
ProjectorFactor projector_factor(const Matrix& y, double ridge, std::string_view label = "view");

// Solves A v = lambda B v for symmetric A and symmetric positive definite B.
// Values descending; vectors satisfy V^T B V = I.
GeneralizedEigenPairs gen_sym_eig(const SymmetricMatrix& a, const SymmetricMatrix& b);

// Principal angles in radians, ascending. Inputs are orthonormalized internally.
std::vector<double> principal_angles(const Matrix& u, const Matrix& v);

double max_principal_angle(const Matrix& u, const Matrix& v);

// Orthonormal basis of the column space (numerical rank by 1e-12 relative SVD cutoff).
Matrix orthonormal_basis(const Matrix& a);

// Numerical rank with singular values compared to rel_tol * sigma_max.
Index numerical_rank(const Matrix& a, double rel_tol);

// Flip each column so that its largest-magnitude entry is positive.
void normalize_signs(Matrix& vectors);

}  // namespace edgeview::numerics
