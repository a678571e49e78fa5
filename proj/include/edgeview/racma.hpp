#pragma once

#include <vector>

#include "edgeview/linalg.hpp"

namespace edgeview::racma {

struct SeparationResult {
  Matrix X_hat;                 // N x K, entries +-1
  Matrix F_hat;                 // K x K, G ~ X_hat F_hat
  std::vector<int> assignment;  // output column -> user id, -1 while unresolved
  Vector confidence;            // |normalized preamble correlation| per column
  double residual = 0.0;        // ||G - X_hat F_hat||_F / ||G||_F
  int sweeps = 0;               // joint-diagonalization sweeps used
  double off_diagonal = 0.0;    // relative off-diagonal mass at exit
};

struct SolveOptions {
  int refinement_passes = 3;
  int max_sweeps = 100;
  double off_tolerance = 1e-10;
};

// Row n is svec(g_n g_n^T) with the upper triangle taken row by row and
// off-diagonal entries scaled by sqrt(2), so row_n . svec(w w^T) = (g_n^T w)^2.
Matrix build_quadratic_system(const Matrix& g);

// Symmetric vectorization used by build_quadratic_system, and its inverse.
Vector svec(const Matrix& s);
Matrix unsvec(const Vector& v, Index order);

// Separates +-1 sources from G ~ X F. Throws DegenerateMixture when the numerical
// rank of G is below K, UnderdeterminedSystem when N < K(K+1)/2, and
// ConditioningError when the joint diagonalization does not settle.
SeparationResult solve_mixture(const Matrix& g, Index k, const SolveOptions& options = {});

inline constexpr double kMatchThreshold = 0.6;

// Greedy preamble matching. Each column's sign is set so its correlation with
// the assigned preamble is positive. Columns whose best remaining correlation
// falls below the threshold keep assignment -1.
SeparationResult match_preambles(SeparationResult result, const Matrix& preambles,
                                 const std::vector<int>& user_ids, double threshold = kMatchThreshold);

// As match_preambles, but an unresolved column raises UnresolvedAmbiguity.
SeparationResult resolve_ambiguity(SeparationResult result, const Matrix& preambles,
                                   const std::vector<int>& user_ids, double threshold = kMatchThreshold);

}  // namespace edgeview::racma
