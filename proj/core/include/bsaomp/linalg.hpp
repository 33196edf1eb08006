#pragma once

#include "bsaomp/types.hpp"

namespace bsaomp::linalg {

/// Relative singular-value cutoff used for every pseudo-inverse in the library.
inline constexpr double kPinvCutoff = 1e-10;

struct LeastSquares {
  CMatrix solution;
  Index rank = 0;
  bool rank_deficient = false;
};

/// Minimum-norm least squares A x = B via SVD, discarding singular values
/// below cutoff * sigma_max.
LeastSquares min_norm_solve(const CMatrix& A, const CMatrix& B, double cutoff = kPinvCutoff);

/// Moore-Penrose pseudo-inverse with the same cutoff rule.
CMatrix pinv(const CMatrix& A, double cutoff = kPinvCutoff, bool* rank_deficient = nullptr);

/// Column-major vectorization: stacks the columns of X.
CVector vec(const CMatrix& X);
CMatrix unvec(const CVector& x, Index rows, Index cols);

CMatrix kron(const CMatrix& A, const CMatrix& B);
CVector kron(const CVector& a, const CVector& b);

/// Unit-norm dominant right singular vector of H.
CVector dominant_right_singular_vector(const CMatrix& H);

}  // namespace bsaomp::linalg
