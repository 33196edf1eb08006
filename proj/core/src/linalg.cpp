#include "bsaomp/linalg.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace bsaomp::linalg {

LeastSquares min_norm_solve(const CMatrix& A, const CMatrix& B, double cutoff) {
  if (A.rows() != B.rows()) {
    throw std::invalid_argument("min_norm_solve: row mismatch");
  }
  LeastSquares out;
  Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double thresh = cutoff * smax;
  CMatrix UtB = svd.matrixU().adjoint() * B;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > thresh && s(i) > 0.0) {
      UtB.row(i) /= s(i);
      ++out.rank;
    } else {
      UtB.row(i).setZero();
    }
  }
  out.solution = svd.matrixV() * UtB;
  out.rank_deficient = out.rank < std::min(A.rows(), A.cols());
  return out;
}

CMatrix pinv(const CMatrix& A, double cutoff, bool* rank_deficient) {
  auto ls = min_norm_solve(A, CMatrix::Identity(A.rows(), A.rows()), cutoff);
  if (rank_deficient != nullptr) {
    *rank_deficient = ls.rank_deficient;
  }
  return std::move(ls.solution);
}

CVector vec(const CMatrix& X) {
  return Eigen::Map<const CVector>(X.data(), X.size());
}

CMatrix unvec(const CVector& x, Index rows, Index cols) {
  if (x.size() != rows * cols) {
    throw std::invalid_argument("unvec: size mismatch");
  }
  return Eigen::Map<const CMatrix>(x.data(), rows, cols);
}

CMatrix kron(const CMatrix& A, const CMatrix& B) {
  CMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector k(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    k.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return k;
}

CVector dominant_right_singular_vector(const CMatrix& H) {
  Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeThinV);
  if (svd.singularValues().size() == 0 || svd.singularValues()(0) == 0.0) {
    throw std::invalid_argument("dominant singular vector of a zero matrix is undefined");
  }
  return svd.matrixV().col(0);
}

}  // namespace bsaomp::linalg
