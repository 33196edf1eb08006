#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace bsaomp {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

using Index = Eigen::Index;

}  // namespace bsaomp
