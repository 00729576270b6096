#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ambc {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class Hypothesis { H0, H1 };

}  // namespace ambc
