#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace latticeforge {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.14159265358979323846;

// Real vectorization of a complex matrix, column by column, (Re, Im) per entry.
Vector iota(const CMatrix& x);
CMatrix iota_inverse(const Vector& v, int rows, int cols);

// [[Re, -Im], [Im, Re]] per entry, so that iota(h * x) = realify(h) * iota(x) for a column x.
Matrix realify(const CMatrix& h);

}  // namespace latticeforge
