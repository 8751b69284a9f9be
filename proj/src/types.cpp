#include "latticeforge/types.hpp"

#include "latticeforge/errors.hpp"

namespace latticeforge {

Vector iota(const CMatrix& x) {
    Vector v(2 * x.size());
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < x.cols(); ++c)
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            v(k++) = x(r, c).real();
            v(k++) = x(r, c).imag();
        }
    return v;
}

CMatrix iota_inverse(const Vector& v, int rows, int cols) {
    if (v.size() != 2 * rows * cols) throw ConfigError("iota_inverse: length does not match shape");
    CMatrix x(rows, cols);
    Eigen::Index k = 0;
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            x(r, c) = Complex(v(k), v(k + 1));
            k += 2;
        }
    return x;
}

Matrix realify(const CMatrix& h) {
    Matrix out(2 * h.rows(), 2 * h.cols());
    for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
            double a = h(r, c).real(), b = h(r, c).imag();
            out(2 * r, 2 * c) = a;
            out(2 * r, 2 * c + 1) = -b;
            out(2 * r + 1, 2 * c) = b;
            out(2 * r + 1, 2 * c + 1) = a;
        }
    return out;
}

}  // namespace latticeforge
