#include "latticeforge/integer_matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

#include "latticeforge/errors.hpp"

namespace latticeforge {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("integer overflow in exact arithmetic");
    return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw CapacityError("integer overflow in exact arithmetic");
    return r;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
    a = std::llabs(a);
    b = std::llabs(b);
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    std::int64_t x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        std::int64_t q = a / b;
        std::int64_t t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
    std::int64_t x, y;
    if (extended_gcd(floor_mod(a, m), m, x, y) != 1) return 0;
    return floor_mod(x, m);
}

std::int64_t determinant(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw ConfigError("determinant of a non-square matrix");
    const int n = static_cast<int>(a.rows());
    if (n == 0) return 1;
    std::vector<__int128> m(a.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i * n + j] = a(i, j);
    auto at = [&](int i, int j) -> __int128& { return m[i * n + j]; };
    __int128 prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (at(k, k) == 0) {
            int swap = -1;
            for (int i = k + 1; i < n; ++i)
                if (at(i, k) != 0) {
                    swap = i;
                    break;
                }
            if (swap < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(swap, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                __int128 v = at(i, j) * at(k, k) - at(i, k) * at(k, j);
                at(i, j) = v / prev;
                if (at(i, j) > INT64_MAX || at(i, j) < -INT64_MAX)
                    throw CapacityError("integer overflow in exact determinant");
            }
        }
        prev = at(k, k);
    }
    __int128 d = at(n - 1, n - 1) * sign;
    if (d > INT64_MAX || d < -INT64_MAX) throw CapacityError("integer overflow in exact determinant");
    return static_cast<std::int64_t>(d);
}

int rank(const IntMatrix& a) {
    IntMatrix m = a;
    const int rows = static_cast<int>(m.rows()), cols = static_cast<int>(m.cols());
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m(i, c) != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        m.row(r).swap(m.row(piv));
        for (int i = r + 1; i < rows; ++i) {
            if (m(i, c) == 0) continue;
            std::int64_t g = gcd(m(r, c), m(i, c));
            std::int64_t fr = m(i, c) / g, fi = m(r, c) / g;
            std::int64_t rowgcd = 0;
            for (int j = 0; j < cols; ++j) {
                m(i, j) = checked_add(checked_mul(m(i, j), fi), -checked_mul(m(r, j), fr));
                rowgcd = gcd(rowgcd, m(i, j));
            }
            if (rowgcd > 1)
                for (int j = 0; j < cols; ++j) m(i, j) /= rowgcd;
        }
        ++r;
    }
    return r;
}

IntMatrix hermite_basis(const IntMatrix& generators, std::int64_t multiple) {
    const int n = static_cast<int>(generators.rows());
    if (multiple <= 0) throw ConfigError("hermite_basis needs a positive multiple");
    // Row-oriented working copy: row i has zeros before column i.
    IntMatrix h = IntMatrix::Identity(n, n) * multiple;
    auto reduce_tail = [&](IntVector& v, int from) {
        for (int j = from; j < n; ++j) {
            std::int64_t d = h(j, j);
            std::int64_t q = (v(j) - floor_mod(v(j), d)) / d;
            if (q != 0)
                for (int c = j; c < n; ++c) v(c) = checked_add(v(c), -checked_mul(q, h(j, c)));
        }
    };
    for (int g = 0; g < generators.cols(); ++g) {
        IntVector v = generators.col(g);
        for (int i = 0; i < n; ++i) {
            if (v(i) == 0) continue;
            std::int64_t x, y;
            std::int64_t d = extended_gcd(h(i, i), v(i), x, y);
            std::int64_t a = h(i, i) / d, b = v(i) / d;
            IntVector row = h.row(i).transpose();
            IntVector fresh(n), rest(n);
            for (int c = 0; c < n; ++c) {
                fresh(c) = checked_add(checked_mul(x, row(c)), checked_mul(y, v(c)));
                rest(c) = checked_add(checked_mul(a, v(c)), -checked_mul(b, row(c)));
            }
            reduce_tail(fresh, i + 1);
            h.row(i) = fresh.transpose();
            reduce_tail(rest, i + 1);
            v = rest;
        }
    }
    for (int i = 1; i < n; ++i) {
        for (int r = 0; r < i; ++r) {
            std::int64_t d = h(i, i);
            std::int64_t q = (h(r, i) - floor_mod(h(r, i), d)) / d;
            if (q != 0)
                for (int c = i; c < n; ++c) h(r, c) = checked_add(h(r, c), -checked_mul(q, h(i, c)));
        }
    }
    return h.transpose();
}

IntMatrix hermite_normal_form(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw ConfigError("hermite_normal_form needs a square matrix");
    std::int64_t d = std::llabs(determinant(a));
    if (d == 0) throw RankError("hermite_normal_form of a singular matrix");
    return hermite_basis(a, d);
}

SmithForm smith_normal_form(const IntMatrix& a) {
    const int m = static_cast<int>(a.rows()), n = static_cast<int>(a.cols());
    IntMatrix d = a;
    IntMatrix p = IntMatrix::Identity(m, m);
    IntMatrix q = IntMatrix::Identity(n, n);
    auto row_op = [&](int target, int source, std::int64_t k) {  // row_target -= k row_source
        for (int c = 0; c < n; ++c) d(target, c) = checked_add(d(target, c), -checked_mul(k, d(source, c)));
        for (int c = 0; c < m; ++c) p(target, c) = checked_add(p(target, c), -checked_mul(k, p(source, c)));
    };
    auto col_op = [&](int target, int source, std::int64_t k) {  // col_target -= k col_source
        for (int r = 0; r < m; ++r) d(r, target) = checked_add(d(r, target), -checked_mul(k, d(r, source)));
        for (int r = 0; r < n; ++r) q(r, target) = checked_add(q(r, target), -checked_mul(k, q(r, source)));
    };
    for (int t = 0; t < std::min(m, n); ++t) {
        while (true) {
            int pi = -1, pj = -1;
            for (int i = t; i < m; ++i)
                for (int j = t; j < n; ++j)
                    if (d(i, j) != 0 && (pi < 0 || std::llabs(d(i, j)) < std::llabs(d(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) break;
            if (pi != t) {
                d.row(t).swap(d.row(pi));
                p.row(t).swap(p.row(pi));
            }
            if (pj != t) {
                d.col(t).swap(d.col(pj));
                q.col(t).swap(q.col(pj));
            }
            bool clean = true;
            for (int i = t + 1; i < m; ++i) {
                if (d(i, t) == 0) continue;
                row_op(i, t, d(i, t) / d(t, t));
                if (d(i, t) != 0) clean = false;
            }
            for (int j = t + 1; j < n; ++j) {
                if (d(t, j) == 0) continue;
                col_op(j, t, d(t, j) / d(t, t));
                if (d(t, j) != 0) clean = false;
            }
            if (!clean) continue;
            int bad = -1;
            for (int i = t + 1; i < m && bad < 0; ++i)
                for (int j = t + 1; j < n; ++j)
                    if (d(i, j) % d(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad >= 0) {
                row_op(t, bad, -1);
                continue;
            }
            if (d(t, t) < 0) {
                d.row(t) *= -1;
                p.row(t) *= -1;
            }
            break;
        }
    }
    return {p, d, q};
}

IntMatrix unimodular_inverse(const IntMatrix& u) {
    const int n = static_cast<int>(u.rows());
    Matrix inv = to_real(u).inverse();
    IntMatrix r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = static_cast<std::int64_t>(std::llround(inv(i, j)));
    if ((u * r) != IntMatrix::Identity(n, n)) throw RankError("matrix is not unimodular");
    return r;
}

bool divides(const IntMatrix& a, const IntMatrix& b) {
    Matrix x = to_real(a).fullPivLu().solve(to_real(b));
    IntMatrix r(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) {
            double v = std::round(x(i, j));
            if (std::abs(v - x(i, j)) > 1e-6) return false;
            r(i, j) = static_cast<std::int64_t>(v);
        }
    return (a * r) == b;
}

Matrix to_real(const IntMatrix& a) { return a.cast<double>(); }

}  // namespace latticeforge
