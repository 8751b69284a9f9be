#pragma once

#include <cstdint>

#include "latticeforge/types.hpp"

namespace latticeforge {

std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t floor_mod(std::int64_t a, std::int64_t m);

// Extended gcd: returns g = gcd(a, b) >= 0 with x*a + y*b = g.
std::int64_t extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y);

// Multiplicative inverse of a modulo m, or 0 when gcd(a, m) != 1.
std::int64_t inverse_mod(std::int64_t a, std::int64_t m);

// Exact determinant by fraction-free elimination. Throws on overflow.
std::int64_t determinant(const IntMatrix& a);
int rank(const IntMatrix& a);

// Hermite normal form of the lattice spanned by the columns of a nonsingular
// square matrix: lower triangular H with positive diagonal, H = A U for a
// unimodular U, entries left of the diagonal reduced into [0, H_ii).
IntMatrix hermite_normal_form(const IntMatrix& a);

// Lower triangular basis (columns) of the integer lattice spanned by the given
// generator columns together with multiple * Z^n. The caller guarantees that
// multiple * Z^n lies in the span of the generators.
IntMatrix hermite_basis(const IntMatrix& generators, std::int64_t multiple);

struct SmithForm {
    IntMatrix left;      // P, unimodular
    IntMatrix diagonal;  // D, D_ii divides D_{i+1,i+1}
    IntMatrix right;     // Q, unimodular
    // P * A * Q = D
};

SmithForm smith_normal_form(const IntMatrix& a);

// Inverse of a unimodular matrix (exact).
IntMatrix unimodular_inverse(const IntMatrix& u);

// True when A^{-1} B has integer entries (A nonsingular).
bool divides(const IntMatrix& a, const IntMatrix& b);

Matrix to_real(const IntMatrix& a);

}  // namespace latticeforge
