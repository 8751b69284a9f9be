#pragma once

#include <string>
#include <vector>

#include "latticeforge/types.hpp"

namespace latticeforge {

// Galois number field given by the images of a Q-basis under every embedding.
// basis_images(g, j) = g(w_j); row 0 is the identity embedding.
struct NumberField {
    std::string label;
    CMatrix basis_images;
    int degree() const { return static_cast<int>(basis_images.cols()); }
};

// An element stored through all of its conjugates; ring operations act entrywise.
struct FieldElement {
    CVector conj;
    Complex value() const { return conj(0); }
};

FieldElement element(const NumberField& field, const std::vector<double>& rational_coords);
FieldElement operator+(const FieldElement& a, const FieldElement& b);
FieldElement operator-(const FieldElement& a, const FieldElement& b);
FieldElement operator*(const FieldElement& a, const FieldElement& b);
FieldElement operator*(double s, const FieldElement& a);

// perm[g] is the embedding g o tau, so that (tau x) under g equals x under perm[g].
struct FieldAutomorphism {
    std::string label;
    std::vector<int> perm;
    FieldElement apply(const FieldElement& x) const;
    FieldAutomorphism power(int e) const;
    bool is_identity() const;
    int order() const;
};

// Matrix over L, one complex matrix per embedding (index 0 is the identity embedding).
using ConjugateMatrix = std::vector<CMatrix>;
ConjugateMatrix apply(const FieldAutomorphism& tau, const ConjugateMatrix& m);

// Q(i) with complex conjugation.
NumberField gaussian_field();
FieldAutomorphism gaussian_conjugation();
// Q(i, sqrt 5) with Q-basis {1, i, t, i t}, t = (1 + sqrt 5) / 2.
NumberField golden_field();
FieldAutomorphism golden_sqrt5_flip();
FieldAutomorphism golden_conjugation();

}  // namespace latticeforge
