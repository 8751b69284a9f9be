#include "latticeforge/number_field.hpp"

#include <cmath>

#include "latticeforge/errors.hpp"

namespace latticeforge {

FieldElement element(const NumberField& field, const std::vector<double>& rational_coords) {
    if (static_cast<int>(rational_coords.size()) != field.degree())
        throw ConfigError("field element needs one coordinate per basis element");
    CVector c(field.degree());
    for (int i = 0; i < field.degree(); ++i) c(i) = rational_coords[static_cast<std::size_t>(i)];
    return {field.basis_images * c};
}

FieldElement operator+(const FieldElement& a, const FieldElement& b) { return {a.conj + b.conj}; }
FieldElement operator-(const FieldElement& a, const FieldElement& b) { return {a.conj - b.conj}; }
FieldElement operator*(const FieldElement& a, const FieldElement& b) { return {a.conj.cwiseProduct(b.conj)}; }
FieldElement operator*(double s, const FieldElement& a) { return {s * a.conj}; }

FieldElement FieldAutomorphism::apply(const FieldElement& x) const {
    if (x.conj.size() != static_cast<Eigen::Index>(perm.size()))
        throw ConfigError("automorphism and element belong to different fields");
    FieldElement out{CVector(x.conj.size())};
    for (std::size_t g = 0; g < perm.size(); ++g) out.conj(static_cast<Eigen::Index>(g)) = x.conj(perm[g]);
    return out;
}

FieldAutomorphism FieldAutomorphism::power(int e) const {
    FieldAutomorphism out{label + "^" + std::to_string(e), std::vector<int>(perm.size())};
    for (std::size_t g = 0; g < perm.size(); ++g) {
        int h = static_cast<int>(g);
        for (int i = 0; i < e; ++i) h = perm[static_cast<std::size_t>(h)];
        out.perm[g] = h;
    }
    return out;
}

bool FieldAutomorphism::is_identity() const {
    for (std::size_t g = 0; g < perm.size(); ++g)
        if (perm[g] != static_cast<int>(g)) return false;
    return true;
}

int FieldAutomorphism::order() const {
    for (int e = 1; e <= static_cast<int>(perm.size()); ++e)
        if (power(e).is_identity()) return e;
    throw ConfigError("automorphism permutation has no finite order");
}

ConjugateMatrix apply(const FieldAutomorphism& tau, const ConjugateMatrix& m) {
    if (m.size() != tau.perm.size()) throw ConfigError("automorphism and matrix belong to different fields");
    ConjugateMatrix out(m.size());
    for (std::size_t g = 0; g < m.size(); ++g) out[g] = m[static_cast<std::size_t>(tau.perm[g])];
    return out;
}

NumberField gaussian_field() {
    CMatrix b(2, 2);
    b << 1.0, Complex(0, 1), 1.0, Complex(0, -1);
    return {"Q(i)", b};
}

FieldAutomorphism gaussian_conjugation() { return {"conj", {1, 0}}; }

NumberField golden_field() {
    // Embedding index 2a + b: i -> (-1)^a i, sqrt5 -> (-1)^b sqrt5.
    CMatrix b(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int s = 0; s < 2; ++s) {
            Complex i(0, a == 0 ? 1 : -1);
            double t = (1.0 + (s == 0 ? 1 : -1) * std::sqrt(5.0)) / 2.0;
            int g = 2 * a + s;
            b(g, 0) = 1.0;
            b(g, 1) = i;
            b(g, 2) = t;
            b(g, 3) = i * t;
        }
    return {"Q(i,sqrt5)", b};
}

FieldAutomorphism golden_sqrt5_flip() { return {"sqrt5->-sqrt5", {1, 0, 3, 2}}; }
FieldAutomorphism golden_conjugation() { return {"conj", {2, 3, 0, 1}}; }

}  // namespace latticeforge
