#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latticeforge/number_field.hpp"
#include "latticeforge/types.hpp"

namespace latticeforge {

// (L/K, sigma, gamma) of degree n, where n is the order of sigma.
struct CyclicAlgebra {
    NumberField field;
    FieldAutomorphism sigma;
    FieldElement gamma;
    int degree() const { return sigma.order(); }
};

// Left multiplication by x = sum e^i x_i, for every embedding of L.
ConjugateMatrix left_regular_rep_conjugates(const CyclicAlgebra& alg, const std::vector<FieldElement>& x);
CMatrix left_regular_rep(const CyclicAlgebra& alg, const std::vector<FieldElement>& x);

CyclicAlgebra quaternion_algebra();  // (Q(i)/Q, conj, -1)
CyclicAlgebra golden_algebra();      // (Q(i, sqrt5)/Q(i), sqrt5 -> -sqrt5, i)

struct SpaceTimeCode {
    std::string label;
    std::vector<CMatrix> basis;
    std::vector<std::int64_t> alphabet;
    // Conjugates of each basis matrix when the entries lie in a known field; may be empty.
    std::vector<ConjugateMatrix> conjugates;

    int rank() const { return static_cast<int>(basis.size()); }
    int rows() const { return static_cast<int>(basis.front().rows()); }
    int cols() const { return static_cast<int>(basis.front().cols()); }
    CMatrix codeword(const IntVector& s) const;
    // Columns iota(B_i).
    Matrix generator() const;
    // Real symbols per channel use.
    double rate() const { return static_cast<double>(rank()) / cols(); }
};

// Validates shapes, linear independence over R and k <= 2 n_t T.
SpaceTimeCode make_code(std::string label, std::vector<CMatrix> basis, std::vector<std::int64_t> alphabet,
                        std::vector<ConjugateMatrix> conjugates = {});

SpaceTimeCode alamouti_code(std::vector<std::int64_t> alphabet = {-1, 1});
SpaceTimeCode golden_code(std::vector<std::int64_t> alphabet = {-1, 0, 1});

// diag(B, tau(B), ..., tau^{n-1}(B)) for every basis matrix.
SpaceTimeCode block_diagonal_construct(const SpaceTimeCode& code, const FieldAutomorphism& tau, int n_blocks);

// Basis {alpha(B_i, 0)} followed by {alpha(0, B_i)}, with
// alpha(X, Y) = [[X, zeta sqrt(theta') tau(Y)], [sqrt(theta') Y, tau(X)]].
CMatrix iterated_map(const CMatrix& x, const CMatrix& y, const CMatrix& tau_x, const CMatrix& tau_y, Complex zeta,
                     double theta_prime);
SpaceTimeCode iterated_construct(const SpaceTimeCode& code, const FieldAutomorphism& tau, Complex zeta,
                                 double theta_prime);
// Iterated Alamouti with tau = conj, zeta = i, theta' = 2.
SpaceTimeCode iterated_alamouti(std::vector<std::int64_t> alphabet = {-1, 1});

enum class ScanMode { Exhaustive, Differences, Random };

struct DeterminantScan {
    ScanMode mode = ScanMode::Exhaustive;
    std::size_t samples = 10'000;
    std::uint64_t seed = 1;
};

struct MinDeterminant {
    double value = 0.0;  // min |det X|^2
    IntVector argmin;
    int min_rank = 0;
    std::size_t scanned = 0;
};

MinDeterminant min_determinant(const SpaceTimeCode& code, const DeterminantScan& scan = {});

struct NormalizedDensity {
    double min_det = 0.0;  // |det|, the square root of Delta_min
    double volume = 0.0;
    double delta = 0.0;
    double eta = 0.0;
    bool degenerate = false;
};

// delta = d / vol^{1/(2n)}, eta = d^{2n} / vol with d = sqrt(Delta_min).
NormalizedDensity normalized_density(const SpaceTimeCode& code, double delta_min);
NormalizedDensity normalized_density(const SpaceTimeCode& code, const DeterminantScan& scan = {});

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};
Rational reduce(Rational r);

// disc(L/F)^n * N(gamma)^{n(n-1)}.
Rational natural_order_discriminant(std::int64_t disc, Rational gamma_norm, int n);

nlohmann::json to_json(const SpaceTimeCode& code);
SpaceTimeCode code_from_json(const nlohmann::json& j);

}  // namespace latticeforge
