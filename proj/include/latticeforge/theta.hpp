#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latticeforge/lattice.hpp"

namespace latticeforge {

struct ThetaEvaluation {
    double value = 0.0;       // sum of q^{|x|^2} over |x|^2 <= cutoff
    double cutoff = 0.0;      // squared-norm cutoff
    double tail_bound = 0.0;  // rigorous bound on the omitted tail
    std::size_t points = 0;
};

// Bound on sum_{|x|^2 > cutoff} q^{|x|^2}, from N(t) <= V_n (sqrt t + mu)^n / vol.
double theta_tail_bound(const Lattice& lat, double q, double cutoff);
// Smallest cutoff (to bisection precision) whose tail bound is <= tail_tol.
double theta_cutoff(const Lattice& lat, double q, double tail_tol);
// Expected number of points with |x|^2 <= r, V_n r^{n/2} / vol.
double estimated_point_count(const Lattice& lat, double r);

ThetaEvaluation theta_truncated(const Lattice& lat, double q, double tail_tol = 1e-12,
                                const EnumerationLimits& limits = {});

struct ThetaShell {
    double norm;
    std::uint64_t count;
};

// Shell counts up to a squared-norm cutoff.
struct ThetaSeries {
    std::vector<ThetaShell> shells;
    double cutoff = 0.0;
    // Truncated value sum_{norm <= upto} count q^norm (upto < 0 means the whole series).
    double evaluate(double q, double upto = -1.0) const;
};

ThetaSeries theta_series(const Lattice& lat, double cutoff, const EnumerationLimits& limits = {});

// Jacobi theta functions theta_2, theta_3, theta_4 in the q^{n^2} convention.
double jacobi_theta(int which, double q);

// Closed-form theta series of catalog lattices ("Z<n>", "D<n>", "A2", "E8", "K12", "Leech").
double theta_closed_form(const std::string& name, double q);
// Coefficients c_m of q^m, m = 0..max_norm, of the closed form expanded as a power series.
std::vector<double> closed_form_coefficients(const std::string& name, int max_norm);

// Main term of the theta approximation for minimal norm lambda1.
double theta_main_term(int n, double volume, double lambda1, double q);

struct ThetaApproximation {
    double q = 0.0;
    double exact = 0.0;
    double main = 0.0;
    double residual = 0.0;  // |exact - main| / exact
};

ThetaApproximation theta_approximation(const Lattice& lat, double q, double tail_tol = 1e-12,
                                       const EnumerationLimits& limits = {});
nlohmann::json to_json(const ThetaApproximation& a);

// vol / (2 pi sigma^2)^{n/2} * Theta(exp(-1 / (2 sigma^2))) - 1; tail_tol bounds the error in epsilon.
double flatness_factor(const Lattice& lat, double sigma2, double tail_tol = 1e-12,
                       const EnumerationLimits& limits = {});

// sum_{x in lattice} f(x + y, sigma^2) for the centered Gaussian density f.
double lattice_gaussian_sum(const Lattice& lat, const Vector& y, double sigma2, double tail_tol = 1e-12,
                            const EnumerationLimits& limits = {});

}  // namespace latticeforge
