#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latticeforge/errors.hpp"
#include "latticeforge/types.hpp"

namespace latticeforge {

struct EnumerationLimits {
    std::size_t max_points = 10'000'000;
};

// Tolerance used when comparing squared norms.
inline double norm_tolerance(double r) { return 1e-9 * std::max(1.0, std::abs(r)); }

class Lattice {
  public:
    // Columns of `basis` are the basis vectors.
    explicit Lattice(Matrix basis);
    static Lattice from_gram(const Matrix& gram);

    int dim() const { return static_cast<int>(basis_.cols()); }
    const Matrix& basis() const { return basis_; }
    const Matrix& gram() const { return gram_; }
    double volume() const { return volume_; }
    Vector point(const IntVector& coords) const { return basis_ * coords.cast<double>(); }

    // LLL-reduced basis: reduced = basis * reduction.
    const Matrix& reduced_basis() const { return reduced_; }
    const IntMatrix& reduction() const { return transform_; }
    // Gram-Schmidt data of the reduced basis in enumeration form:
    // ||reduced * z||^2 = sum_k d_k (z_k + sum_{j>k} mu(k, j) z_j)^2.
    const Matrix& mu() const { return mu_; }
    const Vector& gs_norms() const { return gs_; }
    // Coordinates of y with respect to the reduced basis.
    Vector reduced_coordinates(const Vector& y) const;
    // Nearest-plane bound on the covering radius (not squared).
    double covering_radius_bound() const;

  private:
    Matrix basis_, gram_, reduced_, reduced_inverse_, mu_;
    IntMatrix transform_;
    Vector gs_;
    double volume_ = 0.0;
};

struct LatticePoint {
    IntVector coords;  // with respect to Lattice::basis()
    Vector vector;
    double norm = 0.0;  // squared Euclidean norm (or squared distance for CVP)
};

namespace detail {

// Depth-first enumeration of reduced-basis coordinates z with
// ||reduced * (z - t)||^2 <= radius2. `radius2` may be shrunk by the visitor.
// visit(const std::vector<std::int64_t>& z, double dist2).
template <class Visit>
std::size_t enumerate_reduced(const Lattice& lat, const Vector& t, double& radius2, std::size_t max_points,
                              Visit&& visit) {
    const int n = lat.dim();
    const Matrix& mu = lat.mu();
    const Vector& d = lat.gs_norms();
    std::vector<std::int64_t> z(n), hi(n);
    std::vector<double> c(n), partial(n + 1, 0.0);
    std::size_t count = 0;
    auto open_level = [&](int k) {
        double center = t(k);
        for (int j = k + 1; j < n; ++j) center -= mu(k, j) * (static_cast<double>(z[j]) - t(j));
        c[k] = center;
        double rem = radius2 - partial[k + 1];
        double s = rem > 0 ? std::sqrt(rem / d(k)) : 0.0;
        z[k] = static_cast<std::int64_t>(std::ceil(center - s));
        hi[k] = static_cast<std::int64_t>(std::floor(center + s));
    };
    int k = n - 1;
    open_level(k);
    while (true) {
        if (z[k] > hi[k]) {
            if (++k == n) break;
            ++z[k];
            continue;
        }
        double diff = static_cast<double>(z[k]) - c[k];
        double p = partial[k + 1] + d(k) * diff * diff;
        if (p > radius2) {
            // Outside the (possibly shrunk) ball: nothing further along this level.
            if (static_cast<double>(z[k]) > c[k]) {
                z[k] = hi[k] + 1;
            } else {
                ++z[k];
            }
            continue;
        }
        if (k == 0) {
            if (++count > max_points)
                throw CapacityError("enumeration exceeded the point cap of " + std::to_string(max_points));
            visit(z, p);
            ++z[0];
            continue;
        }
        partial[k] = p;
        --k;
        open_level(k);
    }
    return count;
}

}  // namespace detail

double volume(const Lattice& lat);

// All lattice points with squared norm <= r, sorted by norm then coordinates.
std::vector<LatticePoint> enumerate_by_norm(const Lattice& lat, double r, const EnumerationLimits& limits = {});

// Visits the squared norm of every lattice point with norm <= r (including 0).
template <class Visit>
std::size_t for_each_norm(const Lattice& lat, double r, Visit&& visit, const EnumerationLimits& limits = {}) {
    double radius2 = r + norm_tolerance(r);
    Vector t = Vector::Zero(lat.dim());
    return detail::enumerate_reduced(lat, t, radius2, limits.max_points,
                                     [&](const std::vector<std::int64_t>&, double p) { visit(p); });
}

struct MinimaProfile {
    std::vector<double> minima;          // lambda_1 .. lambda_n (squared)
    std::vector<IntVector> vectors;      // independent vectors attaining them
    std::size_t kissing = 0;             // points at norm lambda_1
};

MinimaProfile successive_minima(const Lattice& lat, const EnumerationLimits& limits = {});
bool is_well_rounded(const Lattice& lat, double tol = 1e-9, const EnumerationLimits& limits = {});

// Closest lattice point to y; ties broken by lexicographically smallest coordinates.
LatticePoint closest_vector(const Lattice& lat, const Vector& y, const EnumerationLimits& limits = {});

struct IntegerSublattice {
    Lattice lattice;         // generator basis * map
    IntMatrix map;           // columns: coordinates of the sublattice basis in the parent basis
    std::int64_t index = 0;  // |det map|
};

IntegerSublattice sublattice(const Lattice& lat, const IntMatrix& map);

// "Z<n>", "D<n>", "A2", "E8", "K12", "Leech".
Lattice catalog(const std::string& name);
std::vector<std::string> catalog_names();

// Extended binary Golay code (24 bits per word, 12 generator rows).
std::vector<std::vector<int>> golay_generator();

nlohmann::json to_json(const Lattice& lat);
Lattice lattice_from_json(const nlohmann::json& j);

// Integer LLL on column vectors; returns the unimodular transform U with reduced = basis * U.
IntMatrix lll_reduce(const Matrix& basis, double delta = 0.99);

}  // namespace latticeforge
