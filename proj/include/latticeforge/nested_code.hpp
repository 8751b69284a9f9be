#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "latticeforge/lattice.hpp"

namespace latticeforge {

// Fine lattice with a coarse sublattice given by an integer subgroup matrix
// (coarse basis = fine basis * subgroup).
class NestedCodePair {
  public:
    NestedCodePair(Lattice fine, IntMatrix subgroup);

    const Lattice& fine() const { return fine_; }
    const Lattice& coarse() const { return coarse_; }
    const IntMatrix& subgroup() const { return subgroup_; }
    std::int64_t index() const { return index_; }
    int dim() const { return fine_.dim(); }

  private:
    Lattice fine_;
    IntMatrix subgroup_;
    Lattice coarse_;
    std::int64_t index_;
};

struct CosetLeader {
    IntVector coords;  // fine-lattice coordinates
    Vector point;      // lies in the basic Voronoi cell of the coarse lattice
};

// One leader per coset, ordered by message index. The message index is the
// mixed-radix number of the Hermite residue of the coset.
std::vector<CosetLeader> coset_leaders(const NestedCodePair& pair, const EnumerationLimits& limits = {});
std::int64_t coset_index(const NestedCodePair& pair, const IntVector& fine_coords);

Vector mod_coarse(const NestedCodePair& pair, const Vector& x, const EnumerationLimits& limits = {});
double code_rate(const NestedCodePair& pair);

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

MonteCarloEstimate normalized_second_moment(const Lattice& lat, std::size_t samples, std::uint64_t seed);
// vol^{2/n} / sigma^2 at the noise level where the lattice decoding error probability equals error_prob.
double volume_to_noise_ratio(const Lattice& lat, double error_prob, std::size_t samples, std::uint64_t seed);

nlohmann::json codebook_json(const NestedCodePair& pair, const EnumerationLimits& limits = {});

}  // namespace latticeforge
