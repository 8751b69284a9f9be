#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latticeforge/lattice.hpp"
#include "latticeforge/nested_code.hpp"
#include "latticeforge/rng.hpp"
#include "latticeforge/stc.hpp"

namespace latticeforge {

// A lattice whose points are n_t x T complex matrices sum_i z_i B_i.
class MatrixLattice {
  public:
    explicit MatrixLattice(std::vector<CMatrix> basis);
    // Real lattice vectors as n x 1 matrices.
    static MatrixLattice from_lattice(const Lattice& lat);
    static MatrixLattice from_code(const SpaceTimeCode& code) { return MatrixLattice(code.basis); }

    int rank() const { return static_cast<int>(basis_.size()); }
    int rows() const { return static_cast<int>(basis_.front().rows()); }
    int cols() const { return static_cast<int>(basis_.front().cols()); }
    const std::vector<CMatrix>& basis() const { return basis_; }
    // Columns iota(B_i).
    const Matrix& generator() const { return generator_; }
    // Isometric copy in R^rank with the same coordinates.
    const Lattice& lattice() const { return lattice_; }
    CMatrix matrix(const IntVector& coords) const;
    // Basis B' = B * map.
    MatrixLattice sublattice(const IntMatrix& map) const;

  private:
    std::vector<CMatrix> basis_;
    Matrix generator_;
    Lattice lattice_;
};

// Generator of the faded lattice, (I_T kron realify(H)) * generator.
Matrix faded_generator(const MatrixLattice& lat, const CMatrix& h);
Lattice faded_lattice(const MatrixLattice& lat, const CMatrix& h);

class WiretapCode {
  public:
    WiretapCode(MatrixLattice fine, IntMatrix subgroup);

    const MatrixLattice& fine() const { return fine_; }
    const MatrixLattice& coarse() const { return coarse_; }
    const NestedCodePair& pair() const { return pair_; }
    const std::vector<CosetLeader>& leaders() const { return leaders_; }
    std::int64_t messages() const { return pair_.index(); }

  private:
    MatrixLattice fine_, coarse_;
    NestedCodePair pair_;
    std::vector<CosetLeader> leaders_;
};

enum class Randomness { UniformBox, DiscreteGaussian };

struct RandomnessSpec {
    Randomness mode = Randomness::UniformBox;
    int box = 1;              // x_r = coarse * z with z uniform in [-box, box]^k
    double sigma_s2 = 1.0;    // discrete Gaussian parameter
};

struct EncodedWord {
    IntVector coords;  // fine-lattice coordinates of x = x_m + x_r
    Vector point;      // x in the isometric copy of the fine lattice
};

// Exact sampler for the discrete Gaussian on each coset x_m + coarse, centred at 0.
// Enumerates every coset point whose mass is not negligible (below 1e-12 in total).
class CosetGaussianSampler {
  public:
    CosetGaussianSampler(const WiretapCode& code, double sigma_s2, const EnumerationLimits& limits = {});
    EncodedWord sample(std::int64_t message, Rng& rng) const;
    // Support and normalized weights of one coset.
    const std::vector<EncodedWord>& support(std::int64_t message) const;
    const std::vector<double>& weights(std::int64_t message) const;

  private:
    std::vector<std::vector<EncodedWord>> support_;
    std::vector<std::vector<double>> weights_;
};

EncodedWord coset_encode(const WiretapCode& code, std::int64_t message, const RandomnessSpec& randomness, Rng& rng);
// Bob's decoder: closest fine point, then its coset.
std::int64_t coset_decode(const WiretapCode& code, const Vector& y);

struct EcdpBound {
    double value = 0.0;     // partial + tail
    double partial = 0.0;   // enumerated terms with |X|_F^2 <= r_max
    double tail = 0.0;      // sphere-volume estimate of the rest
    double r_max = 0.0;
    std::size_t points = 0;
    bool divergent = false;
};

struct EcdpOptions {
    // 0: grow the radius until the tail estimate is below tail_tol or the
    // expected point count would pass point_budget.
    double r_max = 0.0;
    double tail_tol = 1e-9;
    std::size_t point_budget = 200'000;
    EnumerationLimits limits;
};

// sum over X in the coarse lattice of det(I + rho_e X X^H)^{-(n_e + T)}.
EcdpBound ecdp_bound(const MatrixLattice& coarse, double rho_e, int n_e, const EcdpOptions& options = {});
inline EcdpBound ecdp_bound(const WiretapCode& code, double rho_e, int n_e, const EcdpOptions& options = {}) {
    return ecdp_bound(code.coarse(), rho_e, n_e, options);
}

struct CodingGain {
    double delta1 = 0.0;
    std::size_t count = 0;
};

CodingGain first_coding_gain(const MatrixLattice& lat, const EnumerationLimits& limits = {});

// Flatness factor of the lattice faded by a fixed channel H.
double faded_flatness(const MatrixLattice& lat, const CMatrix& h, double sigma2, const EnumerationLimits& limits = {});

struct FlatnessEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t draws = 0;
    std::size_t resampled = 0;    // draws rejected for condition number > 1e8
    std::size_t substituted = 0;  // draws where the main-term approximation replaced enumeration
};

struct FlatnessOptions {
    int n_e = 1;
    std::size_t draws = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    EnumerationLimits limits{2'000'000};
};

// Monte Carlo mean of the flatness factor of the faded lattice over CN(0,1) channels.
FlatnessEstimate expected_flatness(const MatrixLattice& lat, double sigma_e2, const FlatnessOptions& options = {});
inline FlatnessEstimate expected_flatness(const WiretapCode& code, double sigma_e2, const FlatnessOptions& options = {}) {
    return expected_flatness(code.coarse(), sigma_e2, options);
}

struct CandidateRow {
    std::string id;
    IntMatrix map;
    bool accepted = false;
    std::string reason;
    bool well_rounded = false;
    double delta1 = 0.0;
    EcdpBound ecdp;
    FlatnessEstimate eflat;
    int rank = 0;  // 1-based position by ecdp; 0 when rejected
};

struct CompareOptions {
    double rho_e = 10.0;  // Eve's noise variance is 1 / rho_e
    FlatnessOptions flatness;
    EcdpOptions ecdp;
};

// Candidates are sublattice maps of the fine lattice; rows come back ranked by ecdp,
// rejected candidates last.
std::vector<CandidateRow> wr_sublattice_compare(const MatrixLattice& fine, std::int64_t index,
                                                const std::vector<std::pair<std::string, IntMatrix>>& candidates,
                                                const CompareOptions& options = {});

nlohmann::json to_json(const EcdpBound& b);
nlohmann::json to_json(const FlatnessEstimate& f);
nlohmann::json to_json(const std::vector<CandidateRow>& rows);
// candidate_id, wr, delta1, ecdp, eflat_mean, eflat_se
std::string to_csv(const std::vector<CandidateRow>& rows);

}  // namespace latticeforge
