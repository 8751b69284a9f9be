#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latticeforge/nested_code.hpp"
#include "latticeforge/report.hpp"
#include "latticeforge/rng.hpp"

namespace latticeforge {

// 1/2 log2^+ of 1 / (||a||^2 - rho (h.a)^2 / (1 + rho ||h||^2)).
double computation_rate(const Vector& h, const IntVector& a, double rho);
// 1/2 log2^+ of rho / (alpha^2 + rho ||alpha h - a||^2).
double computation_rate_at(const Vector& h, const IntVector& a, double rho, double alpha);
double optimal_alpha(const Vector& h, const IntVector& a, double rho);

struct CoefficientChoice {
    IntVector a;
    double alpha = 0.0;
    double rate = 0.0;
};

// I - rho h h^T / (1 + rho ||h||^2).
Matrix coefficient_gram(const Vector& h, double rho);

// Minimizers of a^T G a; ties are sign-normalized (first nonzero entry positive)
// and the lexicographically greatest is kept.
CoefficientChoice best_coefficients_svp(const Vector& h, double rho, const EnumerationLimits& limits = {});
CoefficientChoice best_coefficients_box(const Vector& h, double rho, int bound);

// K = 2 parity candidate sets: relay 1 uses {a1 odd, a2 even}, relay 2 {a1 even, a2 odd}, ||a||_inf <= bound.
CoefficientChoice candidate_set_choice(const Vector& h, double rho, int relay_id, int bound = 8);

enum class CoefficientStrategy { Svp, Box, CandidateSets };
CoefficientStrategy parse_strategy(const std::string& name);
std::string strategy_name(CoefficientStrategy s);
CoefficientChoice choose_coefficients(const Vector& h, double rho, CoefficientStrategy s, int relay_id, int bound);

// K sources with nested fine lattices base * F_k and common coarse lattice base * G.
class CFScenario {
  public:
    CFScenario(Lattice base, std::vector<IntMatrix> fine_maps, IntMatrix coarse_map, std::vector<Vector> channels,
               double rho);

    int sources() const { return static_cast<int>(codes_.size()); }
    int relays() const { return static_cast<int>(channels_.size()); }
    int dim() const { return base_.dim(); }
    double rho() const { return rho_; }
    const Lattice& base() const { return base_; }
    const Vector& channel(int m) const { return channels_.at(static_cast<std::size_t>(m)); }
    const IntMatrix& fine_map(int k) const { return fine_maps_.at(static_cast<std::size_t>(k)); }
    // Lambda_{k,F} / Lambda_C, and the group base / Lambda_C in which combinations live.
    const NestedCodePair& code(int k) const { return codes_.at(static_cast<std::size_t>(k)); }
    const NestedCodePair& group() const { return group_; }
    const std::vector<CosetLeader>& codebook(int k) const { return codebooks_.at(static_cast<std::size_t>(k)); }
    // Mean per-dimension power of source 1's codebook, and P / rho.
    double power() const { return power_; }
    double noise_variance() const { return power_ / rho_; }

    // Integer coordinates in the base lattice of a base-lattice point.
    IntVector base_coords(const Vector& point) const;
    IntVector codeword_coords(int k, std::int64_t message) const;

  private:
    Lattice base_;
    std::vector<IntMatrix> fine_maps_;
    IntMatrix coarse_map_;
    std::vector<Vector> channels_;
    double rho_;
    std::vector<NestedCodePair> codes_;
    NestedCodePair group_;
    std::vector<std::vector<CosetLeader>> codebooks_;
    double power_ = 1.0;
};

struct CosetPoint {
    IntVector coords;         // base-lattice coordinates of the representative
    Vector point;             // in the Voronoi cell of the coarse lattice
    std::int64_t coset = 0;   // index in base / Lambda_C
};

CosetPoint reduce_to_coset(const CFScenario& s, const IntVector& base_coords);

// y_m = sum_k h_mk x_k + z for every relay, with z ~ N(0, noise_variance I).
std::vector<Vector> cf_transmit(const CFScenario& s, const std::vector<std::int64_t>& messages, Rng& rng);
// sum_k a_k x_k reduced mod Lambda_C.
CosetPoint true_combination(const CFScenario& s, const std::vector<std::int64_t>& messages, const IntVector& a);

// Closest point of Lambda_{k_min,F} to alpha y, reduced mod Lambda_C.
CosetPoint relay_decode_sd(const CFScenario& s, int m, const Vector& y, const IntVector& a, double alpha);
CosetPoint relay_decode_sd(const CFScenario& s, int m, const Vector& y);

struct MLProfileEntry {
    IntVector lambda;  // base-lattice coordinates of sum a_k x_k (not reduced)
    double log_phi = 0.0;
};

struct MLDecision {
    CosetPoint decoded;
    IntVector lambda;
    std::vector<MLProfileEntry> profile;  // sorted by decreasing log phi
    bool flat = false;                    // phi_2 / phi_1 > 1 - 1e-3
};

MLDecision relay_decode_ml(const CFScenario& s, int m, const Vector& y, const IntVector& a,
                           std::size_t cap = 1'000'000);

struct DestinationResult {
    bool solved = false;
    std::string reason;
    int rank_defect = 0;
    std::vector<IntVector> coords;        // fine coordinates of one representative per source
    std::vector<std::int64_t> cosets;     // coset indices in the pair
};

// Solves A w = lambda over the coset group fine / coarse of the pair.
// lambdas[m] are fine-lattice coordinates of relay m's decoded combination.
DestinationResult destination_solve(const IntMatrix& a, const std::vector<IntVector>& lambdas,
                                    const NestedCodePair& pair);

struct SingularityOptions {
    int sources = 2;
    CoefficientStrategy strategy = CoefficientStrategy::Svp;
    int bound = 8;
    int threads = 0;
};

// Fraction of draws with rank A < M (M = K relays, channels N(0, I)).
SimulationReport singularity_probability(const std::vector<double>& rho_db, std::size_t trials, std::uint64_t seed,
                                         const SingularityOptions& options = {});

}  // namespace latticeforge
