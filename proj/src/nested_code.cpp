#include "latticeforge/nested_code.hpp"

#include <cmath>
#include <string>

#include "latticeforge/integer_matrix.hpp"
#include "latticeforge/rng.hpp"

namespace latticeforge {

namespace {

Lattice build_coarse(const Lattice& fine, const IntMatrix& subgroup) {
    if (subgroup.rows() != fine.dim() || subgroup.cols() != fine.dim())
        throw ConfigError("subgroup matrix must be square with the lattice dimension");
    if (determinant(subgroup) == 0) throw RankError("subgroup matrix is singular");
    return Lattice(fine.basis() * to_real(subgroup));
}

}  // namespace

NestedCodePair::NestedCodePair(Lattice fine, IntMatrix subgroup)
    : fine_(std::move(fine)),
      subgroup_(std::move(subgroup)),
      coarse_(build_coarse(fine_, subgroup_)),
      index_(std::llabs(determinant(subgroup_))) {}

std::vector<CosetLeader> coset_leaders(const NestedCodePair& pair, const EnumerationLimits& limits) {
    if (static_cast<std::size_t>(pair.index()) > limits.max_points)
        throw CapacityError("coset count " + std::to_string(pair.index()) + " exceeds the cap");
    const int n = pair.dim();
    IntMatrix h = hermite_normal_form(pair.subgroup());
    std::vector<CosetLeader> out;
    out.reserve(static_cast<std::size_t>(pair.index()));
    IntVector z = IntVector::Zero(n);
    // Mixed radix with the last coordinate varying fastest.
    while (true) {
        Vector x = pair.fine().point(z);
        LatticePoint q = closest_vector(pair.coarse(), x, limits);
        CosetLeader leader;
        leader.coords = z - pair.subgroup() * q.coords;
        leader.point = x - q.vector;
        out.push_back(std::move(leader));
        int k = n - 1;
        while (k >= 0 && ++z(k) >= h(k, k)) {
            z(k) = 0;
            --k;
        }
        if (k < 0) break;
    }
    return out;
}

std::int64_t coset_index(const NestedCodePair& pair, const IntVector& fine_coords) {
    const int n = pair.dim();
    IntMatrix h = hermite_normal_form(pair.subgroup());
    IntVector z = fine_coords;
    for (int i = 0; i < n; ++i) {
        std::int64_t q = (z(i) - floor_mod(z(i), h(i, i))) / h(i, i);
        if (q != 0) z -= q * h.col(i);
    }
    std::int64_t idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * h(i, i) + z(i);
    return idx;
}

Vector mod_coarse(const NestedCodePair& pair, const Vector& x, const EnumerationLimits& limits) {
    return x - closest_vector(pair.coarse(), x, limits).vector;
}

double code_rate(const NestedCodePair& pair) {
    return std::log2(static_cast<double>(pair.index())) / pair.dim();
}

MonteCarloEstimate normalized_second_moment(const Lattice& lat, std::size_t samples, std::uint64_t seed) {
    if (samples < 2) throw ConfigError("second moment estimate needs at least two samples");
    const int n = lat.dim();
    Rng rng = make_rng(seed, 0x5345, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double mean = 0.0, m2 = 0.0;
    Vector c(n);
    for (std::size_t s = 0; s < samples; ++s) {
        for (int i = 0; i < n; ++i) c(i) = u(rng);
        Vector x = lat.basis() * c;
        double e = closest_vector(lat, x).norm;
        double delta = e - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (e - mean);
    }
    double denom = n * std::pow(lat.volume(), 2.0 / n);
    double sd = std::sqrt(m2 / static_cast<double>(samples - 1));
    return {mean / denom, sd / std::sqrt(static_cast<double>(samples)) / denom, samples};
}

double volume_to_noise_ratio(const Lattice& lat, double error_prob, std::size_t samples, std::uint64_t seed) {
    if (!(error_prob > 0 && error_prob < 1)) throw DomainError("error probability must lie in (0, 1)");
    if (samples == 0) throw ConfigError("volume-to-noise ratio needs samples");
    const int n = lat.dim();
    Rng rng = make_rng(seed, 0x564e52, 0);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<Vector> noise(samples, Vector(n));
    for (auto& z : noise)
        for (int i = 0; i < n; ++i) z(i) = g(rng);
    auto error_rate = [&](double sigma) {
        std::size_t errors = 0;
        for (const auto& z : noise)
            if (closest_vector(lat, sigma * z).coords.cwiseAbs().sum() != 0) ++errors;
        return static_cast<double>(errors) / static_cast<double>(samples);
    };
    double scale = std::pow(lat.volume(), 1.0 / n);
    double lo = 0.0, hi = scale;
    int guard = 0;
    while (error_rate(hi) < error_prob) {
        hi *= 2.0;
        if (++guard > 60) throw DomainError("could not bracket the target error probability");
    }
    // The empirical error rate is monotone in sigma for fixed noise draws.
    for (int i = 0; i < 50; ++i) {
        double mid = 0.5 * (lo + hi);
        if (error_rate(mid) >= error_prob)
            hi = mid;
        else
            lo = mid;
    }
    return std::pow(lat.volume(), 2.0 / n) / (hi * hi);
}

nlohmann::json codebook_json(const NestedCodePair& pair, const EnumerationLimits& limits) {
    const int n = pair.dim();
    std::vector<std::int64_t> sub;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sub.push_back(pair.subgroup()(i, j));
    nlohmann::json leaders = nlohmann::json::array();
    for (const auto& l : coset_leaders(pair, limits)) {
        std::vector<std::int64_t> coords(l.coords.data(), l.coords.data() + l.coords.size());
        std::vector<double> point(l.point.data(), l.point.data() + l.point.size());
        leaders.push_back({{"coords", coords}, {"point", point}});
    }
    return {{"n", n},
            {"index", pair.index()},
            {"rate", code_rate(pair)},
            {"fine", to_json(pair.fine())},
            {"subgroup", sub},
            {"leaders", leaders}};
}

}  // namespace latticeforge
