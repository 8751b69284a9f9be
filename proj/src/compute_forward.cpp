#include "latticeforge/compute_forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "latticeforge/errors.hpp"
#include "latticeforge/integer_matrix.hpp"
#include "latticeforge/parallel.hpp"

namespace latticeforge {

namespace {

void require_coefficients(const Vector& h, const IntVector& a, double rho) {
    if (h.size() != a.size()) throw ConfigError("channel and coefficient vectors must have the same length");
    if (a.isZero()) throw DomainError("coefficient vector must be nonzero");
    if (!(rho > 0)) throw DomainError("SNR must be positive");
}

IntVector sign_normalized(IntVector a) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a(i) != 0) {
            if (a(i) < 0) a = -a;
            break;
        }
    return a;
}

bool lex_greater(const IntVector& a, const IntVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a(i) != b(i)) return a(i) > b(i);
    return false;
}

// Running minimum of a^T G a with the tie rule.
struct CoefficientSelector {
    const Matrix& g;
    double best = std::numeric_limits<double>::infinity();
    IntVector a;

    void offer(const IntVector& cand) {
        Vector v = cand.cast<double>();
        double q = v.dot(g * v);
        IntVector c = sign_normalized(cand);
        if (a.size() == 0 || q < best - norm_tolerance(best)) {
            best = q;
            a = c;
        } else if (std::abs(q - best) <= norm_tolerance(best)) {
            best = std::min(best, q);
            if (lex_greater(c, a)) a = c;
        }
    }
};

CoefficientChoice finish(const Vector& h, double rho, const IntVector& a) {
    return {a, optimal_alpha(h, a, rho), computation_rate(h, a, rho)};
}

template <class Accept>
CoefficientChoice box_search(const Vector& h, double rho, int bound, Accept&& accept) {
    if (bound < 1) throw ConfigError("coefficient bound must be at least 1");
    if (!(rho > 0)) throw DomainError("SNR must be positive");
    const int k = static_cast<int>(h.size());
    Matrix g = coefficient_gram(h, rho);
    CoefficientSelector sel{g, std::numeric_limits<double>::infinity(), IntVector()};
    IntVector a = IntVector::Constant(k, -bound);
    while (true) {
        if (!a.isZero() && accept(a)) sel.offer(a);
        int pos = k - 1;
        while (pos >= 0 && a(pos) == bound) a(pos--) = -bound;
        if (pos < 0) break;
        ++a(pos);
    }
    if (sel.a.size() == 0) throw DomainError("candidate set is empty");
    return finish(h, rho, sel.a);
}

IntMatrix exact_quotient(const IntMatrix& a, const IntMatrix& b) {
    // a^{-1} b, required to be integral.
    Matrix q = to_real(a).fullPivLu().solve(to_real(b));
    IntMatrix r(q.rows(), q.cols());
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < q.cols(); ++j) r(i, j) = std::llround(q(i, j));
    if (a * r != b) throw ConfigError("lattices are not nested");
    return r;
}

}  // namespace

double computation_rate(const Vector& h, const IntVector& a, double rho) {
    require_coefficients(h, a, rho);
    Vector av = a.cast<double>();
    double ha = h.dot(av);
    double denom = av.squaredNorm() - rho * ha * ha / (1.0 + rho * h.squaredNorm());
    return std::max(0.0, -0.5 * std::log2(denom));
}

double computation_rate_at(const Vector& h, const IntVector& a, double rho, double alpha) {
    require_coefficients(h, a, rho);
    double e = (alpha * h - a.cast<double>()).squaredNorm();
    return std::max(0.0, 0.5 * std::log2(rho / (alpha * alpha + rho * e)));
}

double optimal_alpha(const Vector& h, const IntVector& a, double rho) {
    require_coefficients(h, a, rho);
    return rho * h.dot(a.cast<double>()) / (1.0 + rho * h.squaredNorm());
}

Matrix coefficient_gram(const Vector& h, double rho) {
    const auto k = h.size();
    return Matrix::Identity(k, k) - rho * h * h.transpose() / (1.0 + rho * h.squaredNorm());
}

CoefficientChoice best_coefficients_svp(const Vector& h, double rho, const EnumerationLimits& limits) {
    if (!(rho > 0)) throw DomainError("SNR must be positive");
    Matrix g = coefficient_gram(h, rho);
    Lattice lat = Lattice::from_gram(g);
    double r = lat.reduced_basis().colwise().squaredNorm().minCoeff();
    CoefficientSelector sel{g, std::numeric_limits<double>::infinity(), IntVector()};
    for (const auto& p : enumerate_by_norm(lat, r, limits))
        if (!p.coords.isZero()) sel.offer(p.coords);
    return finish(h, rho, sel.a);
}

CoefficientChoice best_coefficients_box(const Vector& h, double rho, int bound) {
    return box_search(h, rho, bound, [](const IntVector&) { return true; });
}

CoefficientChoice candidate_set_choice(const Vector& h, double rho, int relay_id, int bound) {
    if (h.size() != 2) throw ConfigError("candidate sets are defined for two sources");
    if (relay_id != 1 && relay_id != 2) throw ConfigError("relay_id must be 1 or 2");
    const int odd = relay_id - 1;
    return box_search(h, rho, bound, [&](const IntVector& a) {
        return std::llabs(a(odd)) % 2 == 1 && std::llabs(a(1 - odd)) % 2 == 0;
    });
}

CoefficientStrategy parse_strategy(const std::string& name) {
    if (name == "svp") return CoefficientStrategy::Svp;
    if (name == "box") return CoefficientStrategy::Box;
    if (name == "candidate" || name == "candidate_sets" || name == "candidates") return CoefficientStrategy::CandidateSets;
    throw ConfigError("unknown coefficient strategy: " + name);
}

std::string strategy_name(CoefficientStrategy s) {
    switch (s) {
        case CoefficientStrategy::Svp: return "svp";
        case CoefficientStrategy::Box: return "box";
        case CoefficientStrategy::CandidateSets: return "candidate_sets";
    }
    return "svp";
}

CoefficientChoice choose_coefficients(const Vector& h, double rho, CoefficientStrategy s, int relay_id, int bound) {
    switch (s) {
        case CoefficientStrategy::Svp: return best_coefficients_svp(h, rho);
        case CoefficientStrategy::Box: return best_coefficients_box(h, rho, bound);
        case CoefficientStrategy::CandidateSets: return candidate_set_choice(h, rho, relay_id, bound);
    }
    return best_coefficients_svp(h, rho);
}

CFScenario::CFScenario(Lattice base, std::vector<IntMatrix> fine_maps, IntMatrix coarse_map,
                       std::vector<Vector> channels, double rho)
    : base_(std::move(base)),
      fine_maps_(std::move(fine_maps)),
      coarse_map_(std::move(coarse_map)),
      channels_(std::move(channels)),
      rho_(rho),
      group_(base_, coarse_map_) {
    if (fine_maps_.empty()) throw ConfigError("scenario needs at least one source");
    if (!(rho_ > 0)) throw DomainError("SNR must be positive");
    const int n = base_.dim();
    const auto k = static_cast<Eigen::Index>(fine_maps_.size());
    for (const auto& f : fine_maps_)
        if (f.rows() != n || f.cols() != n || determinant(f) == 0)
            throw ConfigError("fine maps must be nonsingular n x n integer matrices");
    for (std::size_t i = 0; i + 1 < fine_maps_.size(); ++i)
        if (!divides(fine_maps_[i], fine_maps_[i + 1])) throw ConfigError("fine lattices must be nested");
    if (!divides(fine_maps_.back(), coarse_map_)) throw ConfigError("coarse lattice must lie in every fine lattice");
    for (const auto& h : channels_)
        if (h.size() != k) throw ConfigError("each channel vector needs one gain per source");
    for (const auto& f : fine_maps_) {
        codes_.emplace_back(Lattice(base_.basis() * to_real(f)), exact_quotient(f, coarse_map_));
        codebooks_.push_back(coset_leaders(codes_.back()));
    }
    double p = 0.0;
    for (const auto& l : codebooks_.front()) p += l.point.squaredNorm();
    p /= static_cast<double>(codebooks_.front().size()) * n;
    power_ = p > 0 ? p : 1.0;
}

IntVector CFScenario::base_coords(const Vector& point) const {
    Vector c = base_.basis().fullPivLu().solve(point);
    IntVector r(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) r(i) = std::llround(c(i));
    if ((base_.point(r) - point).norm() > 1e-6 * std::max(1.0, point.norm()))
        throw DomainError("point is not in the base lattice");
    return r;
}

IntVector CFScenario::codeword_coords(int k, std::int64_t message) const {
    const auto& book = codebook(k);
    if (message < 0 || message >= static_cast<std::int64_t>(book.size())) throw DomainError("message index out of range");
    return fine_map(k) * book[static_cast<std::size_t>(message)].coords;
}

CosetPoint reduce_to_coset(const CFScenario& s, const IntVector& base_coords) {
    CosetPoint c;
    c.coset = coset_index(s.group(), base_coords);
    c.point = mod_coarse(s.group(), s.base().point(base_coords));
    c.coords = s.base_coords(c.point);
    return c;
}

std::vector<Vector> cf_transmit(const CFScenario& s, const std::vector<std::int64_t>& messages, Rng& rng) {
    if (static_cast<int>(messages.size()) != s.sources()) throw ConfigError("one message per source is required");
    std::normal_distribution<double> noise(0.0, std::sqrt(s.noise_variance()));
    std::vector<Vector> out;
    for (int m = 0; m < s.relays(); ++m) {
        Vector y = Vector::Zero(s.dim());
        for (int k = 0; k < s.sources(); ++k)
            y += s.channel(m)(k) * s.base().point(s.codeword_coords(k, messages[static_cast<std::size_t>(k)]));
        for (int i = 0; i < s.dim(); ++i) y(i) += noise(rng);
        out.push_back(std::move(y));
    }
    return out;
}

CosetPoint true_combination(const CFScenario& s, const std::vector<std::int64_t>& messages, const IntVector& a) {
    if (a.size() != s.sources() || static_cast<int>(messages.size()) != s.sources())
        throw ConfigError("one coefficient and one message per source are required");
    IntVector c = IntVector::Zero(s.dim());
    for (int k = 0; k < s.sources(); ++k) c += a(k) * s.codeword_coords(k, messages[static_cast<std::size_t>(k)]);
    return reduce_to_coset(s, c);
}

CosetPoint relay_decode_sd(const CFScenario& s, int m, const Vector& y, const IntVector& a, double alpha) {
    if (y.size() != s.dim()) throw ConfigError("received vector has the wrong length");
    if (a.size() != s.sources() || a.isZero()) throw ConfigError("coefficient vector must be nonzero with one entry per source");
    (void)m;
    int kmin = 0;
    while (a(kmin) == 0) ++kmin;
    LatticePoint p = closest_vector(s.code(kmin).fine(), alpha * y);
    return reduce_to_coset(s, s.fine_map(kmin) * p.coords);
}

CosetPoint relay_decode_sd(const CFScenario& s, int m, const Vector& y) {
    CoefficientChoice c = best_coefficients_svp(s.channel(m), s.rho());
    return relay_decode_sd(s, m, y, c.a, c.alpha);
}

MLDecision relay_decode_ml(const CFScenario& s, int m, const Vector& y, const IntVector& a, std::size_t cap) {
    if (y.size() != s.dim() || a.size() != s.sources()) throw ConfigError("dimension mismatch in ML relay decoding");
    double tuples = 1.0;
    for (int k = 0; k < s.sources(); ++k) tuples *= static_cast<double>(s.codebook(k).size());
    if (tuples > static_cast<double>(cap)) throw CapacityError("codeword tuple count exceeds the ML cap");
    const Vector& h = s.channel(m);
    const double two_sigma2 = 2.0 * s.noise_variance();
    std::vector<std::vector<IntVector>> coords(static_cast<std::size_t>(s.sources()));
    std::vector<std::vector<Vector>> points(static_cast<std::size_t>(s.sources()));
    for (int k = 0; k < s.sources(); ++k)
        for (std::size_t w = 0; w < s.codebook(k).size(); ++w) {
            coords[static_cast<std::size_t>(k)].push_back(s.codeword_coords(k, static_cast<std::int64_t>(w)));
            points[static_cast<std::size_t>(k)].push_back(s.base().point(coords[static_cast<std::size_t>(k)].back()));
        }
    std::map<std::vector<std::int64_t>, double> log_phi;
    std::vector<std::size_t> idx(static_cast<std::size_t>(s.sources()), 0);
    while (true) {
        Vector x = Vector::Zero(s.dim());
        IntVector lam = IntVector::Zero(s.dim());
        for (int k = 0; k < s.sources(); ++k) {
            const auto w = idx[static_cast<std::size_t>(k)];
            x += h(k) * points[static_cast<std::size_t>(k)][w];
            lam += a(k) * coords[static_cast<std::size_t>(k)][w];
        }
        double lw = -(y - x).squaredNorm() / two_sigma2;
        std::vector<std::int64_t> key(lam.data(), lam.data() + lam.size());
        auto it = log_phi.find(key);
        if (it == log_phi.end()) {
            log_phi.emplace(std::move(key), lw);
        } else {
            double hi = std::max(it->second, lw), lo = std::min(it->second, lw);
            it->second = hi + std::log1p(std::exp(lo - hi));
        }
        int pos = s.sources() - 1;
        while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == s.codebook(pos).size()) idx[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
    }
    MLDecision d;
    for (const auto& [key, lp] : log_phi) {
        IntVector v(static_cast<Eigen::Index>(key.size()));
        for (std::size_t i = 0; i < key.size(); ++i) v(static_cast<Eigen::Index>(i)) = key[i];
        d.profile.push_back({v, lp});
    }
    std::stable_sort(d.profile.begin(), d.profile.end(),
                     [](const MLProfileEntry& x, const MLProfileEntry& z) { return x.log_phi > z.log_phi; });
    d.lambda = d.profile.front().lambda;
    d.decoded = reduce_to_coset(s, d.lambda);
    d.flat = d.profile.size() >= 2 && std::exp(d.profile[1].log_phi - d.profile[0].log_phi) > 1.0 - 1e-3;
    return d;
}

DestinationResult destination_solve(const IntMatrix& a, const std::vector<IntVector>& lambdas,
                                    const NestedCodePair& pair) {
    const int M = static_cast<int>(a.rows()), K = static_cast<int>(a.cols()), n = pair.dim();
    if (static_cast<int>(lambdas.size()) != M) throw ConfigError("one decoded combination per relay is required");
    for (const auto& l : lambdas)
        if (l.size() != n) throw ConfigError("combination coordinates have the wrong length");
    DestinationResult out;
    if (M < K) {
        out.rank_defect = K - M;
        out.reason = "fewer equations than sources";
        return out;
    }
    const int r = rank(a);
    if (r < K) {
        out.rank_defect = K - r;
        out.reason = "coefficient matrix has rank " + std::to_string(r) + " < " + std::to_string(K);
        return out;
    }
    SmithForm g = smith_normal_form(pair.subgroup());
    std::vector<std::int64_t> d(static_cast<std::size_t>(n));
    std::int64_t exponent = 1;
    for (int i = 0; i < n; ++i) {
        d[static_cast<std::size_t>(i)] = std::llabs(g.diagonal(i, i));
        exponent = std::max(exponent, d[static_cast<std::size_t>(i)]);
    }
    SmithForm sa = smith_normal_form(a);
    for (int j = 0; j < K; ++j) {
        std::int64_t sigma = sa.diagonal(j, j);
        if (gcd(sigma, exponent) != 1) {
            out.reason = "invariant factor " + std::to_string(sigma) + " of A is not invertible modulo the coset group exponent " +
                         std::to_string(exponent);
            return out;
        }
    }
    // Component i of P lambda lives in Z / d_i.
    IntMatrix lam(M, n);
    for (int m = 0; m < M; ++m) {
        IntVector y = g.left * lambdas[static_cast<std::size_t>(m)];
        for (int i = 0; i < n; ++i) lam(m, i) = floor_mod(y(i), std::max<std::int64_t>(d[static_cast<std::size_t>(i)], 1));
    }
    IntMatrix w(K, n);
    for (int i = 0; i < n; ++i) {
        const std::int64_t di = std::max<std::int64_t>(d[static_cast<std::size_t>(i)], 1);
        std::vector<std::int64_t> lp(static_cast<std::size_t>(M), 0);
        for (int j = 0; j < M; ++j)
            for (int m = 0; m < M; ++m)
                lp[static_cast<std::size_t>(j)] =
                    floor_mod(lp[static_cast<std::size_t>(j)] + floor_mod(sa.left(j, m), di) * lam(m, i), di);
        for (int j = K; j < M; ++j)
            if (lp[static_cast<std::size_t>(j)] != 0) {
                out.reason = "relay combinations are inconsistent";
                return out;
            }
        std::vector<std::int64_t> wp(static_cast<std::size_t>(K));
        for (int j = 0; j < K; ++j)
            wp[static_cast<std::size_t>(j)] =
                floor_mod(inverse_mod(floor_mod(sa.diagonal(j, j), di), di) * lp[static_cast<std::size_t>(j)], di);
        for (int k = 0; k < K; ++k) {
            std::int64_t v = 0;
            for (int j = 0; j < K; ++j) v = floor_mod(v + floor_mod(sa.right(k, j), di) * wp[static_cast<std::size_t>(j)], di);
            w(k, i) = v;
        }
    }
    IntMatrix p_inv = unimodular_inverse(g.left);
    for (int k = 0; k < K; ++k) {
        IntVector v = p_inv * IntVector(w.row(k).transpose());
        out.cosets.push_back(coset_index(pair, v));
        out.coords.push_back(std::move(v));
    }
    out.solved = true;
    return out;
}

SimulationReport singularity_probability(const std::vector<double>& rho_db, std::size_t trials, std::uint64_t seed,
                                         const SingularityOptions& opt) {
    const int K = opt.sources;
    if (K < 1) throw ConfigError("at least one source is required");
    if (trials == 0) throw ConfigError("trials must be positive");
    if (opt.strategy == CoefficientStrategy::CandidateSets && K != 2)
        throw ConfigError("candidate sets are defined for K = M = 2");
    SimulationReport report;
    report.experiment = "cf-singularity";
    report.seed = seed;
    report.config = {{"K", K},
                     {"M", K},
                     {"strategy", strategy_name(opt.strategy)},
                     {"B", opt.bound},
                     {"trials", trials},
                     {"rho_db", rho_db}};
    for (std::size_t j = 0; j < rho_db.size(); ++j) {
        const double rho = std::pow(10.0, rho_db[j] / 10.0);
        std::vector<unsigned char> singular(trials, 0);
        std::vector<double> rates(trials * static_cast<std::size_t>(K), 0.0);
        parallel_for(trials, opt.threads, [&](std::size_t t) {
            Rng rng = make_rng(seed, j, t);
            std::normal_distribution<double> g;
            IntMatrix a(K, K);
            for (int m = 0; m < K; ++m) {
                Vector h(K);
                for (int k = 0; k < K; ++k) h(k) = g(rng);
                CoefficientChoice c = choose_coefficients(h, rho, opt.strategy, m + 1, opt.bound);
                a.row(m) = c.a.transpose();
                rates[t * static_cast<std::size_t>(K) + static_cast<std::size_t>(m)] = c.rate;
            }
            singular[t] = rank(a) < K;
        });
        std::size_t count = 0;
        std::vector<double> sums(static_cast<std::size_t>(K), 0.0);
        double min_rate = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < trials; ++t) {
            count += singular[t];
            for (int m = 0; m < K; ++m) {
                double r = rates[t * static_cast<std::size_t>(K) + static_cast<std::size_t>(m)];
                sums[static_cast<std::size_t>(m)] += r;
                min_rate = std::min(min_rate, r);
            }
        }
        SimulationPoint p = make_point(rho_db[j], trials, count);
        double total = 0.0;
        for (int m = 0; m < K; ++m) {
            double mean = sums[static_cast<std::size_t>(m)] / static_cast<double>(trials);
            p.extra["mean_rate_relay" + std::to_string(m + 1)] = mean;
            total += mean;
        }
        p.extra["mean_rate"] = total / K;
        p.extra["min_rate"] = min_rate;
        report.points.push_back(std::move(p));
    }
    return report;
}

}  // namespace latticeforge
