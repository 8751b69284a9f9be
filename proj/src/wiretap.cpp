#include "latticeforge/wiretap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "latticeforge/channel.hpp"
#include "latticeforge/errors.hpp"
#include "latticeforge/integer_matrix.hpp"
#include "latticeforge/parallel.hpp"
#include "latticeforge/report.hpp"
#include "latticeforge/theta.hpp"

namespace latticeforge {

namespace {

Matrix stack_generator(const std::vector<CMatrix>& basis) {
    if (basis.empty()) throw ConfigError("matrix lattice needs at least one basis matrix");
    const auto r = basis.front().rows(), c = basis.front().cols();
    Matrix g(2 * r * c, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].rows() != r || basis[i].cols() != c) throw ConfigError("basis matrices must share one shape");
        g.col(static_cast<Eigen::Index>(i)) = iota(basis[i]);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(g);
    qr.setThreshold(1e-10);
    if (qr.rank() != g.cols()) throw RankError("matrix lattice basis is linearly dependent");
    return g;
}

Lattice gram_lattice(const Matrix& generator) { return Lattice::from_gram(generator.transpose() * generator); }

// Heuristic tail sum_{|X|^2 > r} (1 + rho |X|^2)^{-m}, with N'(t) from the sphere-volume count.
double ecdp_tail(double r, double rho, double m, int k, double volume) {
    const double half = 0.5 * k;
    const double unit_ball = std::pow(kPi, half) / std::tgamma(half + 1.0);
    const double c = unit_ball * half / volume;
    // Integrate over u = ln t; the integrand decays like exp((k/2 - m) u).
    const double lo = std::log(r), span = 40.0 / (m - half);
    const int steps = 4000;
    const double h = span / steps;
    auto f = [&](double u) {
        double t = std::exp(u);
        return c * std::exp(half * u - m * std::log1p(rho * t));
    };
    double s = f(lo) + f(lo + span);
    for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

double log_det_term(const CMatrix& x, double rho) {
    const auto n = x.rows();
    CMatrix a = CMatrix::Identity(n, n) + rho * x * x.adjoint();
    Eigen::LLT<CMatrix> llt(a);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
    return log_det;
}

}  // namespace

MatrixLattice::MatrixLattice(std::vector<CMatrix> basis)
    : basis_(std::move(basis)), generator_(stack_generator(basis_)), lattice_(gram_lattice(generator_)) {}

MatrixLattice MatrixLattice::from_lattice(const Lattice& lat) {
    std::vector<CMatrix> basis;
    for (int i = 0; i < lat.dim(); ++i) basis.push_back(lat.basis().col(i).cast<Complex>());
    return MatrixLattice(std::move(basis));
}

CMatrix MatrixLattice::matrix(const IntVector& coords) const {
    if (coords.size() != rank()) throw ConfigError("coordinate vector does not match the lattice rank");
    CMatrix x = CMatrix::Zero(rows(), cols());
    for (int i = 0; i < rank(); ++i) x += static_cast<double>(coords(i)) * basis_[static_cast<std::size_t>(i)];
    return x;
}

MatrixLattice MatrixLattice::sublattice(const IntMatrix& map) const {
    if (map.rows() != rank() || map.cols() != rank()) throw ConfigError("sublattice map must be rank x rank");
    if (determinant(map) == 0) throw RankError("sublattice map is singular");
    std::vector<CMatrix> b;
    for (int j = 0; j < rank(); ++j) b.push_back(matrix(map.col(j)));
    return MatrixLattice(std::move(b));
}

Matrix faded_generator(const MatrixLattice& lat, const CMatrix& h) {
    if (h.cols() != lat.rows()) throw ConfigError("channel columns must match the transmit antennas");
    const Matrix hr = realify(h);
    const Eigen::Index block_in = 2 * lat.rows(), block_out = hr.rows();
    Matrix out(block_out * lat.cols(), lat.rank());
    for (int t = 0; t < lat.cols(); ++t)
        out.middleRows(t * block_out, block_out) = hr * lat.generator().middleRows(t * block_in, block_in);
    return out;
}

Lattice faded_lattice(const MatrixLattice& lat, const CMatrix& h) { return gram_lattice(faded_generator(lat, h)); }

WiretapCode::WiretapCode(MatrixLattice fine, IntMatrix subgroup)
    : fine_(std::move(fine)), coarse_(fine_.sublattice(subgroup)), pair_(fine_.lattice(), subgroup) {
    if (pair_.index() < 2) throw ConfigError("the coarse lattice must be a proper sublattice");
    leaders_ = coset_leaders(pair_);
}

CosetGaussianSampler::CosetGaussianSampler(const WiretapCode& code, double sigma_s2, const EnumerationLimits& limits) {
    if (!(sigma_s2 > 0)) throw DomainError("sigma_s^2 must be positive");
    const Lattice& coarse = code.pair().coarse();
    const double lambda1 = successive_minima(coarse, limits).minima.front();
    if (sigma_s2 < lambda1 / (2.0 * kPi))
        throw DomainError("sigma_s^2 is below the smoothing guard lambda_1 / (2 pi) of the coarse lattice");
    // Chi-square tail: a continuous Gaussian leaves mass below 1e-12 outside this radius.
    const double k = coarse.dim(), t = std::log(1e12);
    const double radius = coarse.covering_radius_bound() + std::sqrt(sigma_s2 * (k + 2.0 * std::sqrt(k * t) + 2.0 * t));
    const IntMatrix& sub = code.pair().subgroup();
    for (const auto& leader : code.leaders()) {
        std::vector<EncodedWord> pts;
        std::vector<double> dist;
        double r2 = radius * radius;
        Vector target = coarse.reduced_coordinates(-leader.point);
        detail::enumerate_reduced(coarse, target, r2, limits.max_points,
                                  [&](const std::vector<std::int64_t>& z, double p) {
                                      IntVector zr(static_cast<Eigen::Index>(z.size()));
                                      for (std::size_t i = 0; i < z.size(); ++i) zr(static_cast<Eigen::Index>(i)) = z[i];
                                      EncodedWord w;
                                      w.coords = leader.coords + sub * (coarse.reduction() * zr);
                                      w.point = code.fine().lattice().point(w.coords);
                                      pts.push_back(std::move(w));
                                      dist.push_back(p);
                                  });
        double lo = *std::min_element(dist.begin(), dist.end());
        std::vector<double> w(dist.size());
        double total = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) total += w[i] = std::exp(-(dist[i] - lo) / (2.0 * sigma_s2));
        for (auto& v : w) v /= total;
        support_.push_back(std::move(pts));
        weights_.push_back(std::move(w));
    }
}

const std::vector<EncodedWord>& CosetGaussianSampler::support(std::int64_t message) const {
    if (message < 0 || message >= static_cast<std::int64_t>(support_.size())) throw DomainError("message index out of range");
    return support_[static_cast<std::size_t>(message)];
}

const std::vector<double>& CosetGaussianSampler::weights(std::int64_t message) const {
    support(message);
    return weights_[static_cast<std::size_t>(message)];
}

EncodedWord CosetGaussianSampler::sample(std::int64_t message, Rng& rng) const {
    const auto& pts = support(message);
    const auto& w = weights_[static_cast<std::size_t>(message)];
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t i = 0; i < w.size(); ++i) {
        u -= w[i];
        if (u < 0) return pts[i];
    }
    return pts.back();
}

EncodedWord coset_encode(const WiretapCode& code, std::int64_t message, const RandomnessSpec& randomness, Rng& rng) {
    if (message < 0 || message >= code.messages()) throw DomainError("message index out of range");
    if (randomness.mode == Randomness::DiscreteGaussian)
        return CosetGaussianSampler(code, randomness.sigma_s2).sample(message, rng);
    if (randomness.box < 0) throw ConfigError("randomness box must be non-negative");
    const int k = code.fine().rank();
    std::uniform_int_distribution<std::int64_t> d(-randomness.box, randomness.box);
    IntVector z(k);
    for (int i = 0; i < k; ++i) z(i) = d(rng);
    EncodedWord w;
    w.coords = code.leaders()[static_cast<std::size_t>(message)].coords + code.pair().subgroup() * z;
    w.point = code.fine().lattice().point(w.coords);
    return w;
}

std::int64_t coset_decode(const WiretapCode& code, const Vector& y) {
    return coset_index(code.pair(), closest_vector(code.fine().lattice(), y).coords);
}

EcdpBound ecdp_bound(const MatrixLattice& coarse, double rho_e, int n_e, const EcdpOptions& options) {
    if (rho_e < 0) throw DomainError("Eve's SNR must be non-negative");
    if (n_e < 1) throw ConfigError("Eve needs at least one antenna");
    EcdpBound out;
    const int k = coarse.rank();
    const double m = n_e + coarse.cols();
    if (rho_e == 0.0 || m <= 0.5 * k) {
        out.value = out.partial = out.tail = std::numeric_limits<double>::infinity();
        out.divergent = true;
        return out;
    }
    const Lattice& lat = coarse.lattice();
    double r = options.r_max;
    if (r <= 0) {
        r = lat.reduced_basis().colwise().squaredNorm().maxCoeff();
        for (int i = 0; i < 200 && ecdp_tail(r, rho_e, m, k, lat.volume()) > options.tail_tol &&
                        estimated_point_count(lat, 1.25 * r) <= static_cast<double>(options.point_budget);
             ++i)
            r *= 1.25;
    }
    out.r_max = r;
    double radius2 = r + norm_tolerance(r);
    const Vector origin = Vector::Zero(k);
    std::vector<double> terms;
    detail::enumerate_reduced(lat, origin, radius2, options.limits.max_points,
                              [&](const std::vector<std::int64_t>& z, double) {
                                  IntVector zr(k);
                                  for (int i = 0; i < k; ++i) zr(i) = z[static_cast<std::size_t>(i)];
                                  CMatrix x = coarse.matrix(lat.reduction() * zr);
                                  terms.push_back(std::exp(-m * log_det_term(x, rho_e)));
                              });
    // Sum small terms first.
    std::sort(terms.begin(), terms.end());
    for (double t : terms) out.partial += t;
    out.points = terms.size();
    out.tail = ecdp_tail(r, rho_e, m, k, lat.volume());
    out.value = out.partial + out.tail;
    return out;
}

CodingGain first_coding_gain(const MatrixLattice& lat, const EnumerationLimits& limits) {
    MinimaProfile p = successive_minima(lat.lattice(), limits);
    return {p.minima.front(), p.kissing};
}

double faded_flatness(const MatrixLattice& lat, const CMatrix& h, double sigma2, const EnumerationLimits& limits) {
    return flatness_factor(faded_lattice(lat, h), sigma2, 1e-9, limits);
}

FlatnessEstimate expected_flatness(const MatrixLattice& lat, double sigma_e2, const FlatnessOptions& options) {
    if (options.draws < 100) throw ConfigError("expected flatness needs at least 100 channel draws");
    if (!(sigma_e2 > 0)) throw DomainError("sigma_e^2 must be positive");
    if (2 * options.n_e * lat.cols() < lat.rank())
        throw ConfigError("the faded lattice cannot have full rank with this many receive antennas");
    const std::size_t n = options.draws;
    std::vector<double> eps(n);
    std::vector<std::size_t> resampled(n, 0);
    std::vector<char> substituted(n, 0);
    parallel_for(n, options.threads, [&](std::size_t j) {
        Rng rng = make_rng(options.seed, 0, j);
        Matrix f;
        for (int attempt = 0;; ++attempt) {
            if (attempt == 1000) throw RankError("could not draw a well-conditioned channel");
            CMatrix h = complex_gaussian(options.n_e, lat.rows(), 1.0, rng);
            f = faded_generator(lat, h);
            Eigen::JacobiSVD<Matrix> svd(f);
            const Vector& s = svd.singularValues();
            if (s(s.size() - 1) > 0 && s(0) / s(s.size() - 1) <= 1e8) break;
            ++resampled[j];
        }
        Lattice faded = gram_lattice(f);
        try {
            eps[j] = flatness_factor(faded, sigma_e2, 1e-9, options.limits);
        } catch (const CapacityError&) {
            const int k = faded.dim();
            const double lambda1 = successive_minima(faded, options.limits).minima.front();
            const double q = std::exp(-1.0 / (2.0 * sigma_e2));
            const double scale = faded.volume() / std::pow(2.0 * kPi * sigma_e2, 0.5 * k);
            eps[j] = std::max(0.0, scale * theta_main_term(k, faded.volume(), lambda1, q) - 1.0);
            substituted[j] = 1;
        }
    });
    FlatnessEstimate out;
    out.draws = n;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sum += eps[j];
        out.resampled += resampled[j];
        out.substituted += static_cast<std::size_t>(substituted[j]);
    }
    out.mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double e : eps) ss += (e - out.mean) * (e - out.mean);
    out.std_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

std::vector<CandidateRow> wr_sublattice_compare(const MatrixLattice& fine, std::int64_t index,
                                                const std::vector<std::pair<std::string, IntMatrix>>& candidates,
                                                const CompareOptions& options) {
    if (!(options.rho_e > 0)) throw DomainError("Eve's SNR must be positive");
    std::vector<CandidateRow> rows;
    for (const auto& [id, map] : candidates) {
        CandidateRow row;
        row.id = id;
        row.map = map;
        if (map.rows() != fine.rank() || map.cols() != fine.rank()) {
            row.reason = "map is not rank x rank";
        } else if (std::llabs(determinant(map)) != index) {
            row.reason = "index " + std::to_string(std::llabs(determinant(map))) + " does not match " + std::to_string(index);
        } else {
            MatrixLattice sub = fine.sublattice(map);
            row.accepted = true;
            row.well_rounded = is_well_rounded(sub.lattice(), 1e-9);
            row.delta1 = first_coding_gain(sub).delta1;
            row.ecdp = ecdp_bound(sub, options.rho_e, options.flatness.n_e, options.ecdp);
            row.eflat = expected_flatness(sub, 1.0 / options.rho_e, options.flatness);
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CandidateRow& a, const CandidateRow& b) {
        if (a.accepted != b.accepted) return a.accepted;
        return a.accepted && a.ecdp.value < b.ecdp.value;
    });
    int r = 0;
    for (auto& row : rows)
        if (row.accepted) row.rank = ++r;
    return rows;
}

nlohmann::json to_json(const EcdpBound& b) {
    nlohmann::json j{{"divergent", b.divergent}, {"r_max", b.r_max}, {"points", b.points}};
    if (b.divergent) {
        j["value"] = nullptr;
    } else {
        j["value"] = b.value;
        j["partial"] = b.partial;
        j["tail_estimate"] = b.tail;
    }
    return j;
}

nlohmann::json to_json(const FlatnessEstimate& f) {
    return {{"mean", f.mean}, {"std_error", f.std_error}, {"draws", f.draws}, {"resampled", f.resampled},
            {"substituted", f.substituted}};
}

nlohmann::json to_json(const std::vector<CandidateRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        std::vector<std::vector<std::int64_t>> m;
        for (Eigen::Index i = 0; i < r.map.rows(); ++i) {
            std::vector<std::int64_t> row;
            for (Eigen::Index j = 0; j < r.map.cols(); ++j) row.push_back(r.map(i, j));
            m.push_back(row);
        }
        nlohmann::json j{{"candidate_id", r.id}, {"map", m}, {"accepted", r.accepted}};
        if (!r.accepted) {
            j["reason"] = r.reason;
        } else {
            j["rank"] = r.rank;
            j["wr"] = r.well_rounded;
            j["delta1"] = r.delta1;
            j["ecdp"] = to_json(r.ecdp);
            j["eflat"] = to_json(r.eflat);
        }
        out.push_back(j);
    }
    return out;
}

std::string to_csv(const std::vector<CandidateRow>& rows) {
    std::ostringstream os;
    os << "candidate_id,wr,delta1,ecdp,eflat_mean,eflat_se\n";
    for (const auto& r : rows) {
        os << r.id << ',';
        if (!r.accepted) {
            os << ",,,,\n";
            continue;
        }
        os << (r.well_rounded ? "true" : "false") << ',' << format_double(r.delta1) << ','
           << (r.ecdp.divergent ? std::string("inf") : format_double(r.ecdp.value)) << ','
           << format_double(r.eflat.mean) << ',' << format_double(r.eflat.std_error) << '\n';
    }
    return os.str();
}

}  // namespace latticeforge
