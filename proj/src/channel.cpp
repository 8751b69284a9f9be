#include "latticeforge/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "latticeforge/errors.hpp"
#include "latticeforge/parallel.hpp"

namespace latticeforge {

namespace {

struct SchnorrEuchner {
    const Matrix& r;
    const Vector& z;
    const std::vector<std::int64_t>& alphabet;
    std::vector<std::int64_t> cur, best;
    double best_dist = std::numeric_limits<double>::infinity();

    void search(int level, double partial) {
        if (level < 0) {
            if (partial < best_dist) {
                best_dist = partial;
                best = cur;
            }
            return;
        }
        const int k = static_cast<int>(cur.size());
        double c = z(level);
        for (int j = level + 1; j < k; ++j) c -= r(level, j) * static_cast<double>(cur[static_cast<std::size_t>(j)]);
        const double rll = r(level, level);
        std::vector<std::pair<double, std::int64_t>> cand;
        cand.reserve(alphabet.size());
        for (auto s : alphabet) {
            double e = c - rll * static_cast<double>(s);
            cand.emplace_back(e * e, s);
        }
        std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [e, s] : cand) {
            double d = partial + e;
            if (d >= best_dist) break;
            cur[static_cast<std::size_t>(level)] = s;
            search(level - 1, d);
        }
    }
};

}  // namespace

CMatrix complex_gaussian(int rows, int cols, double variance, Rng& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    CMatrix m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            double re = g(rng);
            double im = g(rng);
            m(r, c) = Complex(re, im);
        }
    return m;
}

ChannelRealization sample_channel(int n_r, int n_t, double sigma_h2, Rng& rng, double snr) {
    if (!(sigma_h2 >= 0)) throw DomainError("channel variance must be non-negative");
    if (n_r < 1 || n_t < 1) throw ConfigError("channel dimensions must be positive");
    return {complex_gaussian(n_r, n_t, 2.0 * sigma_h2, rng), sigma_h2, snr};
}

CMatrix transmit(const SpaceTimeCode& code, const IntVector& coords, const CMatrix& h, double sigma_n2, Rng& rng) {
    if (h.cols() != code.rows()) throw ConfigError("channel columns must equal the number of transmit antennas");
    CMatrix y = h * code.codeword(coords);
    if (sigma_n2 > 0) y += complex_gaussian(static_cast<int>(h.rows()), code.cols(), sigma_n2, rng);
    return y;
}

double average_power(const SpaceTimeCode& code) {
    double s2 = 0.0;
    for (auto s : code.alphabet) s2 += static_cast<double>(s * s);
    s2 /= static_cast<double>(code.alphabet.size());
    double total = 0.0;
    for (const auto& b : code.basis) total += b.squaredNorm();
    return s2 * total / code.cols();
}

IntVector sphere_decode_real(const Matrix& g, const Vector& y, const std::vector<std::int64_t>& alphabet) {
    const int k = static_cast<int>(g.cols());
    if (g.rows() != y.size()) throw ConfigError("received vector does not match the generator");
    if (g.rows() < k) throw RankError("generator has fewer rows than symbols; increase the number of receive antennas");
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Vector z = (qr.householderQ().adjoint() * y).head(k);
    const double scale = std::max(1.0, g.colwise().norm().maxCoeff());
    for (int i = 0; i < k; ++i)
        if (std::abs(r(i, i)) < 1e-10 * scale)
            throw RankError("effective generator is rank deficient; increase the number of receive antennas");
    SchnorrEuchner se{r, z, alphabet, std::vector<std::int64_t>(static_cast<std::size_t>(k)), {}};
    se.search(k - 1, 0.0);
    IntVector out(k);
    for (int i = 0; i < k; ++i) out(i) = se.best[static_cast<std::size_t>(i)];
    return out;
}

IntVector sphere_decode(const SpaceTimeCode& code, const CMatrix& h, const CMatrix& y) {
    if (h.cols() != code.rows() || y.rows() != h.rows() || y.cols() != code.cols())
        throw ConfigError("channel, code and received matrix dimensions do not match");
    Matrix g(2 * h.rows() * code.cols(), code.rank());
    for (int i = 0; i < code.rank(); ++i) g.col(i) = iota(h * code.basis[static_cast<std::size_t>(i)]);
    return sphere_decode_real(g, iota(y), code.alphabet);
}

AFRelayFrame sample_af_frame(int relays, int n_t, int n_R, int n_r, double rho1, double rho2, double rho3,
                             double rho1p, Rng& rng) {
    if (relays < 1 || n_t < 1 || n_R < 1 || n_r < 1) throw ConfigError("AF dimensions must be positive");
    if (n_R > n_t) throw ConfigError("relays may not have more antennas than the source");
    AFRelayFrame f{relays, n_t, n_R, n_r, rho1, rho2, rho3, rho1p, complex_gaussian(n_r, n_t, 1.0, rng), {}, {}, {}};
    const double beta = 1.0 / std::sqrt(1.0 + rho1p * rho1p * n_t);
    for (int m = 0; m < relays; ++m) {
        f.h_rm.push_back(complex_gaussian(n_R, n_t, 1.0, rng));
        f.h_dm.push_back(complex_gaussian(n_r, n_R, 1.0, rng));
        f.b.push_back(beta * CMatrix::Identity(n_R, n_R));
    }
    return f;
}

AFVirtualChannel af_virtual_channel(const AFRelayFrame& f) {
    const auto M = static_cast<std::size_t>(f.relays);
    if (f.h_d.rows() != f.n_r || f.h_d.cols() != f.n_t) throw ConfigError("H_D must be n_r x n_t");
    if (f.h_rm.size() != M || f.h_dm.size() != M || f.b.size() != M)
        throw ConfigError("AF frame needs one relay channel and amplifier per relay");
    AFVirtualChannel vc;
    vc.h_eq = CMatrix::Zero(2 * f.n_r, 2 * f.n_t * f.relays);
    vc.colored = f.rho3 != 0.0;
    for (std::size_t m = 0; m < M; ++m) {
        if (f.h_rm[m].rows() != f.n_R || f.h_rm[m].cols() != f.n_t || f.h_dm[m].rows() != f.n_r ||
            f.h_dm[m].cols() != f.n_R || f.b[m].rows() != f.n_R || f.b[m].cols() != f.n_R)
            throw ConfigError("AF relay matrices have inconsistent dimensions");
        CMatrix blk = CMatrix::Zero(2 * f.n_r, 2 * f.n_t);
        blk.topLeftCorner(f.n_r, f.n_t) = f.rho1 * f.h_d;
        blk.bottomLeftCorner(f.n_r, f.n_t) = f.rho3 * f.rho1p * f.h_dm[m] * f.b[m] * f.h_rm[m];
        blk.bottomRightCorner(f.n_r, f.n_t) = f.rho2 * f.h_d;
        vc.h_eq.block(0, static_cast<Eigen::Index>(m) * 2 * f.n_t, 2 * f.n_r, 2 * f.n_t) = blk;
        vc.blocks.push_back(blk);
        CMatrix cov = CMatrix::Identity(2 * f.n_r, 2 * f.n_r);
        CMatrix relay = f.h_dm[m] * f.b[m];
        cov.bottomRightCorner(f.n_r, f.n_r) += f.rho3 * f.rho3 * relay * relay.adjoint();
        Eigen::LLT<CMatrix> llt(cov);
        CMatrix l = llt.matrixL();
        vc.whitening.push_back(l.triangularView<Eigen::Lower>().solve(CMatrix::Identity(2 * f.n_r, 2 * f.n_r)));
        vc.covariance.push_back(std::move(cov));
    }
    return vc;
}

CMatrix af_receive(const AFRelayFrame& f, int m, const CMatrix& x_m, double sigma2, Rng& rng) {
    if (x_m.rows() != 2 * f.n_t) throw ConfigError("frame input must stack both halves (2 n_t rows)");
    const auto mi = static_cast<std::size_t>(m);
    const int L = static_cast<int>(x_m.cols());
    CMatrix x1 = x_m.topRows(f.n_t), x2 = x_m.bottomRows(f.n_t);
    auto noise = [&](int rows) {
        return sigma2 > 0 ? complex_gaussian(rows, L, sigma2, rng) : CMatrix(CMatrix::Zero(rows, L));
    };
    CMatrix y(2 * f.n_r, L);
    y.topRows(f.n_r) = f.rho1 * f.h_d * x1 + noise(f.n_r);
    CMatrix at_relay = f.rho1p * f.h_rm[mi] * x1 + noise(f.n_R);
    y.bottomRows(f.n_r) = f.rho2 * f.h_d * x2 + noise(f.n_r) + f.rho3 * f.h_dm[mi] * f.b[mi] * at_relay;
    return y;
}

IntVector af_decode(const SpaceTimeCode& code, const AFRelayFrame& f, const AFVirtualChannel& vc,
                    const std::vector<CMatrix>& y_frames) {
    const int M = f.relays, rows = 2 * f.n_t;
    if (code.rows() != rows * M || code.cols() % M != 0)
        throw ConfigError("AF code must have 2 n_t M rows and a multiple of M columns");
    const int L = code.cols() / M;
    if (static_cast<int>(y_frames.size()) != M) throw ConfigError("one received block per frame is required");
    const Eigen::Index per = 2 * 2 * f.n_r * L;
    Matrix g(per * M, code.rank());
    Vector y(per * M);
    for (int m = 0; m < M; ++m) {
        const CMatrix& w = vc.whitening[static_cast<std::size_t>(m)];
        CMatrix wh = w * vc.blocks[static_cast<std::size_t>(m)];
        for (int i = 0; i < code.rank(); ++i)
            g.col(i).segment(per * m, per) = iota(wh * code.basis[static_cast<std::size_t>(i)].block(rows * m, L * m, rows, L));
        y.segment(per * m, per) = iota(w * y_frames[static_cast<std::size_t>(m)]);
    }
    return sphere_decode_real(g, y, code.alphabet);
}

nlohmann::json to_json(const ChannelModel& model) {
    if (model.kind == ChannelModel::Kind::Rayleigh)
        return {{"kind", "rayleigh"}, {"n_r", model.n_r}, {"sigma_h2", model.sigma_h2}};
    return {{"kind", "af"},           {"n_r", model.n_r},       {"relays", model.relays}, {"n_t", model.n_t},
            {"n_R", model.n_R},       {"rho1", model.rho1},     {"rho2", model.rho2},     {"rho3", model.rho3},
            {"rho1p", model.rho1p}};
}

SimulationReport monte_carlo_cwer(const SpaceTimeCode& code, const std::vector<double>& snr_db, std::size_t trials,
                                  std::uint64_t seed, const ChannelModel& model, int threads) {
    if (trials == 0) throw ConfigError("trials must be positive");
    const bool af = model.kind == ChannelModel::Kind::AFRelay;
    if (af) {
        const int rows = 2 * model.n_t, M = model.relays;
        if (code.rows() != rows * M || code.cols() % M != 0)
            throw ConfigError("AF code must have 2 n_t M rows and a multiple of M columns");
        const int L = code.cols() / M;
        for (const auto& b : code.basis)
            for (int m = 0; m < M; ++m) {
                CMatrix rest = b.block(rows * m, 0, rows, b.cols());
                rest.block(0, L * m, rows, L).setZero();
                if (rest.norm() > 1e-12) throw ConfigError("AF code must be block diagonal over the frames");
            }
    }
    const double power = average_power(code);
    SimulationReport report;
    report.experiment = af ? "cwer-af" : "cwer";
    report.seed = seed;
    report.config = {{"code", code.label}, {"k", code.rank()},      {"n_t", code.rows()},   {"T", code.cols()},
                     {"alphabet", code.alphabet}, {"trials", trials}, {"snr_db", snr_db}, {"model", to_json(model)}};
    for (std::size_t j = 0; j < snr_db.size(); ++j) {
        const double sigma2 = std::isinf(snr_db[j]) && snr_db[j] > 0 ? 0.0 : power / std::pow(10.0, snr_db[j] / 10.0);
        std::vector<unsigned char> wrong(trials, 0);
        parallel_for(trials, threads, [&](std::size_t t) {
            Rng rng = make_rng(seed, j, t);
            std::uniform_int_distribution<std::size_t> pick(0, code.alphabet.size() - 1);
            IntVector s(code.rank());
            for (int i = 0; i < code.rank(); ++i) s(i) = code.alphabet[pick(rng)];
            IntVector decoded;
            if (!af) {
                ChannelRealization ch = sample_channel(model.n_r, code.rows(), model.sigma_h2, rng);
                CMatrix y = transmit(code, s, ch.h, sigma2, rng);
                decoded = sphere_decode(code, ch.h, y);
            } else {
                AFRelayFrame f = sample_af_frame(model.relays, model.n_t, model.n_R, model.n_r, model.rho1,
                                                 model.rho2, model.rho3, model.rho1p, rng);
                AFVirtualChannel vc = af_virtual_channel(f);
                CMatrix x = code.codeword(s);
                const int rows = 2 * model.n_t, L = code.cols() / model.relays;
                std::vector<CMatrix> ys;
                for (int m = 0; m < model.relays; ++m) ys.push_back(af_receive(f, m, x.block(rows * m, L * m, rows, L), sigma2, rng));
                decoded = af_decode(code, f, vc, ys);
            }
            wrong[t] = decoded != s;
        });
        std::size_t errors = 0;
        for (auto w : wrong) errors += w;
        report.points.push_back(make_point(snr_db[j], trials, errors));
    }
    return report;
}

}  // namespace latticeforge
