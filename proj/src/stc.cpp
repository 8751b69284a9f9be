#include "latticeforge/stc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "latticeforge/errors.hpp"
#include "latticeforge/integer_matrix.hpp"
#include "latticeforge/rng.hpp"

namespace latticeforge {

namespace {

int numeric_rank(const CMatrix& x) {
    Eigen::JacobiSVD<CMatrix> svd(x);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    double cut = 1e-9 * std::max(1.0, s(0));
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

std::vector<ConjugateMatrix> scaled(std::vector<ConjugateMatrix> c, double s) {
    for (auto& m : c)
        for (auto& g : m) g *= s;
    return c;
}

nlohmann::json complex_matrix_json(const CMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

CMatrix complex_matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("basis matrix must be a list of rows");
    const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (j[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(cols))
            throw ConfigError("basis matrix rows have different lengths");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& e = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            if (!e.is_array() || e.size() != 2) throw ConfigError("matrix entries must be [re, im] pairs");
            m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

}  // namespace

ConjugateMatrix left_regular_rep_conjugates(const CyclicAlgebra& alg, const std::vector<FieldElement>& x) {
    const int n = alg.degree();
    if (static_cast<int>(x.size()) != n) throw ConfigError("left_regular_rep needs one coordinate per power of e");
    const int embeddings = alg.field.degree();
    std::vector<FieldAutomorphism> powers;
    for (int j = 0; j < n; ++j) powers.push_back(alg.sigma.power(j));
    ConjugateMatrix out(static_cast<std::size_t>(embeddings), CMatrix::Zero(n, n));
    for (int g = 0; g < embeddings; ++g)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const auto& xi = x[static_cast<std::size_t>(((i - j) % n + n) % n)];
                Complex v = xi.conj(powers[static_cast<std::size_t>(j)].perm[static_cast<std::size_t>(g)]);
                if (i < j) v *= alg.gamma.conj(g);
                out[static_cast<std::size_t>(g)](i, j) = v;
            }
    return out;
}

CMatrix left_regular_rep(const CyclicAlgebra& alg, const std::vector<FieldElement>& x) {
    return left_regular_rep_conjugates(alg, x).front();
}

CyclicAlgebra quaternion_algebra() {
    NumberField f = gaussian_field();
    return {f, gaussian_conjugation(), element(f, {-1, 0})};
}

CyclicAlgebra golden_algebra() {
    NumberField f = golden_field();
    return {f, golden_sqrt5_flip(), element(f, {0, 1, 0, 0})};
}

CMatrix SpaceTimeCode::codeword(const IntVector& s) const {
    if (s.size() != rank()) throw ConfigError("coordinate vector length does not match the code rank");
    CMatrix x = CMatrix::Zero(rows(), cols());
    for (int i = 0; i < rank(); ++i) x += static_cast<double>(s(i)) * basis[static_cast<std::size_t>(i)];
    return x;
}

Matrix SpaceTimeCode::generator() const {
    Matrix g(2 * rows() * cols(), rank());
    for (int i = 0; i < rank(); ++i) g.col(i) = iota(basis[static_cast<std::size_t>(i)]);
    return g;
}

SpaceTimeCode make_code(std::string label, std::vector<CMatrix> basis, std::vector<std::int64_t> alphabet,
                        std::vector<ConjugateMatrix> conjugates) {
    if (basis.empty()) throw ConfigError("a space-time code needs at least one basis matrix");
    for (const auto& b : basis)
        if (b.rows() != basis.front().rows() || b.cols() != basis.front().cols() || b.size() == 0)
            throw ConfigError("basis matrices must share one non-empty shape");
    if (alphabet.empty()) throw ConfigError("alphabet must be non-empty");
    if (!conjugates.empty() && conjugates.size() != basis.size())
        throw ConfigError("conjugate data must cover every basis matrix");
    SpaceTimeCode code{std::move(label), std::move(basis), std::move(alphabet), std::move(conjugates)};
    if (code.rank() > 2 * code.rows() * code.cols()) throw RankError("code rank exceeds 2 n_t T");
    Eigen::ColPivHouseholderQR<Matrix> qr(code.generator());
    qr.setThreshold(1e-10);
    if (qr.rank() != code.rank()) throw RankError("basis matrices are not linearly independent over R");
    return code;
}

SpaceTimeCode alamouti_code(std::vector<std::int64_t> alphabet) {
    CyclicAlgebra alg = quaternion_algebra();
    FieldElement zero = element(alg.field, {0, 0}), one = element(alg.field, {1, 0}), i = element(alg.field, {0, 1});
    std::vector<std::vector<FieldElement>> coords = {{one, zero}, {i, zero}, {zero, one}, {zero, i}};
    std::vector<CMatrix> basis;
    std::vector<ConjugateMatrix> conj;
    for (const auto& x : coords) {
        conj.push_back(left_regular_rep_conjugates(alg, x));
        basis.push_back(conj.back().front());
    }
    return make_code("alamouti", std::move(basis), std::move(alphabet), std::move(conj));
}

SpaceTimeCode golden_code(std::vector<std::int64_t> alphabet) {
    CyclicAlgebra alg = golden_algebra();
    // alpha = 1 + i - i t, and i alpha, alpha t, i alpha t over the basis (1, i, t, i t).
    const std::vector<std::vector<double>> gens = {{1, 1, 0, -1}, {-1, 1, 1, 0}, {0, -1, 1, 0}, {1, 0, 0, 1}};
    FieldElement zero = element(alg.field, {0, 0, 0, 0});
    std::vector<CMatrix> basis;
    std::vector<ConjugateMatrix> conj;
    for (int slot = 0; slot < 2; ++slot)
        for (const auto& g : gens) {
            std::vector<FieldElement> x(2, zero);
            x[static_cast<std::size_t>(slot)] = element(alg.field, g);
            conj.push_back(left_regular_rep_conjugates(alg, x));
        }
    conj = scaled(std::move(conj), 1.0 / std::sqrt(5.0));
    for (const auto& c : conj) basis.push_back(c.front());
    return make_code("golden", std::move(basis), std::move(alphabet), std::move(conj));
}

SpaceTimeCode block_diagonal_construct(const SpaceTimeCode& code, const FieldAutomorphism& tau, int n_blocks) {
    if (n_blocks < 1) throw ConfigError("n_blocks must be positive");
    if (code.conjugates.empty()) throw ConfigError("block-diagonal construction needs the code's field conjugates");
    if (code.conjugates.front().size() != tau.perm.size())
        throw ConfigError("automorphism does not act on the code's field");
    if (!tau.power(n_blocks).is_identity()) throw ConfigError("order of tau must divide n_blocks");
    const int r = code.rows(), c = code.cols();
    std::vector<CMatrix> basis;
    std::vector<ConjugateMatrix> conj;
    for (const auto& b : code.conjugates) {
        ConjugateMatrix out(b.size(), CMatrix::Zero(r * n_blocks, c * n_blocks));
        for (std::size_t g = 0; g < b.size(); ++g) {
            int h = static_cast<int>(g);
            for (int blk = 0; blk < n_blocks; ++blk) {
                out[g].block(blk * r, blk * c, r, c) = b[static_cast<std::size_t>(h)];
                h = tau.perm[static_cast<std::size_t>(h)];
            }
        }
        basis.push_back(out.front());
        conj.push_back(std::move(out));
    }
    return make_code(code.label + "-blockdiag" + std::to_string(n_blocks), std::move(basis), code.alphabet,
                     std::move(conj));
}

CMatrix iterated_map(const CMatrix& x, const CMatrix& y, const CMatrix& tau_x, const CMatrix& tau_y, Complex zeta,
                     double theta_prime) {
    const auto n = x.rows();
    const double s = std::sqrt(theta_prime);
    CMatrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = x;
    out.topRightCorner(n, n) = zeta * s * tau_y;
    out.bottomLeftCorner(n, n) = s * y;
    out.bottomRightCorner(n, n) = tau_x;
    return out;
}

SpaceTimeCode iterated_construct(const SpaceTimeCode& code, const FieldAutomorphism& tau, Complex zeta,
                                 double theta_prime) {
    if (code.rows() != code.cols()) throw ConfigError("iterated construction needs square basis matrices");
    if (!(theta_prime > 0)) throw DomainError("theta' must be positive");
    const Complex units[] = {1.0, -1.0, Complex(0, 1), Complex(0, -1)};
    if (std::none_of(std::begin(units), std::end(units), [&](Complex u) { return std::abs(u - zeta) < 1e-12; }))
        throw DomainError("zeta must be one of 1, -1, i, -i");
    if (code.conjugates.empty()) throw ConfigError("iterated construction needs the code's field conjugates");
    if (code.conjugates.front().size() != tau.perm.size())
        throw ConfigError("automorphism does not act on the code's field");
    const auto n = code.rows();
    const CMatrix zero = CMatrix::Zero(n, n);
    std::vector<CMatrix> basis;
    for (const auto& b : code.conjugates) {
        const CMatrix& tb = b[static_cast<std::size_t>(tau.perm[0])];
        basis.push_back(iterated_map(b.front(), zero, tb, zero, zeta, theta_prime));
    }
    for (const auto& b : code.conjugates) {
        const CMatrix& tb = b[static_cast<std::size_t>(tau.perm[0])];
        basis.push_back(iterated_map(zero, b.front(), zero, tb, zeta, theta_prime));
    }
    return make_code(code.label + "-iterated", std::move(basis), code.alphabet);
}

SpaceTimeCode iterated_alamouti(std::vector<std::int64_t> alphabet) {
    return iterated_construct(alamouti_code(std::move(alphabet)), gaussian_conjugation(), Complex(0, 1), 2.0);
}

MinDeterminant min_determinant(const SpaceTimeCode& code, const DeterminantScan& scan) {
    if (code.rows() != code.cols()) throw DomainError("min_determinant needs square codewords");
    const int k = code.rank();
    std::vector<std::int64_t> values = code.alphabet;
    if (scan.mode == ScanMode::Differences) {
        std::set<std::int64_t> diffs;
        for (auto a : code.alphabet)
            for (auto b : code.alphabet) diffs.insert(a - b);
        values.assign(diffs.begin(), diffs.end());
    }
    MinDeterminant best;
    best.value = std::numeric_limits<double>::infinity();
    best.min_rank = code.rows();
    auto consider = [&](const IntVector& s) {
        if (s.isZero()) return;
        ++best.scanned;
        CMatrix x = code.codeword(s);
        double d = std::norm(x.determinant());
        best.min_rank = std::min(best.min_rank, numeric_rank(x));
        if (d < best.value) {
            best.value = d;
            best.argmin = s;
        }
    };
    IntVector s(k);
    if (scan.mode == ScanMode::Random) {
        Rng rng = make_rng(scan.seed, 0x5c4e, 0);
        std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
        for (std::size_t t = 0; t < scan.samples; ++t) {
            for (int i = 0; i < k; ++i) s(i) = values[pick(rng)];
            consider(s);
        }
    } else {
        double total = std::pow(static_cast<double>(values.size()), k);
        if (total > 1e8) throw CapacityError("exhaustive determinant scan exceeds 1e8 coordinate vectors");
        std::vector<std::size_t> digit(static_cast<std::size_t>(k), 0);
        while (true) {
            for (int i = 0; i < k; ++i) s(i) = values[digit[static_cast<std::size_t>(i)]];
            consider(s);
            int pos = k - 1;
            while (pos >= 0 && ++digit[static_cast<std::size_t>(pos)] == values.size()) digit[static_cast<std::size_t>(pos--)] = 0;
            if (pos < 0) break;
        }
    }
    if (best.scanned == 0) throw DomainError("determinant scan contained no nonzero codeword");
    return best;
}

NormalizedDensity normalized_density(const SpaceTimeCode& code, double delta_min) {
    if (delta_min < 0) throw DomainError("minimum determinant must be non-negative");
    const Matrix g = code.generator();
    const double n = code.rows();
    NormalizedDensity out;
    out.volume = std::sqrt(std::abs((g.transpose() * g).determinant()));
    out.min_det = std::sqrt(delta_min);
    out.degenerate = delta_min == 0.0;
    out.delta = out.min_det / std::pow(out.volume, 1.0 / (2.0 * n));
    out.eta = std::pow(out.min_det, 2.0 * n) / out.volume;
    return out;
}

NormalizedDensity normalized_density(const SpaceTimeCode& code, const DeterminantScan& scan) {
    return normalized_density(code, min_determinant(code, scan).value);
}

Rational reduce(Rational r) {
    if (r.den == 0) throw DomainError("rational with zero denominator");
    if (r.den < 0) {
        r.num = -r.num;
        r.den = -r.den;
    }
    std::int64_t g = gcd(r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

Rational natural_order_discriminant(std::int64_t disc, Rational gamma_norm, int n) {
    if (n < 1) throw DomainError("degree must be positive");
    gamma_norm = reduce(gamma_norm);
    Rational out{1, 1};
    for (int i = 0; i < n; ++i) out.num = checked_mul(out.num, disc);
    for (int i = 0; i < n * (n - 1); ++i) {
        out.num = checked_mul(out.num, gamma_norm.num);
        out.den = checked_mul(out.den, gamma_norm.den);
    }
    return reduce(out);
}

nlohmann::json to_json(const SpaceTimeCode& code) {
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& b : code.basis) basis.push_back(complex_matrix_json(b));
    return {{"label", code.label}, {"n_t", code.rows()}, {"T", code.cols()},
            {"k", code.rank()},    {"alphabet", code.alphabet}, {"basis", basis}};
}

SpaceTimeCode code_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("basis")) throw ConfigError("code JSON needs a \"basis\" field");
    std::vector<CMatrix> basis;
    for (const auto& m : j.at("basis")) basis.push_back(complex_matrix_from_json(m));
    auto alphabet = j.value("alphabet", std::vector<std::int64_t>{-1, 1});
    return make_code(j.value("label", std::string("custom")), std::move(basis), std::move(alphabet));
}

}  // namespace latticeforge
