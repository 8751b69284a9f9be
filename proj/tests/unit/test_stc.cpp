#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <random>

#include "latticeforge/errors.hpp"
#include "latticeforge/fast_decoding.hpp"
#include "latticeforge/stc.hpp"

using namespace latticeforge;

namespace {

CMatrix random_cmatrix(std::mt19937_64& rng, int r, int c) {
    std::normal_distribution<double> g;
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

FieldElement random_element(std::mt19937_64& rng, const NumberField& f) {
    std::uniform_int_distribution<int> u(-5, 5);
    std::vector<double> c(static_cast<std::size_t>(f.degree()));
    for (auto& v : c) v = u(rng);
    return element(f, c);
}

// (xy)_k = sum_{i + j = k mod n} gamma^{[i + j >= n]} sigma^j(x_i) y_j.
std::vector<FieldElement> algebra_multiply(const CyclicAlgebra& alg, const std::vector<FieldElement>& x,
                                           const std::vector<FieldElement>& y) {
    const int n = alg.degree();
    std::vector<FieldElement> out(static_cast<std::size_t>(n), FieldElement{CVector::Zero(x[0].conj.size())});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            FieldElement t = alg.sigma.power(j).apply(x[static_cast<std::size_t>(i)]) * y[static_cast<std::size_t>(j)];
            if (i + j >= n) t = alg.gamma * t;
            auto& slot = out[static_cast<std::size_t>((i + j) % n)];
            slot = slot + t;
        }
    return out;
}

IntVector vec(std::initializer_list<std::int64_t> v) {
    IntVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST_CASE("iota interleaves real and imaginary parts and preserves the norm") {
    CMatrix s(1, 1);
    s(0, 0) = Complex(1, 2);
    CHECK(iota(s) == (Vector(2) << 1, 2).finished());
    Vector id = iota(CMatrix::Identity(2, 2));
    CHECK(id == (Vector(8) << 1, 0, 0, 0, 0, 0, 1, 0).finished());
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        CMatrix x = random_cmatrix(rng, 2 + t % 3, 1 + t % 4);
        CHECK(std::abs(iota(x).norm() - x.norm()) < 1e-12);
        CHECK((iota_inverse(iota(x), static_cast<int>(x.rows()), static_cast<int>(x.cols())) - x).norm() == 0.0);
    }
}

TEST_CASE("left regular representation: identity, degree-2 pattern and multiplicativity") {
    for (const auto& alg : {quaternion_algebra(), golden_algebra()}) {
        const int d = alg.field.degree();
        std::vector<double> one(static_cast<std::size_t>(d), 0.0), zero(static_cast<std::size_t>(d), 0.0);
        one[0] = 1.0;
        CMatrix id = left_regular_rep(alg, {element(alg.field, one), element(alg.field, zero)});
        CHECK((id - CMatrix::Identity(2, 2)).norm() < 1e-14);

        std::mt19937_64 rng(5 + static_cast<unsigned>(d));
        for (int t = 0; t < 100; ++t) {
            std::vector<FieldElement> x{random_element(rng, alg.field), random_element(rng, alg.field)};
            std::vector<FieldElement> y{random_element(rng, alg.field), random_element(rng, alg.field)};
            CMatrix rx = left_regular_rep(alg, x);
            CHECK(std::abs(rx(0, 0) - x[0].value()) < 1e-12);
            CHECK(std::abs(rx(1, 0) - x[1].value()) < 1e-12);
            CHECK(std::abs(rx(0, 1) - alg.gamma.value() * alg.sigma.apply(x[1]).value()) < 1e-12);
            CHECK(std::abs(rx(1, 1) - alg.sigma.apply(x[0]).value()) < 1e-12);
            CMatrix lhs = rx * left_regular_rep(alg, y);
            CMatrix rhs = left_regular_rep(alg, algebra_multiply(alg, x, y));
            CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
            Complex dx = rx.determinant(), dy = left_regular_rep(alg, y).determinant(), dxy = rhs.determinant();
            CHECK(std::abs(dx * dy - dxy) < 1e-10 * std::max(1.0, std::abs(dxy)));
        }
    }
}

TEST_CASE("Alamouti code: determinant equals the quaternion norm, full diversity") {
    SpaceTimeCode code = alamouti_code();
    CHECK(code.rank() == 4);
    CHECK((code.codeword(vec({1, 0, 0, 0})) - CMatrix::Identity(2, 2)).norm() == 0.0);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> u(-6, 6);
    for (int t = 0; t < 200; ++t) {
        IntVector s = vec({u(rng), u(rng), u(rng), u(rng)});
        double expect = static_cast<double>(s.squaredNorm());
        Complex d = code.codeword(s).determinant();
        CHECK(std::abs(d - Complex(expect, 0)) < 1e-9);
    }
    // Every distinct pair over S = {-1, 1}.
    int min_rank = 2;
    double min_det = 1e300;
    for (int a = 0; a < 16; ++a)
        for (int b = 0; b < 16; ++b) {
            if (a == b) continue;
            IntVector sa(4), sb(4);
            for (int i = 0; i < 4; ++i) {
                sa(i) = (a >> i & 1) ? 1 : -1;
                sb(i) = (b >> i & 1) ? 1 : -1;
            }
            CMatrix x = code.codeword(sa) - code.codeword(sb);
            Eigen::JacobiSVD<CMatrix> svd(x);
            int r = (svd.singularValues().array() > 1e-9).count();
            min_rank = std::min(min_rank, r);
            min_det = std::min(min_det, std::norm(x.determinant()));
        }
    CHECK(min_rank == 2);
    auto diff = min_determinant(code, {ScanMode::Differences, 0, 0});
    CHECK(diff.value == doctest::Approx(min_det));
    CHECK(diff.value == doctest::Approx(16.0));
    CHECK(diff.min_rank == 2);
    auto full = min_determinant(alamouti_code({-1, 0, 1}));
    CHECK(full.value == doctest::Approx(1.0));
    CHECK(full.scanned == 80);
}

TEST_CASE("Golden code: rank 8 and a positive minimum determinant") {
    SpaceTimeCode code = golden_code();
    Eigen::FullPivLU<Matrix> lu(code.generator().transpose() * code.generator());
    CHECK(lu.rank() == 8);
    CHECK(code.codeword(IntVector::Zero(8)).norm() == 0.0);
    double oracle = 1e300;
    IntVector s(8);
    for (int idx = 0; idx < 6561; ++idx) {
        int v = idx;
        for (int i = 0; i < 8; ++i) {
            s(i) = v % 3 - 1;
            v /= 3;
        }
        if (s.isZero()) continue;
        CMatrix x = code.codeword(s);
        oracle = std::min(oracle, std::norm(x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0)));
    }
    auto scan = min_determinant(code);
    CHECK(scan.value == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(scan.value > 0.0);
    CHECK(scan.value == doctest::Approx(0.2));
    MESSAGE("golden min |det|^2 over {-1,0,1}^8: " << scan.value);
    auto rnd = min_determinant(code, {ScanMode::Random, 10'000, 9});
    CHECK(rnd.value >= scan.value - 1e-12);
    CHECK(rnd.value > 0.0);
}

TEST_CASE("minimum determinant scales with c^{2n}") {
    SpaceTimeCode code = golden_code();
    const double c = 1.7;
    std::vector<CMatrix> b;
    for (const auto& m : code.basis) b.push_back(c * m);
    SpaceTimeCode scaled = make_code("scaled", b, code.alphabet);
    CHECK(min_determinant(scaled).value == doctest::Approx(std::pow(c, 4) * min_determinant(code).value));
    auto d0 = normalized_density(code), d1 = normalized_density(scaled);
    CHECK(d1.delta == doctest::Approx(d0.delta).epsilon(1e-12));
    CHECK(d1.eta == doctest::Approx(d0.eta).epsilon(1e-12));
    CHECK(d0.delta * d0.delta == doctest::Approx(std::pow(d0.eta, 0.5)).epsilon(1e-9));
}

TEST_CASE("normalized density of the Alamouti code") {
    auto d = normalized_density(alamouti_code({-1, 0, 1}));
    CHECK(d.volume == doctest::Approx(4.0));
    CHECK(d.delta == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(d.eta == doctest::Approx(0.25));
    CHECK(std::abs(d.delta * d.delta - std::sqrt(d.eta)) < 1e-9);
    CHECK_FALSE(d.degenerate);
    CHECK(normalized_density(alamouti_code(), 0.0).degenerate);
}

TEST_CASE("natural order discriminant") {
    CHECK(natural_order_discriminant(-4, {5, 1}, 2) == Rational{400, 1});
    CHECK(natural_order_discriminant(-7, {3, 2}, 1) == Rational{-7, 1});
    CHECK(natural_order_discriminant(-3, {1, 1}, 3) == Rational{-27, 1});
    CHECK(natural_order_discriminant(5, {2, 3}, 2) == Rational{100, 9});
}

TEST_CASE("block-diagonal construction") {
    SpaceTimeCode g = golden_code();
    SpaceTimeCode same = block_diagonal_construct(g, FieldAutomorphism{"id", {0, 1, 2, 3}}, 1);
    for (int i = 0; i < g.rank(); ++i) CHECK((same.basis[static_cast<std::size_t>(i)] - g.basis[static_cast<std::size_t>(i)]).norm() == 0.0);
    SpaceTimeCode bd = block_diagonal_construct(g, golden_conjugation(), 2);
    CHECK(bd.rank() == 8);
    CHECK(bd.rows() == 4);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> u(-3, 3);
    for (int t = 0; t < 50; ++t) {
        IntVector s(8);
        for (int i = 0; i < 8; ++i) s(i) = u(rng);
        CMatrix x = g.codeword(s);
        CMatrix tx = CMatrix::Zero(2, 2);
        for (int i = 0; i < 8; ++i) tx += static_cast<double>(s(i)) * g.conjugates[static_cast<std::size_t>(i)][2];
        Complex lhs = bd.codeword(s).determinant();
        CHECK(std::abs(lhs - x.determinant() * tx.determinant()) < 1e-9 * std::max(1.0, std::abs(lhs)));
        CHECK((bd.codeword(s).topLeftCorner(2, 2) - x).norm() < 1e-12);
    }
    // Quadratic imaginary center: a full-rate n_r x n_r code carries 2 n_r real symbols per channel use.
    CHECK(g.rate() == doctest::Approx(4.0));
    CHECK(bd.rate() == doctest::Approx(g.rate() / 2));
    CHECK_THROWS_AS(block_diagonal_construct(g, golden_sqrt5_flip(), 3), ConfigError);
}

TEST_CASE("iterated construction preserves HR orthogonality and doubles the rank") {
    CMatrix id = CMatrix::Identity(2, 2), zero = CMatrix::Zero(2, 2);
    CHECK((iterated_map(id, zero, id.conjugate(), zero, Complex(0, 1), 2.0) - CMatrix::Identity(4, 4)).norm() == 0.0);
    std::mt19937_64 rng(21);
    const Complex zetas[] = {1.0, -1.0, Complex(0, 1), Complex(0, -1)};
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        CMatrix bi = random_cmatrix(rng, 2, 2);
        CMatrix k = random_cmatrix(rng, 2, 2);
        CMatrix bj = bi * (k - k.adjoint());
        double scale = std::max(1.0, bi.norm() * bj.norm());
        REQUIRE((bi * bj.adjoint() + bj * bi.adjoint()).norm() < 1e-12 * scale);
        Complex zeta = zetas[t % 4];
        double tp = 0.5 + (t % 7);
        CMatrix xi = iterated_map(bi, zero, bi.conjugate(), zero, zeta, tp);
        CMatrix xj = iterated_map(bj, zero, bj.conjugate(), zero, zeta, tp);
        CMatrix yi = iterated_map(zero, bi, zero, bi.conjugate(), zeta, tp);
        CMatrix yj = iterated_map(zero, bj, zero, bj.conjugate(), zeta, tp);
        worst = std::max(worst, (xi * xj.adjoint() + xj * xi.adjoint()).norm() / scale);
        worst = std::max(worst, (yi * yj.adjoint() + yj * yi.adjoint()).norm() / (tp * scale));
    }
    CHECK(worst < 1e-12);
    SpaceTimeCode it = iterated_alamouti();
    CHECK(it.rank() == 8);
    Eigen::FullPivLU<Matrix> lu(it.generator());
    CHECK(lu.rank() == 8);
}

TEST_CASE("HR group partition") {
    FDReport a = hr_group_partition(alamouti_code());
    CHECK(a.kind == "g-group");
    CHECK(a.groups.size() == 4);
    CHECK(a.exponent == 1);

    std::mt19937_64 rng(4);
    std::vector<CMatrix> b;
    for (int i = 0; i < 5; ++i) b.push_back(random_cmatrix(rng, 2, 2));
    FDReport none = hr_group_partition(make_code("random", b, {-1, 1}));
    CHECK(none.kind == "none");
    CHECK(none.exponent == 5);

    FDReport it = hr_group_partition(iterated_alamouti());
    CHECK(it.kind == "conditional");
    CHECK(it.groups.size() == 4);
    CHECK(it.conditional.size() == 4);
    CHECK(it.exponent == 5);
    CHECK(complexity_reduction(it) == doctest::Approx(0.375));
    std::vector<int> all = it.order;
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 8; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("R matrix zeros match the predicted pattern") {
    std::mt19937_64 rng(77);
    for (const auto& code : {alamouti_code(), iterated_alamouti()}) {
        FDReport rep = hr_group_partition(code);
        for (int t = 0; t < 100; ++t) {
            CMatrix h = random_cmatrix(rng, 2, code.rows());
            RPattern p = r_matrix_pattern(code, h, rep);
            CHECK_FALSE(p.rank_deficient);
            CHECK(p.predicted_zeros_present);
            CHECK(p.exponent_from_r == rep.exponent);
        }
    }
    FDReport rep = hr_group_partition(alamouti_code());
    RPattern p = r_matrix_pattern(alamouti_code(), random_cmatrix(rng, 1, 2), rep);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) CHECK(std::abs(p.r(i, j)) < 1e-8);

    std::vector<CMatrix> unit;
    for (int e = 0; e < 4; ++e)
        for (Complex z : {Complex(1, 0), Complex(0, 1)}) {
            CMatrix m = CMatrix::Zero(2, 2);
            m(e % 2, e / 2) = z;
            unit.push_back(m);
        }
    SpaceTimeCode plain = make_code("unit", unit, {-1, 1});
    FDReport prep = hr_group_partition(plain);
    RPattern pp = r_matrix_pattern(plain, CMatrix::Identity(2, 2), prep);
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) CHECK(std::abs(pp.r(i, j)) < 1e-12);
    CHECK(r_matrix_pattern(golden_code(), random_cmatrix(rng, 1, 2), hr_group_partition(golden_code())).rank_deficient);
}

TEST_CASE("code JSON round trip") {
    SpaceTimeCode g = golden_code();
    auto j = to_json(g);
    CHECK(j["k"] == 8);
    CHECK(j["basis"][0][0][0].size() == 2);
    SpaceTimeCode back = code_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.rank() == 8);
    for (int i = 0; i < 8; ++i) CHECK((back.basis[static_cast<std::size_t>(i)] - g.basis[static_cast<std::size_t>(i)]).norm() < 1e-15);
    CHECK(back.alphabet == g.alphabet);
    auto fd = to_json(hr_group_partition(alamouti_code()));
    CHECK(fd["exponent"] == 1);
    CHECK_THROWS_AS(make_code("dup", {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)}, {-1, 1}), RankError);
}
