#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "latticeforge/compute_forward.hpp"
#include "latticeforge/errors.hpp"
#include "latticeforge/integer_matrix.hpp"

using namespace latticeforge;

namespace {

IntVector iv(std::int64_t a, std::int64_t b) { return (IntVector(2) << a, b).finished(); }
Vector rv(double a, double b) { return (Vector(2) << a, b).finished(); }
IntMatrix diag(std::int64_t a, std::int64_t b) { return (IntMatrix(2, 2) << a, 0, 0, b).finished(); }
IntMatrix scalar(std::int64_t a) { return IntMatrix::Constant(1, 1, a); }

}  // namespace

TEST_CASE("computation rate closed form") {
    CHECK(computation_rate(rv(1, 0), iv(1, 0), 100) == doctest::Approx(0.5 * std::log2(101.0)).epsilon(1e-14));
    CHECK(computation_rate(rv(1, 0), iv(1, 0), 100) == doctest::Approx(3.328).epsilon(1e-3));
    CHECK(computation_rate(rv(0, 1), iv(1, 0), 50) == 0.0);
    CHECK(computation_rate(rv(1, 0.2), iv(40, -37), 10) == 0.0);
    CHECK_THROWS_AS(computation_rate(rv(1, 0), iv(0, 0), 1), DomainError);
}

TEST_CASE("optimal alpha matches a grid search") {
    Vector h = rv(0.7, -1.2);
    IntVector a(2);
    a << 1, -2;
    CHECK(optimal_alpha(h, iv(1, 0), 3.0) == doctest::Approx(3.0 * 0.7 / (1 + 3.0 * h.squaredNorm())));
    CHECK(optimal_alpha(rv(1, 1), iv(1, 1), 9.0) == doctest::Approx(18.0 / 19.0));
    CHECK(optimal_alpha(rv(1, 0), iv(0, 1), 9.0) == 0.0);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ur(0.1, 100.0);
    std::uniform_int_distribution<int> ui(-3, 3);
    for (int t = 0; t < 200; ++t) {
        Vector hh = rv(g(rng), g(rng));
        IntVector aa = iv(ui(rng), ui(rng));
        if (aa.isZero()) aa(0) = 1;
        double rho = ur(rng);
        // Coarse scan over a wide range, then a fine scan around the coarse minimiser.
        auto objective = [&](double al) { return al * al + rho * (al * hh - aa.cast<double>()).squaredNorm(); };
        double arg = 0, best = std::numeric_limits<double>::infinity();
        for (int i = -100'000; i <= 100'000; ++i)
            if (double v = objective(i * 1e-3); v < best) {
                best = v;
                arg = i * 1e-3;
            }
        const double centre = arg;
        for (int i = -2'000; i <= 2'000; ++i)
            if (double v = objective(centre + i * 1e-6); v < best) {
                best = v;
                arg = centre + i * 1e-6;
            }
        double best_rate = computation_rate_at(hh, aa, rho, arg);
        double alpha = optimal_alpha(hh, aa, rho);
        CHECK(std::abs(arg - alpha) <= 1e-6 + 1e-12);
        CHECK(std::abs(computation_rate_at(hh, aa, rho, alpha) - computation_rate(hh, aa, rho)) < 1e-12);
        CHECK(computation_rate(hh, aa, rho) >= best_rate - 1e-12);
        CHECK(computation_rate(hh, aa, rho) - best_rate < 1e-6);
    }
}

TEST_CASE("SVP coefficients agree with the box oracle and are primitive") {
    CHECK(best_coefficients_svp(rv(1, 0), 7.0).a == iv(1, 0));
    CHECK(best_coefficients_svp(rv(0.3, -0.8), 1e-12).a == iv(1, 0));
    CHECK(best_coefficients_box(rv(0.3, -0.8), 1e-12, 3).a == iv(1, 0));
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ur(0.0, 100.0);
    for (int t = 0; t < 1000; ++t) {
        Vector h = rv(g(rng), g(rng));
        double rho = std::max(1e-3, ur(rng));
        CoefficientChoice s = best_coefficients_svp(h, rho);
        CoefficientChoice b = best_coefficients_box(h, rho, 8);
        CHECK(s.a == b.a);
        CHECK(gcd(s.a(0), s.a(1)) == 1);
        CHECK(s.rate == doctest::Approx(b.rate));
    }
}

TEST_CASE("parity candidate sets") {
    for (std::int64_t a1 = -8; a1 <= 8; ++a1)
        for (std::int64_t a2 = -8; a2 <= 8; ++a2) {
            if (!(a1 % 2 != 0 && a2 % 2 == 0)) continue;
            for (std::int64_t b1 = -8; b1 <= 8; ++b1)
                for (std::int64_t b2 = -8; b2 <= 8; ++b2) {
                    if (!(b1 % 2 == 0 && b2 % 2 != 0)) continue;
                    CHECK(std::llabs(a1 * b2 - a2 * b1) % 2 == 1);
                }
        }
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int t = 0; t < 2000; ++t) {
        Vector h = rv(g(rng), g(rng));
        CoefficientChoice c1 = candidate_set_choice(h, 10.0, 1), c2 = candidate_set_choice(h, 10.0, 2);
        CHECK(c1.a(0) % 2 != 0);
        CHECK(c1.a(1) % 2 == 0);
        CHECK(c2.a(0) % 2 == 0);
        CHECK(c2.a(1) % 2 != 0);
        CHECK(c1.rate > 0.0);
        CHECK(c2.rate > 0.0);
        CoefficientChoice s = best_coefficients_svp(h, 10.0);
        CHECK(s.rate >= std::max(c1.rate, c2.rate) - 1e-12);
    }
}

TEST_CASE("singularity probability") {
    std::vector<double> grid{0, 10, 20};
    SimulationReport cand = singularity_probability(grid, 5000, 3, {2, CoefficientStrategy::CandidateSets, 8, 1});
    for (const auto& p : cand.points) {
        CHECK(p.errors == 0);
        CHECK(p.extra["min_rate"].get<double>() > 0.0);
        double r1 = p.extra["mean_rate_relay1"].get<double>(), r2 = p.extra["mean_rate_relay2"].get<double>();
        CHECK(std::abs(r1 - r2) / (0.5 * (r1 + r2)) < 0.05);
    }
    SimulationReport svp = singularity_probability({10}, 5000, 3, {2, CoefficientStrategy::Svp, 8, 1});
    CHECK(svp.points[0].errors > 0);
    MESSAGE("svp singular fraction at 10 dB: " << svp.points[0].rate);
    SimulationReport one = singularity_probability({10}, 1000, 3, {1, CoefficientStrategy::Svp, 8, 1});
    CHECK(one.points[0].errors == 0);
    SimulationReport svp3 = singularity_probability({10}, 5000, 3, {2, CoefficientStrategy::Svp, 8, 3});
    CHECK(to_json(svp3).dump() == to_json(svp).dump());
    CHECK_THROWS_AS(singularity_probability({10}, 10, 3, {3, CoefficientStrategy::CandidateSets, 8, 1}), ConfigError);
}

TEST_CASE("scenario validation") {
    CHECK_NOTHROW(CFScenario(catalog("A2"), {IntMatrix::Identity(2, 2), diag(2, 2)}, diag(4, 4), {rv(1, 1)}, 10));
    CHECK_THROWS_AS(CFScenario(catalog("Z2"), {diag(2, 2), IntMatrix::Identity(2, 2)}, diag(4, 4), {rv(1, 1)}, 10),
                    ConfigError);
    CHECK_THROWS_AS(CFScenario(catalog("Z2"), {diag(3, 3)}, diag(4, 4), {Vector::Ones(1)}, 10), ConfigError);
}

TEST_CASE("SD relay decoding") {
    CFScenario s(catalog("A2"), {IntMatrix::Identity(2, 2), diag(2, 2)}, diag(8, 8), {rv(1, 2), rv(2, -1)}, 1e9);
    IntVector a1 = iv(1, 2), a2 = iv(2, -1);
    Rng rng = make_rng(1, 0, 0);
    for (std::int64_t w1 = 0; w1 < 64; w1 += 5)
        for (std::int64_t w2 = 0; w2 < 16; w2 += 3) {
            std::vector<std::int64_t> msg{w1, w2};
            Vector y = s.base().point(s.codeword_coords(0, w1)) + 2.0 * s.base().point(s.codeword_coords(1, w2));
            CosetPoint d = relay_decode_sd(s, 0, y, a1, 1.0);
            CHECK(d.coset == true_combination(s, msg, a1).coset);
            auto ys = cf_transmit(s, msg, rng);
            CHECK(relay_decode_sd(s, 1, ys[1], a2, 1.0).coset == true_combination(s, msg, a2).coset);
        }
    // One source: plain lattice decoding followed by the modulo reduction.
    CFScenario one(catalog("Z2"), {IntMatrix::Identity(2, 2)}, diag(4, 4), {Vector::Ones(1)}, 1e9);
    Vector y = rv(1.3, -2.6);
    CosetPoint d = relay_decode_sd(one, 0, y, IntVector::Ones(1), 1.0);
    CHECK(d.coords == iv(1, 1));
}

TEST_CASE("effective noise raises the SD error rate") {
    std::vector<double> rates;
    for (double t : {0.0, 0.05, 0.1}) {
        CFScenario s(catalog("Z2"), {IntMatrix::Identity(2, 2), IntMatrix::Identity(2, 2)}, diag(8, 8),
                     {rv(1 + t, 1 - t)}, 1000.0);
        std::size_t errors = 0;
        const int trials = 2000;
        for (int i = 0; i < trials; ++i) {
            Rng rng = make_rng(8, 0, static_cast<std::uint64_t>(i));
            std::uniform_int_distribution<std::int64_t> w(0, 63);
            std::vector<std::int64_t> msg{w(rng), w(rng)};
            auto ys = cf_transmit(s, msg, rng);
            errors += relay_decode_sd(s, 0, ys[0], iv(1, 1), 1.0).coset != true_combination(s, msg, iv(1, 1)).coset;
        }
        rates.push_back(static_cast<double>(errors) / trials);
    }
    MESSAGE("error rates: " << rates[0] << " " << rates[1] << " " << rates[2]);
    CHECK(rates[0] <= rates[1]);
    CHECK(rates[1] <= rates[2]);
    CHECK(rates[0] < rates[2]);
}

TEST_CASE("ML relay decoding") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    int flagged = 0, agree = 0, nonflat = 0;
    for (int t = 0; t < 300; ++t) {
        Vector h = rv(g(rng), g(rng));
        CFScenario s(catalog("Z1"), {scalar(1), scalar(2)}, scalar(4), {h}, 1.0 + (t % 10));
        IntVector a = best_coefficients_svp(h, s.rho()).a;
        Rng r = make_rng(31, 1, static_cast<std::uint64_t>(t));
        std::vector<std::int64_t> msg{static_cast<std::int64_t>(t % 4), static_cast<std::int64_t>((t / 4) % 2)};
        Vector y = cf_transmit(s, msg, r)[0];
        MLDecision d = relay_decode_ml(s, 0, y, a);
        CHECK(static_cast<double>(d.lambda(0)) == oracle::ml_argmax_1d(s, 0, y(0), a));
        if (d.flat) {
            ++flagged;
            CHECK(std::exp(d.profile[1].log_phi - d.profile[0].log_phi) > 1 - 1e-3);
        }
    }
    MESSAGE("flat profiles among 300 draws: " << flagged);
    // High SNR: ML and SD agree on the decoded coset.
    for (int t = 0; t < 500; ++t) {
        Vector h = rv(g(rng), g(rng));
        CFScenario s(catalog("Z1"), {scalar(1), scalar(1)}, scalar(4), {h}, 1000.0);
        CoefficientChoice c = best_coefficients_svp(h, s.rho());
        Rng r = make_rng(32, 1, static_cast<std::uint64_t>(t));
        std::vector<std::int64_t> msg{static_cast<std::int64_t>(t % 4), static_cast<std::int64_t>((t / 4) % 4)};
        Vector y = cf_transmit(s, msg, r)[0];
        MLDecision d = relay_decode_ml(s, 0, y, c.a);
        if (d.flat) continue;
        ++nonflat;
        agree += d.decoded.coset == relay_decode_sd(s, 0, y, c.a, c.alpha).coset;
    }
    MESSAGE("ML/SD agreement: " << agree << " / " << nonflat);
    CHECK(agree >= 0.99 * nonflat);

    CFScenario s(catalog("Z1"), {scalar(1), scalar(1)}, scalar(4), {rv(1, 1)}, 1e12);
    Vector y = Vector::Constant(1, s.base().point(s.codeword_coords(0, 1))(0) + s.base().point(s.codeword_coords(1, 2))(0));
    CHECK(relay_decode_ml(s, 0, y, iv(1, 1)).decoded.coset == relay_decode_sd(s, 0, y, iv(1, 1), 1.0).coset);
    CHECK_THROWS_AS(relay_decode_ml(s, 0, y, iv(1, 1), 8), CapacityError);
}

TEST_CASE("destination recovery over the coset group") {
    NestedCodePair pair(catalog("Z2"), diag(3, 3));
    auto leaders = coset_leaders(pair);
    IntMatrix hadamard(2, 2);
    hadamard << 1, 1, 1, -1;
    for (const auto& x : leaders)
        for (const auto& z : leaders) {
            DestinationResult id = destination_solve(IntMatrix::Identity(2, 2), {x.coords, z.coords}, pair);
            REQUIRE(id.solved);
            CHECK(id.cosets[0] == coset_index(pair, x.coords));
            CHECK(id.cosets[1] == coset_index(pair, z.coords));
            DestinationResult r = destination_solve(hadamard, {IntVector(x.coords + z.coords), IntVector(x.coords - z.coords)}, pair);
            REQUIRE(r.solved);
            CHECK(r.cosets[0] == coset_index(pair, x.coords));
            CHECK(r.cosets[1] == coset_index(pair, z.coords));
        }
    IntMatrix three(2, 2);
    three << 1, 1, 1, -2;
    DestinationResult f = destination_solve(three, {iv(0, 0), iv(1, 0)}, pair);
    CHECK_FALSE(f.solved);
    CHECK(f.rank_defect == 0);
    CHECK(determinant(three) != 0);
    NestedCodePair even(catalog("Z2"), diag(2, 4));
    CHECK_FALSE(destination_solve(hadamard, {iv(0, 0), iv(1, 0)}, even).solved);
    IntMatrix sing(2, 2);
    sing << 1, 2, 2, 4;
    DestinationResult d = destination_solve(sing, {iv(0, 0), iv(1, 0)}, pair);
    CHECK_FALSE(d.solved);
    CHECK(d.rank_defect == 1);
    // Three relays, two sources, over a cyclic group of order 5.
    NestedCodePair z5(catalog("Z1"), scalar(5));
    IntMatrix tall(3, 2);
    tall << 1, 1, 1, 2, 2, 1;
    for (std::int64_t u = 0; u < 5; ++u)
        for (std::int64_t v = 0; v < 5; ++v) {
            auto l = [&](std::int64_t p, std::int64_t q) { return IntVector::Constant(1, p * u + q * v); };
            DestinationResult r = destination_solve(tall, {l(1, 1), l(1, 2), l(2, 1)}, z5);
            REQUIRE(r.solved);
            CHECK(r.cosets[0] == coset_index(z5, IntVector::Constant(1, u)));
            CHECK(r.cosets[1] == coset_index(z5, IntVector::Constant(1, v)));
        }
    CHECK_FALSE(destination_solve(tall, {IntVector::Constant(1, 1), IntVector::Constant(1, 0), IntVector::Constant(1, 0)}, z5).solved);
}
