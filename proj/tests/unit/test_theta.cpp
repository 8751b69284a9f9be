#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "latticeforge/special_functions.hpp"
#include "latticeforge/theta.hpp"

using namespace latticeforge;

TEST_CASE("incomplete gamma agrees with Boost") {
    for (double s : {0.5, 1.0, 1.5, 2.0, 5.0, 13.0, 25.0})
        for (double x : {0.0, 0.01, 0.5, 1.0, 3.0, 10.0, 40.0, 200.0}) {
            CAPTURE(s);
            CAPTURE(x);
            double ref = boost::math::tgamma(s, x);
            if (ref > 1e-300) CHECK(upper_incomplete_gamma(s, x) == doctest::Approx(ref).epsilon(1e-12));
            double lref = std::log(boost::math::gamma_q(s, x)) + std::lgamma(s);
            if (std::isfinite(lref)) CHECK(log_upper_incomplete_gamma(s, x) == doctest::Approx(lref).epsilon(1e-10));
        }
}

TEST_CASE("Jacobi identity theta3^4 = theta2^4 + theta4^4") {
    for (double q : {0.01, 0.1, 0.3, 0.5, 0.8}) {
        double t2 = jacobi_theta(2, q), t3 = jacobi_theta(3, q), t4 = jacobi_theta(4, q);
        CHECK(std::pow(t3, 4) == doctest::Approx(std::pow(t2, 4) + std::pow(t4, 4)).epsilon(1e-13));
    }
    CHECK(jacobi_theta(3, 0.0) == 1.0);
    CHECK(jacobi_theta(2, 0.0) == 0.0);
    CHECK_THROWS_AS(jacobi_theta(3, 1.0), DomainError);
}

TEST_CASE("closed-form coefficients of known theta series") {
    auto e8 = closed_form_coefficients("E8", 6);
    CHECK(e8[0] == 1);
    CHECK(e8[1] == 0);
    CHECK(e8[2] == 240);
    CHECK(e8[4] == 2160);
    CHECK(e8[6] == 6720);
    auto leech = closed_form_coefficients("Leech", 8);
    CHECK(leech[2] == 0);
    CHECK(leech[4] == 196560);
    CHECK(leech[6] == 16773120);
    CHECK(leech[8] == 398034000);
    auto k12 = closed_form_coefficients("K12", 8);
    CHECK(k12[2] == 0);
    CHECK(k12[4] == 756);
    CHECK(k12[6] == 4032);
    CHECK(k12[8] == 20412);
    auto a2 = closed_form_coefficients("A2", 4);
    CHECK(a2[1] == 6);
    CHECK(a2[3] == 6);
    CHECK(a2[4] == 6);
}

TEST_CASE("closed forms agree with enumerated theta series") {
    for (const char* name : {"Z2", "Z5", "D3", "D4", "A2", "E8"}) {
        Lattice lat = catalog(name);
        for (double q : {0.1, 0.3}) {
            CAPTURE(name);
            CAPTURE(q);
            auto ev = theta_truncated(lat, q, 1e-13);
            double cf = theta_closed_form(name, q);
            CHECK(std::abs(ev.value - cf) <= 1e-11 * cf);
        }
    }
}

TEST_CASE("enumerated shell counts match closed-form coefficients") {
    for (const char* name : {"D5", "A2", "E8", "K12"}) {
        CAPTURE(name);
        Lattice lat = catalog(name);
        auto series = theta_series(lat, 8.0);
        auto cf = closed_form_coefficients(name, 8);
        std::vector<double> counted(9, 0.0);
        for (const auto& s : series.shells) {
            double r = std::round(s.norm);
            REQUIRE(std::abs(r - s.norm) < 1e-9);
            counted[static_cast<std::size_t>(r)] += static_cast<double>(s.count);
        }
        for (int m = 0; m <= 8; ++m) CHECK(counted[m] == cf[m]);
    }
}

TEST_CASE("tail bound dominates the true tail") {
    for (const char* name : {"Z1", "A2", "D4", "E8"}) {
        Lattice lat = catalog(name);
        for (double q : {0.2, 0.35}) {
            for (double cutoff : {2.0, 6.0, 10.0}) {
                // The true tail beyond `far` is itself below 1e-9.
                double far = theta_cutoff(lat, q, 1e-9);
                auto series = theta_series(lat, far);
                double tail = series.evaluate(q) - series.evaluate(q, cutoff) + 1e-9;
                CAPTURE(name);
                CAPTURE(q);
                CAPTURE(cutoff);
                CHECK(theta_tail_bound(lat, q, cutoff) >= tail);
            }
        }
    }
}

TEST_CASE("theta approximation residual vanishes as q -> 0") {
    for (const char* name : {"Z2", "A2", "E8"}) {
        Lattice lat = catalog(name);
        double prev = 1.0;
        for (double q : {1e-2, 1e-3, 1e-4, 1e-6}) {
            auto a = theta_approximation(lat, q);
            CAPTURE(name);
            CAPTURE(q);
            CHECK(a.residual < prev);
            prev = a.residual;
        }
        CHECK(prev < 1e-3);
    }
    auto j = to_json(theta_approximation(catalog("Z2"), 0.1));
    CHECK(j.contains("q"));
    CHECK(j.contains("exact"));
    CHECK(j.contains("main"));
    CHECK(j.contains("residual"));
}

TEST_CASE("flatness factor of Z1 matches the scalar series") {
    for (double s2 : {0.05, 0.2, 1.0, 5.0}) {
        // Oracle: sum over integers of exp(-k^2 / (2 s2)) / sqrt(2 pi s2), summed far into the tail.
        double sum = 0.0;
        for (int k = -2000; k <= 2000; ++k) sum += std::exp(-k * k / (2.0 * s2));
        double eps = sum / std::sqrt(2 * kPi * s2) - 1.0;
        CHECK(flatness_factor(catalog("Z1"), s2) == doctest::Approx(eps).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("flatness factor decreases with sigma^2 and is non-negative") {
    Lattice a2 = catalog("A2");
    double prev = 1e300;
    for (double s2 : {0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
        double e = flatness_factor(a2, s2);
        CHECK(e >= 0.0);
        CHECK(e < prev);
        prev = e;
    }
    CHECK_THROWS_AS(flatness_factor(a2, 0.0), DomainError);
}

TEST_CASE("lattice Gaussian sum is periodic and matches the centered identity") {
    Lattice a2 = catalog("A2");
    Vector y(2);
    y << 0.3, -0.2;
    double s2 = 0.3;
    double base = lattice_gaussian_sum(a2, y, s2);
    for (int i = 0; i < 2; ++i) {
        Vector shifted = y + a2.basis().col(i);
        CHECK(lattice_gaussian_sum(a2, shifted, s2) == doctest::Approx(base).epsilon(1e-12));
    }
    double centered = lattice_gaussian_sum(a2, Vector::Zero(2), s2);
    CHECK(centered * a2.volume() - 1.0 == doctest::Approx(flatness_factor(a2, s2)).epsilon(1e-10));
    CHECK(centered >= base);
}
