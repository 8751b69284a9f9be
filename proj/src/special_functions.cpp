#include "latticeforge/special_functions.hpp"

#include <cmath>
#include <limits>

#include "latticeforge/errors.hpp"
#include "latticeforge/types.hpp"

namespace latticeforge {

namespace {

// log of the regularized lower series: log P(s, x) for x < s + 1.
double log_lower_series(double s, double x) {
    double term = 1.0 / s, sum = term;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (s + n);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return std::log(sum) - x + s * std::log(x) - std::lgamma(s);
}

// log Gamma(s, x) by Lentz's continued fraction, x >= s + 1.
double log_upper_fraction(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return -x + s * std::log(x) + std::log(h);
}

}  // namespace

double log_upper_incomplete_gamma(double s, double x) {
    if (!(s > 0) || !(x >= 0)) throw DomainError("incomplete gamma needs s > 0 and x >= 0");
    if (x == 0) return std::lgamma(s);
    if (x < s + 1.0) {
        double p = std::exp(log_lower_series(s, x));
        return std::lgamma(s) + std::log1p(-std::min(p, 1.0));
    }
    return log_upper_fraction(s, x);
}

double upper_incomplete_gamma(double s, double x) { return std::exp(log_upper_incomplete_gamma(s, x)); }

double unit_ball_volume(int n) { return std::exp(0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0)); }

}  // namespace latticeforge
