#include "latticeforge/theta.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>

#include "latticeforge/special_functions.hpp"

namespace latticeforge {

namespace {

void check_q(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw DomainError("theta series needs 0 <= q < 1");
}

double log_binomial(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

// Tail bound for a decay rate c = -ln q and point-count model V_n (sqrt t + mu)^n / vol.
double tail_bound_raw(int n, double volume, double mu, double c, double cutoff) {
    // integral_R^inf (sqrt t + mu)^n c e^{-ct} dt = sum_k C(n,k) mu^{n-k} Gamma(k/2+1, cR) / c^{k/2}
    const double log_vn = std::log(unit_ball_volume(n)) - std::log(volume);
    double total = 0.0;
    for (int k = 0; k <= n; ++k) {
        if (mu == 0.0 && k < n) continue;
        double lg = log_upper_incomplete_gamma(0.5 * k + 1.0, c * cutoff);
        double lt = log_binomial(n, k) + (n - k) * (mu > 0 ? std::log(mu) : 0.0) - 0.5 * k * std::log(c) + lg;
        total += std::exp(log_vn + lt);
    }
    return total;
}

double cutoff_raw(int n, double volume, double mu, double c, double tol) {
    double hi = 1.0;
    int guard = 0;
    while (tail_bound_raw(n, volume, mu, c, hi) > tol) {
        hi *= 2.0;
        if (++guard > 200) throw DomainError("theta tail bound does not reach the requested tolerance");
    }
    double lo = 0.0;
    for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        if (tail_bound_raw(n, volume, mu, c, mid) > tol)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

std::string canonical(const std::string& name) {
    std::string key;
    for (char ch : name) key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    if (key == "LAMBDA24" || key == "L24") key = "LEECH";
    return key;
}

// Truncated power series in q^{1/4}.
struct QSeries {
    std::vector<double> c;
    explicit QSeries(std::size_t degree = 0) : c(degree + 1, 0.0) {}
    std::size_t degree() const { return c.size() - 1; }
};

QSeries operator*(const QSeries& a, const QSeries& b) {
    QSeries r(a.degree());
    for (std::size_t i = 0; i <= a.degree(); ++i) {
        if (a.c[i] == 0.0) continue;
        for (std::size_t j = 0; i + j <= a.degree(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
}

QSeries operator+(QSeries a, const QSeries& b) {
    for (std::size_t i = 0; i <= a.degree(); ++i) a.c[i] += b.c[i];
    return a;
}

QSeries operator*(double s, QSeries a) {
    for (double& v : a.c) v *= s;
    return a;
}

QSeries power(const QSeries& a, int e) {
    QSeries r(a.degree());
    r.c[0] = 1.0;
    for (int i = 0; i < e; ++i) r = r * a;
    return r;
}

// theta_which(q^k) as a series in q^{1/4}.
QSeries jacobi_series(int which, int k, std::size_t degree) {
    QSeries s(degree);
    for (long i = -static_cast<long>(degree); i <= static_cast<long>(degree); ++i) {
        long e;
        double sign = 1.0;
        if (which == 2) {
            e = k * (4 * i * i + 4 * i + 1);
        } else {
            e = 4L * k * i * i;
            if (which == 4 && (i % 2 != 0)) sign = -1.0;
        }
        if (e >= 0 && static_cast<std::size_t>(e) <= degree) s.c[static_cast<std::size_t>(e)] += sign;
    }
    return s;
}

// Evaluates the same closed forms either numerically or as series, through a theta provider.
template <class T, class Theta>
T closed_form(const std::string& key, Theta&& th, std::function<T(double, T)> scale, std::function<T(T, int)> pw) {
    auto a2 = [&](int k) { return th(2, k) * th(2, 3 * k) + th(3, k) * th(3, 3 * k); };
    if (key == "A2") return a2(1);
    if (key == "E8") return scale(0.5, pw(th(2, 1), 8) + pw(th(3, 1), 8) + pw(th(4, 1), 8));
    if (key == "K12") {
        T a = a2(4);
        T t = th(2, 1) * th(2, 3);
        return scale(9.0 / 32.0, pw(t, 6)) + pw(a, 6) + scale(45.0 / 16.0, pw(t, 4) * pw(a, 2));
    }
    if (key == "LEECH") {
        T e8 = scale(0.5, pw(th(2, 1), 8) + pw(th(3, 1), 8) + pw(th(4, 1), 8));
        T eta = th(2, 1) * th(3, 1) * th(4, 1);
        return pw(e8, 3) + scale(-45.0 / 16.0, pw(eta, 8));
    }
    if (!key.empty() && (key[0] == 'Z' || key[0] == 'D') && key.size() > 1 &&
        std::all_of(key.begin() + 1, key.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        int n = std::stoi(key.substr(1));
        if (key[0] == 'Z') return pw(th(3, 1), n);
        return scale(0.5, pw(th(3, 1), n) + pw(th(4, 1), n));
    }
    throw ConfigError("no closed-form theta series for " + key);
}

}  // namespace

double estimated_point_count(const Lattice& lat, double r) {
    return unit_ball_volume(lat.dim()) * std::pow(std::max(r, 0.0), 0.5 * lat.dim()) / lat.volume();
}

double theta_tail_bound(const Lattice& lat, double q, double cutoff) {
    check_q(q);
    if (q == 0.0) return 0.0;
    return tail_bound_raw(lat.dim(), lat.volume(), lat.covering_radius_bound(), -std::log(q), cutoff);
}

double theta_cutoff(const Lattice& lat, double q, double tail_tol) {
    check_q(q);
    if (!(tail_tol > 0)) throw DomainError("tail tolerance must be positive");
    if (q == 0.0) return 0.0;
    return cutoff_raw(lat.dim(), lat.volume(), lat.covering_radius_bound(), -std::log(q), tail_tol);
}

ThetaEvaluation theta_truncated(const Lattice& lat, double q, double tail_tol, const EnumerationLimits& limits) {
    check_q(q);
    ThetaEvaluation ev;
    if (q == 0.0) {
        ev.value = 1.0;
        ev.points = 1;
        return ev;
    }
    ev.cutoff = theta_cutoff(lat, q, tail_tol);
    ev.tail_bound = theta_tail_bound(lat, q, ev.cutoff);
    const double lq = std::log(q);
    KahanSum sum;
    ev.points = for_each_norm(lat, ev.cutoff, [&](double p) { sum.add(std::exp(lq * p)); }, limits);
    ev.value = sum.value();
    return ev;
}

double ThetaSeries::evaluate(double q, double upto) const {
    check_q(q);
    KahanSum sum;
    for (auto it = shells.rbegin(); it != shells.rend(); ++it) {
        if (upto >= 0 && it->norm > upto + norm_tolerance(upto)) continue;
        sum.add(static_cast<double>(it->count) * (it->norm == 0.0 ? 1.0 : std::pow(q, it->norm)));
    }
    return sum.value();
}

ThetaSeries theta_series(const Lattice& lat, double cutoff, const EnumerationLimits& limits) {
    std::map<double, std::uint64_t> shells;
    for_each_norm(
        lat, cutoff,
        [&](double p) {
            double tol = norm_tolerance(p);
            auto it = shells.lower_bound(p - tol);
            if (it != shells.end() && it->first <= p + tol) {
                ++it->second;
            } else {
                shells.emplace(p, 1);
            }
        },
        limits);
    ThetaSeries s;
    s.cutoff = cutoff;
    for (const auto& [norm, count] : shells) s.shells.push_back({norm < norm_tolerance(0.0) ? 0.0 : norm, count});
    return s;
}

double jacobi_theta(int which, double q) {
    check_q(q);
    if (which != 2 && which != 3 && which != 4) throw ConfigError("jacobi_theta index must be 2, 3 or 4");
    if (q == 0.0) return which == 2 ? 0.0 : 1.0;
    const double lq = std::log(q);
    if (which == 2) {
        double sum = 0.0;
        for (long i = 0;; ++i) {
            double t = std::exp(lq * (i + 0.5) * (i + 0.5));
            sum += t;
            if (t < 1e-17 * sum || t == 0.0) break;
        }
        return 2.0 * sum;
    }
    double sum = 0.0;
    for (long i = 1;; ++i) {
        double t = std::exp(lq * static_cast<double>(i) * static_cast<double>(i));
        sum += (which == 4 && i % 2 != 0) ? -t : t;
        if (t < 1e-17 * std::abs(1.0 + 2.0 * sum) || t == 0.0) break;
    }
    return 1.0 + 2.0 * sum;
}

double theta_closed_form(const std::string& name, double q) {
    check_q(q);
    auto th = [&](int which, int k) { return jacobi_theta(which, std::pow(q, k)); };
    return closed_form<double>(
        canonical(name), th, [](double s, double v) { return s * v; }, [](double v, int e) { return std::pow(v, e); });
}

std::vector<double> closed_form_coefficients(const std::string& name, int max_norm) {
    if (max_norm < 0) throw DomainError("max_norm must be non-negative");
    const std::size_t degree = 4 * static_cast<std::size_t>(max_norm);
    std::map<std::pair<int, int>, QSeries> cache;
    auto th = [&](int which, int k) {
        auto key = std::make_pair(which, k);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, jacobi_series(which, k, degree)).first;
        return it->second;
    };
    QSeries s = closed_form<QSeries>(
        canonical(name), th, [](double f, QSeries v) { return f * std::move(v); }, power);
    std::vector<double> out(static_cast<std::size_t>(max_norm) + 1);
    for (std::size_t e = 0; e <= degree; ++e) {
        if (e % 4 == 0) {
            out[e / 4] = s.c[e];
        } else if (std::abs(s.c[e]) > 0.5) {
            throw ConfigError("closed form has a non-integral exponent");
        }
    }
    return out;
}

double theta_main_term(int n, double volume, double lambda1, double q) {
    check_q(q);
    if (q == 0.0) return 1.0;
    const double c = -std::log(q);
    const double s = 0.5 * n + 1.0;
    const double a = lambda1 * c;
    // c lambda1^s pi^{n/2} / (Gamma(s) vol) * Gamma(s, a) / a^s
    double log_integral = std::log(c) + s * std::log(lambda1) + 0.5 * n * std::log(kPi) - std::lgamma(s) -
                          std::log(volume) + log_upper_incomplete_gamma(s, a) - s * std::log(a);
    return (1.0 - std::pow(q, lambda1)) + std::exp(log_integral);
}

ThetaApproximation theta_approximation(const Lattice& lat, double q, double tail_tol, const EnumerationLimits& limits) {
    check_q(q);
    ThetaApproximation out;
    out.q = q;
    out.exact = theta_truncated(lat, q, tail_tol, limits).value;
    double lambda1 = successive_minima(lat, limits).minima.front();
    out.main = theta_main_term(lat.dim(), lat.volume(), lambda1, q);
    out.residual = std::abs(out.exact - out.main) / out.exact;
    return out;
}

nlohmann::json to_json(const ThetaApproximation& a) {
    return {{"q", a.q}, {"exact", a.exact}, {"main", a.main}, {"residual", a.residual}};
}

double flatness_factor(const Lattice& lat, double sigma2, double tail_tol, const EnumerationLimits& limits) {
    if (!(sigma2 > 0)) throw DomainError("flatness factor needs sigma^2 > 0");
    const int n = lat.dim();
    const double log_scale = std::log(lat.volume()) - 0.5 * n * std::log(2.0 * kPi * sigma2);
    const double q = std::exp(-1.0 / (2.0 * sigma2));
    const double theta_tol = std::max(tail_tol * std::exp(-log_scale), 1e-300);
    double theta = theta_truncated(lat, q, theta_tol, limits).value;
    double eps = std::exp(log_scale) * theta - 1.0;
    if (eps < 0.0 && eps > -std::max(tail_tol, 1e-12)) eps = 0.0;
    return eps;
}

double lattice_gaussian_sum(const Lattice& lat, const Vector& y, double sigma2, double tail_tol,
                            const EnumerationLimits& limits) {
    if (!(sigma2 > 0)) throw DomainError("lattice Gaussian needs sigma^2 > 0");
    const int n = lat.dim();
    const double log_norm = -0.5 * n * std::log(2.0 * kPi * sigma2);
    const double c = 1.0 / (2.0 * sigma2);
    const double tol = std::max(tail_tol * std::exp(-log_norm), 1e-300);
    double cutoff = cutoff_raw(n, lat.volume(), lat.covering_radius_bound(), c, tol);
    Vector t = lat.reduced_coordinates(-y);
    double radius2 = cutoff + norm_tolerance(cutoff);
    KahanSum sum;
    detail::enumerate_reduced(lat, t, radius2, limits.max_points,
                              [&](const std::vector<std::int64_t>&, double p) { sum.add(std::exp(-c * p)); });
    return std::exp(log_norm) * sum.value();
}

}  // namespace latticeforge
