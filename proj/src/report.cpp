#include "latticeforge/report.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace latticeforge {

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {};
    const double n = static_cast<double>(trials), p = static_cast<double>(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2 * n)) / denom;
    const double half = z / denom * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SimulationPoint make_point(double snr_db, std::size_t trials, std::size_t errors) {
    SimulationPoint p;
    p.snr_db = snr_db;
    p.trials = trials;
    p.errors = errors;
    p.rate = trials ? static_cast<double>(errors) / static_cast<double>(trials) : 0.0;
    p.ci = wilson_interval(errors, trials);
    return p;
}

nlohmann::json to_json(const SimulationReport& report) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : report.points) {
        nlohmann::json j = {{"snr_db", p.snr_db}, {"trials", p.trials}, {"errors", p.errors},
                            {"rate", p.rate},     {"ci", {p.ci.low, p.ci.high}}};
        for (const auto& [k, v] : p.extra.items()) j[k] = v;
        pts.push_back(j);
    }
    return {{"experiment", report.experiment}, {"seed", report.seed}, {"config", report.config}, {"points", pts}};
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_csv(const SimulationReport& report) {
    std::set<std::string> keys;
    for (const auto& p : report.points)
        for (const auto& [k, v] : p.extra.items()) keys.insert(k);
    std::ostringstream out;
    out << "snr_db,trials,errors,rate,ci_low,ci_high";
    for (const auto& k : keys) out << ',' << k;
    out << '\n';
    for (const auto& p : report.points) {
        out << format_double(p.snr_db) << ',' << p.trials << ',' << p.errors << ',' << format_double(p.rate) << ','
            << format_double(p.ci.low) << ',' << format_double(p.ci.high);
        for (const auto& k : keys) {
            out << ',';
            if (!p.extra.contains(k)) continue;
            const auto& v = p.extra.at(k);
            if (v.is_number_float())
                out << format_double(v.get<double>());
            else if (v.is_string())
                out << v.get<std::string>();
            else
                out << v.dump();
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace latticeforge
