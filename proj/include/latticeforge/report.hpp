#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace latticeforge {

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

struct SimulationPoint {
    double snr_db = 0.0;
    std::size_t trials = 0;
    std::size_t errors = 0;
    double rate = 0.0;
    WilsonInterval ci;
    // Extra per-point statistics; keys are emitted in sorted order.
    nlohmann::json extra = nlohmann::json::object();
};

struct SimulationReport {
    std::string experiment;
    std::uint64_t seed = 0;
    nlohmann::json config = nlohmann::json::object();
    std::vector<SimulationPoint> points;
};

SimulationPoint make_point(double snr_db, std::size_t trials, std::size_t errors);
nlohmann::json to_json(const SimulationReport& report);
std::string to_csv(const SimulationReport& report);

// Shortest round-trip decimal form, so repeated runs print identical text.
std::string format_double(double v);

}  // namespace latticeforge
