#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = latticeforge::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "latticeforge_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("lattice info reports the catalog invariants") {
    Result r = run({"lattice", "info", "--name", "E8"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["command"] == "lattice info");
    CHECK(j["version"] == LATTICEFORGE_VERSION);
    CHECK(j["config"]["name"] == "E8");
    CHECK(j["result"]["lambda1"].get<double>() == doctest::Approx(2.0));
    CHECK(j["result"]["volume"].get<double>() == doctest::Approx(1.0));
    CHECK(j["result"]["kissing"] == 240);
    CHECK(r.err.find("wall_time_s=") != std::string::npos);
    CHECK(r.out.find("wall_time") == std::string::npos);
}

TEST_CASE("theta reports exact, main term and residual") {
    Result r = run({"theta", "--name", "A2", "--q", "0.3", "--mode", "both"});
    REQUIRE(r.code == 0);
    json row = json::parse(r.out)["result"][0];
    CHECK(row["exact"].get<double>() == doctest::Approx(row["closed_form"].get<double>()).epsilon(1e-12));
    CHECK(row["residual"].get<double>() ==
          doctest::Approx(std::abs(row["exact"].get<double>() - row["main"].get<double>()) / row["exact"].get<double>()));
    Result approx = run({"theta", "--name", "Z2", "--q", "0.1,0.2", "--mode", "approx"});
    REQUIRE(approx.code == 0);
    json rows = json::parse(approx.out)["result"];
    CHECK(rows.size() == 2);
    CHECK_FALSE(rows[0].contains("exact"));
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"lattice", "info", "--bogus", "1"}).code == 2);
    CHECK(run({"lattice", "info", "--name", "Q7"}).code == 2);
    CHECK(run({"lattice", "info", "--name", "Z8", "--cap", "10"}).code == 3);
    CHECK(run({"theta", "--name", "Z2", "--q", "1.5"}).code == 2);
    CHECK(run({"lattice", "info", "--format", "xml"}).code == 2);
    CHECK(run({"lattice", "info", "--config", "{\"nme\": \"E8\"}"}).code == 2);
    CHECK(run({"lattice", "info", "--config", "{\"schema\": 2}"}).code == 2);
    CHECK(run({"lattice", "info", "--config", "/nonexistent/config.json"}).code == 2);
    CHECK(run({"cf", "simulate", "--K", "2", "--M", "3", "--trials", "10"}).code == 2);
    CHECK(run({"lattice", "info", "--help"}).code == 0);
}

TEST_CASE("config files, inline config and flag precedence") {
    fs::path cfg = scratch("cf2.json");
    std::ofstream(cfg) << R"({"schema": 1, "K": 2, "M": 2, "rho_db": [0, 10], "strategy": "candidate_sets",
                           "B": 8, "trials": 1000, "seed": 5})";
    Result r = run({"cf", "simulate", "--config", cfg.string(), "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# seed=5\n") != std::string::npos);
    CHECK(r.out.find("snr_db,trials,errors,rate,ci_low,ci_high") != std::string::npos);
    CHECK(r.out.find("\n0,1000,0,") != std::string::npos);
    CHECK(r.out.find("\n10,1000,0,") != std::string::npos);
    Result o = run({"cf", "simulate", "--config", cfg.string(), "--seed", "6", "--rho-db", "10"});
    REQUIRE(o.code == 0);
    json j = json::parse(o.out);
    CHECK(j["seed"] == 6);
    CHECK(j["config"]["rho_db"] == 10);
    CHECK(j["config"]["strategy"] == "candidate_sets");
    CHECK_FALSE(j["config"].contains("threads"));
    Result inl = run({"lattice", "info", "--config", R"({"name": "D4"})"});
    REQUIRE(inl.code == 0);
    CHECK(json::parse(inl.out)["result"]["kissing"] == 24);
}

TEST_CASE("reruns are byte-identical regardless of thread count") {
    const std::vector<std::vector<std::string>> experiments = {
        {"stc", "simulate", "--code", "alamouti", "--snr-db", "3,6", "--trials", "500"},
        {"cf", "simulate", "--rho-db", "5,10", "--trials", "1000"},
        {"wiretap", "compare", "--draws", "100"},
        {"stc", "analyze", "--code", "golden", "--scan", "random", "--samples", "500"},
    };
    int id = 0;
    for (auto args : experiments) {
        for (const char* fmt : {"json", "csv"}) {
            std::vector<std::string> outputs;
            for (const char* threads : {"1", "3", "1"}) {
                fs::path p = scratch("run" + std::to_string(id++));
                auto a = args;
                a.insert(a.end(), {"--seed", "11", "--threads", threads, "--format", fmt, "--out", p.string()});
                REQUIRE(run(a).code == 0);
                outputs.push_back(slurp(p));
            }
            CHECK(outputs[0] == outputs[1]);
            CHECK(outputs[0] == outputs[2]);
            CHECK_FALSE(outputs[0].empty());
        }
    }
}

TEST_CASE("remaining subcommands") {
    Result f = run({"flatness", "--name", "Z1", "--sigma2", "0.05,0.2,1,5"});
    REQUIRE(f.code == 0);
    for (const auto& row : json::parse(f.out)["result"])
        CHECK(row["epsilon"].get<double>() == doctest::Approx(row["direct"].get<double>()).epsilon(1e-8));
    Result n = run({"nested", "--name", "A2", "--coarse-scale", "4"});
    REQUIRE(n.code == 0);
    CHECK(json::parse(n.out)["result"]["leaders"].size() == 16);
    Result s = run({"stc", "analyze", "--code", "alamouti", "--scan", "differences"});
    REQUIRE(s.code == 0);
    json sa = json::parse(s.out)["result"];
    CHECK(sa["min_det"]["value"].get<double>() == doctest::Approx(16.0));
    CHECK(sa["fast_decoding"]["exponent"] == 1);
    Result c = run({"cf", "rates", "--channels", "[[1,0],[0,1]]", "--rho-db", "20"});
    REQUIRE(c.code == 0);
    json cr = json::parse(c.out)["result"];
    CHECK(cr["relays"][0]["rate"].get<double>() == doctest::Approx(0.5 * std::log2(101.0)));
    CHECK(cr["det_A"] == 1);
    CHECK(run({"cf", "rates"}).code == 2);
    Result w = run({"wiretap", "bound", "--code", "alamouti", "--rho-e", "0,10"});
    REQUIRE(w.code == 0);
    json wr = json::parse(w.out)["result"];
    CHECK(wr["rows"][0]["divergent"] == true);
    CHECK(wr["rows"][1]["ecdp"].get<double>() > 1.0);
    CHECK(wr["delta1"].get<double>() == doctest::Approx(8.0));
    Result wc = run({"wiretap", "compare", "--draws", "100", "--format", "csv"});
    REQUIRE(wc.code == 0);
    CHECK(wc.out.find("candidate_id,wr,delta1,ecdp,eflat_mean,eflat_se\n2I,true,") != std::string::npos);
}
