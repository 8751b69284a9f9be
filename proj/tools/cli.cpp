#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latticeforge/channel.hpp"
#include "latticeforge/compute_forward.hpp"
#include "latticeforge/errors.hpp"
#include "latticeforge/fast_decoding.hpp"
#include "latticeforge/integer_matrix.hpp"
#include "latticeforge/lattice.hpp"
#include "latticeforge/nested_code.hpp"
#include "latticeforge/report.hpp"
#include "latticeforge/stc.hpp"
#include "latticeforge/theta.hpp"
#include "latticeforge/wiretap.hpp"

namespace latticeforge::cli {

namespace {

using json = nlohmann::json;

struct Param {
    std::string key;
    std::string help;
};

struct Context {
    json cfg = json::object();
    std::uint64_t seed = 1;
    int threads = 0;
    EnumerationLimits limits;

    bool has(const std::string& key) const { return cfg.contains(key) && !cfg.at(key).is_null(); }

    template <class T>
    T get(const std::string& key, T fallback) {
        if (!has(key)) cfg[key] = fallback;
        return cfg.at(key).get<T>();
    }

    // A scalar is accepted where a list is expected.
    template <class T>
    std::vector<T> list(const std::string& key, std::vector<T> fallback) {
        if (!has(key)) cfg[key] = fallback;
        const json& v = cfg.at(key);
        if (!v.is_array()) return {v.get<T>()};
        return v.get<std::vector<T>>();
    }

    json& require(const std::string& key) {
        if (!has(key)) throw ConfigError("missing required parameter \"" + key + "\"");
        return cfg.at(key);
    }
};

struct Output {
    json result;
    std::string csv;
};

// Flag text: JSON literal if it parses, a comma list of such values, or a plain string.
json parse_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (!v.is_discarded()) return v;
    if (text.find(',') != std::string::npos) {
        json arr = json::array();
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) arr.push_back(parse_value(item));
        return arr;
    }
    return text;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    std::string inner;
    for (const auto& e : v) inner += (inner.empty() ? "" : ";") + csv_cell(e);
    return inner;
}

std::string table_csv(const json& rows, const std::vector<std::string>& columns) {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << (r.contains(columns[i]) ? csv_cell(r.at(columns[i])) : std::string());
        os << '\n';
    }
    return os.str();
}

std::string key_value_csv(const json& obj) {
    json rows = json::array();
    for (const auto& [k, v] : obj.items())
        if (!v.is_object()) rows.push_back({{"key", k}, {"value", v}});
    return table_csv(rows, {"key", "value"});
}

IntMatrix int_matrix(const json& j) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError("integer matrix must be a list of rows");
    IntMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(j[0].size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != j[0].size()) throw ConfigError("integer matrix rows have different lengths");
        for (std::size_t k = 0; k < j[i].size(); ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<std::int64_t>();
    }
    return m;
}

json int_matrix_json(const IntMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(r);
    }
    return rows;
}

template <class V>
json vec_json(const V& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

const std::vector<Param> kLatticeParams = {
    {"name", "catalog lattice (Z<n>, D<n>, A2, E8, K12, Leech)"},
    {"basis", "row-major basis entries, used with --n instead of --name"},
    {"n", "dimension for --basis"},
    {"scale", "scale factor applied to the basis"},
};

Lattice lattice_from(Context& c) {
    Lattice lat = c.has("basis") ? lattice_from_json({{"n", c.require("n")}, {"basis", c.require("basis")}})
                                 : catalog(c.get<std::string>("name", "Z2"));
    if (c.has("scale")) return Lattice(c.cfg.at("scale").get<double>() * lat.basis());
    return lat;
}

SpaceTimeCode code_from(Context& c) {
    const json& spec = c.has("code") ? c.cfg.at("code") : (c.cfg["code"] = "alamouti");
    if (spec.is_object()) return code_from_json(spec);
    std::string name = spec.get<std::string>();
    SpaceTimeCode code = name == "alamouti"            ? alamouti_code()
                         : name == "golden"            ? golden_code()
                         : name == "iterated_alamouti" ? iterated_alamouti()
                                                       : throw ConfigError("unknown code: " + name);
    if (c.has("alphabet")) code.alphabet = c.list<std::int64_t>("alphabet", {});
    return code;
}

// Wiretap fine lattice: a named or inline code, else a real lattice.
MatrixLattice wiretap_fine(Context& c) {
    if (c.has("code")) return MatrixLattice::from_code(code_from(c));
    return MatrixLattice::from_lattice(lattice_from(c));
}

IntMatrix subgroup_from(Context& c, int n) {
    if (c.has("subgroup")) return int_matrix(c.cfg.at("subgroup"));
    return c.get<std::int64_t>("coarse_scale", 2) * IntMatrix::Identity(n, n);
}

// ---- commands -------------------------------------------------------------

Output lattice_info(Context& c) {
    Lattice lat = lattice_from(c);
    MinimaProfile p = successive_minima(lat, c.limits);
    json r{{"n", lat.dim()},
           {"volume", lat.volume()},
           {"lambda1", p.minima.front()},
           {"minima", p.minima},
           {"kissing", p.kissing},
           {"well_rounded", is_well_rounded(lat, 1e-9, c.limits)},
           {"covering_radius_bound", lat.covering_radius_bound()},
           {"lattice", to_json(lat)}};
    return {r, key_value_csv(r)};
}

Output theta_cmd(Context& c) {
    Lattice lat = lattice_from(c);
    const std::string mode = c.get<std::string>("mode", "both");
    if (mode != "exact" && mode != "approx" && mode != "both") throw ConfigError("mode must be exact, approx or both");
    const double tol = c.get<double>("tail_tol", 1e-12);
    const bool closed = !c.has("basis") && !c.has("scale");
    double lambda1 = 0.0;
    if (mode != "exact") lambda1 = successive_minima(lat, c.limits).minima.front();
    json rows = json::array();
    for (double q : c.list<double>("q", {0.1, 0.3, 0.5})) {
        json row{{"q", q}};
        if (mode != "approx") {
            ThetaEvaluation e = theta_truncated(lat, q, tol, c.limits);
            row["exact"] = e.value;
            row["cutoff"] = e.cutoff;
            row["points"] = e.points;
            if (closed) {
                try {
                    row["closed_form"] = theta_closed_form(c.cfg.at("name").get<std::string>(), q);
                } catch (const ConfigError&) {
                }
            }
        }
        if (mode != "exact") {
            row["main"] = theta_main_term(lat.dim(), lat.volume(), lambda1, q);
            if (mode == "both")
                row["residual"] = std::abs(row["exact"].get<double>() - row["main"].get<double>()) / row["exact"].get<double>();
        }
        rows.push_back(row);
    }
    return {rows, table_csv(rows, {"q", "exact", "main", "residual", "closed_form", "cutoff", "points"})};
}

Output flatness_cmd(Context& c) {
    Lattice lat = lattice_from(c);
    const double tol = c.get<double>("tail_tol", 1e-12);
    json rows = json::array();
    for (double s2 : c.list<double>("sigma2", {0.05, 0.2, 1.0, 5.0})) {
        double eps = flatness_factor(lat, s2, tol, c.limits);
        double direct = lat.volume() * lattice_gaussian_sum(lat, Vector::Zero(lat.dim()), s2, tol, c.limits) - 1.0;
        rows.push_back({{"sigma2", s2}, {"epsilon", eps}, {"direct", direct}});
    }
    return {rows, table_csv(rows, {"sigma2", "epsilon", "direct"})};
}

Output nested_cmd(Context& c) {
    Lattice fine = lattice_from(c);
    NestedCodePair pair(fine, subgroup_from(c, fine.dim()));
    json r = codebook_json(pair, c.limits);
    auto samples = c.get<std::size_t>("nsm_samples", 0);
    if (samples > 0) {
        MonteCarloEstimate nsm = normalized_second_moment(pair.coarse(), samples, c.seed);
        r["coarse_nsm"] = {{"value", nsm.value}, {"std_error", nsm.std_error}, {"samples", nsm.samples}};
    }
    json rows = json::array();
    for (std::size_t m = 0; m < r["leaders"].size(); ++m)
        rows.push_back({{"message", m}, {"coords", r["leaders"][m]["coords"]}, {"point", r["leaders"][m]["point"]}});
    return {r, table_csv(rows, {"message", "coords", "point"})};
}

Output stc_analyze(Context& c) {
    SpaceTimeCode code = code_from(c);
    std::string scan_name = c.get<std::string>("scan", "exhaustive");
    DeterminantScan scan;
    scan.mode = scan_name == "exhaustive"    ? ScanMode::Exhaustive
                : scan_name == "differences" ? ScanMode::Differences
                : scan_name == "random"      ? ScanMode::Random
                                             : throw ConfigError("scan must be exhaustive, differences or random");
    scan.samples = c.get<std::size_t>("samples", 10'000);
    scan.seed = c.seed;
    json r{{"code", to_json(code)}, {"k", code.rank()}, {"n_t", code.rows()}, {"T", code.cols()}, {"rate", code.rate()}};
    if (code.rows() == code.cols()) {
        MinDeterminant md = min_determinant(code, scan);
        r["min_det"] = {{"value", md.value}, {"min_rank", md.min_rank}, {"scanned", md.scanned}, {"argmin", vec_json(md.argmin)}};
        NormalizedDensity nd = normalized_density(code, md.value);
        r["density"] = {{"min_det", nd.min_det}, {"volume", nd.volume}, {"delta", nd.delta}, {"eta", nd.eta},
                        {"degenerate", nd.degenerate}};
    }
    FDReport fd = hr_group_partition(code);
    r["fast_decoding"] = to_json(fd);
    const int n_r = c.get<int>("n_r", 2);
    const auto trials = c.get<std::size_t>("r_trials", 100);
    double worst = 0.0;
    std::size_t deficient = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = make_rng(c.seed, 0, t);
        CMatrix h = complex_gaussian(n_r, code.rows(), 1.0, rng);
        RPattern p = r_matrix_pattern(code, h, fd);
        deficient += p.rank_deficient;
        for (std::size_t a = 0; a < p.zero.size(); ++a)
            for (std::size_t b = 0; b < p.zero[a].size(); ++b)
                if (fd.predicted_zero[a][b])
                    worst = std::max(worst, std::abs(p.r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))));
    }
    r["r_pattern"] = {{"trials", trials}, {"n_r", n_r}, {"max_predicted_abs", worst}, {"rank_deficient_draws", deficient}};
    json flat{{"k", r["k"]}, {"n_t", r["n_t"]}, {"T", r["T"]}, {"rate", r["rate"]}, {"fd_kind", fd.kind},
              {"fd_exponent", fd.exponent}, {"fd_reduction", complexity_reduction(fd)}, {"r_max_predicted_abs", worst}};
    if (r.contains("min_det")) {
        flat["min_det"] = r["min_det"]["value"];
        flat["min_rank"] = r["min_det"]["min_rank"];
        flat["delta"] = r["density"]["delta"];
        flat["eta"] = r["density"]["eta"];
    }
    return {r, key_value_csv(flat)};
}

Output stc_simulate(Context& c) {
    SpaceTimeCode code = code_from(c);
    ChannelModel model;
    std::string kind = c.get<std::string>("channel", "rayleigh");
    if (kind == "af") {
        model.kind = ChannelModel::Kind::AFRelay;
    } else if (kind != "rayleigh") {
        throw ConfigError("channel must be rayleigh or af");
    }
    model.n_r = c.get<int>("n_r", model.n_r);
    model.sigma_h2 = c.get<double>("sigma_h2", model.sigma_h2);
    if (model.kind == ChannelModel::Kind::AFRelay) {
        model.relays = c.get<int>("relays", 1);
        model.n_t = c.get<int>("af_n_t", 2);
        model.n_R = c.get<int>("n_R", 2);
        model.rho1 = c.get<double>("rho1", 1.0);
        model.rho2 = c.get<double>("rho2", 1.0);
        model.rho3 = c.get<double>("rho3", 1.0);
        model.rho1p = c.get<double>("rho1p", 1.0);
    }
    SimulationReport rep = monte_carlo_cwer(code, c.list<double>("snr_db", {0, 5, 10, 15}),
                                            c.get<std::size_t>("trials", 10'000), c.seed, model, c.threads);
    return {to_json(rep), to_csv(rep)};
}

Output cf_rates(Context& c) {
    auto channels = c.require("channels").get<std::vector<std::vector<double>>>();
    const double rho = std::pow(10.0, c.get<double>("rho_db", 10.0) / 10.0);
    CoefficientStrategy s = parse_strategy(c.get<std::string>("strategy", "svp"));
    const int bound = c.get<int>("bound", 8);
    if (channels.empty()) throw ConfigError("channels must hold one gain vector per relay");
    const auto k = static_cast<Eigen::Index>(channels.front().size());
    IntMatrix a(static_cast<Eigen::Index>(channels.size()), k);
    json rows = json::array();
    for (std::size_t m = 0; m < channels.size(); ++m) {
        if (static_cast<Eigen::Index>(channels[m].size()) != k) throw ConfigError("channel vectors differ in length");
        Vector h = Eigen::Map<const Vector>(channels[m].data(), k);
        CoefficientChoice ch = choose_coefficients(h, rho, s, static_cast<int>(m) + 1, bound);
        a.row(static_cast<Eigen::Index>(m)) = ch.a.transpose();
        rows.push_back({{"relay", m + 1}, {"h", channels[m]}, {"a", vec_json(ch.a)}, {"alpha", ch.alpha}, {"rate", ch.rate}});
    }
    json r{{"rho", rho}, {"strategy", strategy_name(s)}, {"relays", rows}, {"rank_A", rank(a)}};
    if (a.rows() == a.cols()) r["det_A"] = determinant(a);
    r["singular"] = rank(a) < std::min<int>(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
    return {r, table_csv(rows, {"relay", "h", "a", "alpha", "rate"})};
}

Output cf_simulate(Context& c) {
    SingularityOptions o;
    o.sources = c.get<int>("K", 2);
    if (c.get<int>("M", o.sources) != o.sources) throw ConfigError("the singularity experiment uses M = K relays");
    o.strategy = parse_strategy(c.get<std::string>("strategy", "svp"));
    o.bound = c.get<int>("B", 8);
    o.threads = c.threads;
    SimulationReport rep = singularity_probability(c.list<double>("rho_db", {0, 5, 10, 15, 20}),
                                                   c.get<std::size_t>("trials", 10'000), c.seed, o);
    return {to_json(rep), to_csv(rep)};
}

FlatnessOptions flatness_options(Context& c, std::size_t default_draws) {
    FlatnessOptions f;
    f.n_e = c.get<int>("n_e", 1);
    f.draws = c.get<std::size_t>("draws", default_draws);
    f.seed = c.seed;
    f.threads = c.threads;
    f.limits = c.limits;
    return f;
}

EcdpOptions ecdp_options(Context& c) {
    EcdpOptions e;
    e.r_max = c.get<double>("r_max", 0.0);
    e.tail_tol = c.get<double>("tail_tol", 1e-9);
    e.limits = c.limits;
    return e;
}

Output wiretap_bound(Context& c) {
    MatrixLattice fine = wiretap_fine(c);
    WiretapCode code(fine, subgroup_from(c, fine.rank()));
    CodingGain g = first_coding_gain(code.coarse(), c.limits);
    FlatnessOptions fo = flatness_options(c, 0);
    EcdpOptions eo = ecdp_options(c);
    json rows = json::array();
    for (double rho : c.list<double>("rho_e", {10.0})) {
        EcdpBound b = ecdp_bound(code, rho, fo.n_e, eo);
        json row{{"rho_e", rho}, {"ecdp", b.divergent ? json(nullptr) : json(b.value)}, {"partial", b.partial},
                 {"tail_estimate", b.tail}, {"r_max", b.r_max}, {"points", b.points}, {"divergent", b.divergent}};
        if (b.divergent) row["partial"] = row["tail_estimate"] = nullptr;
        if (fo.draws > 0) {
            FlatnessEstimate f = expected_flatness(code, 1.0 / rho, fo);
            row["eflat_mean"] = f.mean;
            row["eflat_se"] = f.std_error;
            row["eflat_resampled"] = f.resampled;
            row["eflat_substituted"] = f.substituted;
        }
        rows.push_back(row);
    }
    json r{{"messages", code.messages()}, {"delta1", g.delta1}, {"delta1_count", g.count}, {"rows", rows}};
    return {r, table_csv(rows, {"rho_e", "ecdp", "partial", "tail_estimate", "r_max", "points", "divergent",
                                "eflat_mean", "eflat_se"})};
}

std::vector<std::pair<std::string, IntMatrix>> default_candidates() {
    auto d = [](std::vector<std::int64_t> v) {
        IntMatrix m = IntMatrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i) m(i, i) = v[static_cast<std::size_t>(i)];
        return m;
    };
    return {{"2I", d({2, 2, 2, 2})},
            {"diag(1,1,1,16)", d({1, 1, 1, 16})},
            {"diag(1,1,4,4)", d({1, 1, 4, 4})},
            {"diag(1,2,2,4)", d({1, 2, 2, 4})},
            {"diag(1,1,2,8)", d({1, 1, 2, 8})}};
}

Output wiretap_compare(Context& c) {
    if (!c.has("code") && !c.has("name") && !c.has("basis")) c.cfg["code"] = "alamouti";
    MatrixLattice fine = wiretap_fine(c);
    std::vector<std::pair<std::string, IntMatrix>> cands;
    if (c.has("candidates")) {
        for (const auto& e : c.cfg.at("candidates")) cands.emplace_back(e.at("id").get<std::string>(), int_matrix(e.at("map")));
    } else {
        if (fine.rank() != 4) throw ConfigError("candidates are required unless the fine lattice has rank 4");
        cands = default_candidates();
        json arr = json::array();
        for (const auto& [id, m] : cands) arr.push_back({{"id", id}, {"map", int_matrix_json(m)}});
        c.cfg["candidates"] = arr;
    }
    CompareOptions o;
    o.rho_e = c.get<double>("rho_e", 10.0);
    o.flatness = flatness_options(c, 1000);
    o.ecdp = ecdp_options(c);
    auto rows = wr_sublattice_compare(fine, c.get<std::int64_t>("index", 16), cands, o);
    return {to_json(rows), to_csv(rows)};
}

struct Command {
    std::string path;
    std::string help;
    std::vector<Param> params;
    std::function<Output(Context&)> run;
};

std::vector<Param> join(std::vector<Param> a, const std::vector<Param>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

const std::vector<Param> kCodeParams = {
    {"code", "alamouti, golden, iterated_alamouti, or an inline code object"},
    {"alphabet", "integer signalling alphabet, e.g. -1,1"},
};

std::vector<Command> commands() {
    const std::vector<Param> wiretap_common = join(join(kCodeParams, kLatticeParams),
                                                   {{"n_e", "Eve's receive antennas"},
                                                    {"draws", "channel draws for the expected flatness"},
                                                    {"r_max", "ECDP enumeration radius (squared); 0 = automatic"},
                                                    {"tail_tol", "target for the ECDP tail estimate"}});
    return {
        {"lattice info", "minima, kissing number, volume", kLatticeParams, lattice_info},
        {"theta", "theta series: truncated sum, closed form, main-term approximation",
         join(kLatticeParams, {{"q", "q values"}, {"mode", "exact, approx or both"}, {"tail_tol", "tail tolerance"}}),
         theta_cmd},
        {"flatness", "flatness factor via theta and direct lattice Gaussian sum",
         join(kLatticeParams, {{"sigma2", "Gaussian variances"}, {"tail_tol", "tail tolerance"}}), flatness_cmd},
        {"nested", "nested lattice code: coset leaders and rate",
         join(kLatticeParams, {{"subgroup", "integer subgroup matrix (list of rows)"},
                               {"coarse_scale", "coarse = c * fine when no subgroup is given"},
                               {"nsm_samples", "Monte Carlo samples for the coarse NSM (0 = skip)"}}),
         nested_cmd},
        {"stc analyze", "determinant criteria, normalized density, fast decodability",
         join(kCodeParams, {{"scan", "exhaustive, differences or random"},
                            {"samples", "random scan samples"},
                            {"n_r", "receive antennas for the R-matrix check"},
                            {"r_trials", "channel draws for the R-matrix check"}}),
         stc_analyze},
        {"stc simulate", "codeword error rate over Rayleigh or AF relay channels",
         join(kCodeParams, {{"snr_db", "SNR grid in dB"},
                            {"trials", "trials per SNR"},
                            {"n_r", "receive antennas"},
                            {"sigma_h2", "per-component channel variance"},
                            {"channel", "rayleigh or af"},
                            {"relays", "AF relays"},
                            {"af_n_t", "AF source antennas"},
                            {"n_R", "AF relay antennas"},
                            {"rho1", "AF power split"},
                            {"rho2", "AF power split"},
                            {"rho3", "AF power split"},
                            {"rho1p", "AF relay gain"}}),
         stc_simulate},
        {"cf rates", "coefficient choice and computation rate per relay",
         {{"channels", "per-relay channel vectors, e.g. [[1,0.5],[0.3,-1]]"},
          {"rho_db", "SNR in dB"},
          {"strategy", "svp, box or candidate_sets"},
          {"bound", "coefficient box bound"}},
         cf_rates},
        {"cf simulate", "singular coefficient matrix frequency",
         {{"K", "sources"},
          {"M", "relays (must equal K)"},
          {"rho_db", "SNR grid in dB"},
          {"strategy", "svp, box or candidate_sets"},
          {"B", "coefficient box bound"},
          {"trials", "draws per SNR"}},
         cf_simulate},
        {"wiretap bound", "ECDP bound, first coding gain and expected flatness",
         join(wiretap_common, {{"subgroup", "integer subgroup matrix"},
                               {"coarse_scale", "coarse = c * fine when no subgroup is given"},
                               {"rho_e", "Eve SNR values"}}),
         wiretap_bound},
        {"wiretap compare", "rank candidate sublattices by ECDP and expected flatness",
         join(wiretap_common, {{"index", "sublattice index"},
                               {"candidates", "list of {id, map}"},
                               {"rho_e", "Eve SNR"}}),
         wiretap_compare},
    };
}

std::string flag_name(const std::string& key) {
    std::string f = key;
    for (char& ch : f)
        if (ch == '_') ch = '-';
    return "--" + f;
}

json load_config(const std::string& spec) {
    std::string text = spec;
    if (spec.empty() || spec.front() != '{') {
        std::ifstream in(spec);
        if (!in) throw ConfigError("cannot read config file " + spec);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("config must be a JSON object");
    return j;
}

struct Leaf {
    Command command;
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    CLI::App app{"lattice coding toolkit", "latticeforge"};
    app.set_version_flag("--version", LATTICEFORGE_VERSION);
    app.require_subcommand(1);
    std::string config, out_path, format = "json";
    std::uint64_t seed = 1;
    int threads = 0;
    std::size_t cap = 0;
    std::vector<std::unique_ptr<Leaf>> leaves;
    std::map<std::string, CLI::App*> groups;
    for (auto& cmd : commands()) {
        auto leaf = std::make_unique<Leaf>();
        leaf->command = cmd;
        CLI::App* parent = &app;
        std::string name = cmd.path;
        if (auto sp = cmd.path.find(' '); sp != std::string::npos) {
            std::string group = cmd.path.substr(0, sp);
            if (!groups.count(group)) {
                groups[group] = app.add_subcommand(group, group + " commands");
                groups[group]->require_subcommand(1);
            }
            parent = groups[group];
            name = cmd.path.substr(sp + 1);
        }
        leaf->app = parent->add_subcommand(name, cmd.help);
        CLI::App* sub = leaf->app;
        sub->add_option("--config", config, "JSON config file or inline JSON object");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--out", out_path, "output file (default stdout)");
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", threads, "worker threads (default LATTICEFORGE_THREADS or all cores)");
        sub->add_option("--cap", cap, "enumeration point cap");
        for (const auto& p : cmd.params)
            leaf->options[p.key] = sub->add_option(flag_name(p.key), leaf->values[p.key], p.help);
        leaves.push_back(std::move(leaf));
    }

    std::vector<const char*> argv{"latticeforge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Leaf* leaf = nullptr;
    for (auto& l : leaves)
        if (l->app->parsed()) leaf = l.get();
    try {
        Context ctx;
        std::set<std::string> allowed{"seed", "schema", "threads", "cap"};
        for (const auto& p : leaf->command.params) allowed.insert(p.key);
        if (!config.empty()) {
            json file = load_config(config);
            if (file.contains("schema") && file.at("schema") != 1) throw ConfigError("unsupported config schema");
            for (const auto& [k, v] : file.items()) {
                if (!allowed.count(k)) throw ConfigError("unknown config key \"" + k + "\" for " + leaf->command.path);
                ctx.cfg[k] = v;
            }
        }
        for (const auto& [key, opt] : leaf->options)
            if (opt->count() > 0) ctx.cfg[key] = parse_value(leaf->values[key]);
        auto take = [&](const char* key, auto& var, const char* flag) {
            if (leaf->app->count(flag) == 0 && ctx.cfg.contains(key))
                var = ctx.cfg.at(key).get<std::remove_reference_t<decltype(var)>>();
            ctx.cfg.erase(key);
        };
        take("seed", seed, "--seed");
        take("threads", threads, "--threads");
        take("cap", cap, "--cap");
        ctx.cfg.erase("schema");
        ctx.seed = seed;
        ctx.threads = threads;
        if (cap > 0) ctx.limits.max_points = cap;

        Output result = leaf->command.run(ctx);
        // Thread count and output location never enter the output, so reruns are byte-identical.
        json echo = ctx.cfg;
        if (cap > 0) echo["cap"] = cap;
        std::string text;
        if (format == "csv") {
            std::ostringstream os;
            os << "# schema=1\n# tool=latticeforge\n# version=" << LATTICEFORGE_VERSION << "\n# command="
               << leaf->command.path << "\n# seed=" << seed << "\n# config=" << echo.dump() << '\n'
               << result.csv;
            text = os.str();
        } else {
            json env{{"schema", 1},    {"tool", "latticeforge"}, {"version", LATTICEFORGE_VERSION},
                     {"command", leaf->command.path}, {"seed", seed}, {"config", echo},
                     {"result", result.result}};
            text = env.dump(2) + "\n";
        }
        if (out_path.empty()) {
            out << text;
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw ConfigError("cannot write " + out_path);
            f << text;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        err << "wall_time_s=" << secs << '\n';
        return 0;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "unexpected failure: " << e.what() << '\n';
        return 1;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace latticeforge::cli
