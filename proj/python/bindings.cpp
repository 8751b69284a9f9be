#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "latticeforge/compute_forward.hpp"
#include "latticeforge/errors.hpp"
#include "latticeforge/fast_decoding.hpp"
#include "latticeforge/lattice.hpp"
#include "latticeforge/nested_code.hpp"
#include "latticeforge/stc.hpp"
#include "latticeforge/theta.hpp"
#include "latticeforge/wiretap.hpp"

namespace py = pybind11;
using namespace latticeforge;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
std::string dump(const nlohmann::json& j) { return j.dump(); }

EnumerationLimits cap(std::size_t max_points) { return EnumerationLimits{max_points}; }

}  // namespace

PYBIND11_MODULE(_latticeforge, m) {
    m.doc() = "lattice coding toolkit";
    m.attr("__version__") = LATTICEFORGE_VERSION;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<RankError>(m, "RankError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());

    py::class_<Lattice>(m, "Lattice")
        .def(py::init<Matrix>(), py::arg("basis"))
        .def_static("from_gram", &Lattice::from_gram)
        .def_property_readonly("dim", &Lattice::dim)
        .def_property_readonly("basis", &Lattice::basis)
        .def_property_readonly("gram", &Lattice::gram)
        .def_property_readonly("volume", &Lattice::volume)
        .def("point", &Lattice::point)
        .def("to_json", [](const Lattice& l) { return dump(to_json(l)); });

    m.def("catalog", &catalog, py::arg("name"));
    m.def("catalog_names", &catalog_names);
    m.def(
        "successive_minima",
        [](const Lattice& l, std::size_t max_points) {
            MinimaProfile p = successive_minima(l, cap(max_points));
            return py::make_tuple(p.minima, p.kissing);
        },
        py::arg("lattice"), py::arg("max_points") = 10'000'000);
    m.def(
        "is_well_rounded", [](const Lattice& l, double tol) { return is_well_rounded(l, tol); }, py::arg("lattice"),
        py::arg("tol") = 1e-9);
    m.def(
        "closest_vector",
        [](const Lattice& l, const Vector& y) {
            LatticePoint p = closest_vector(l, y);
            return py::make_tuple(p.coords, p.vector);
        },
        py::arg("lattice"), py::arg("y"));
    m.def(
        "count_points",
        [](const Lattice& l, double r, std::size_t max_points) {
            return enumerate_by_norm(l, r, cap(max_points)).size();
        },
        py::arg("lattice"), py::arg("r"), py::arg("max_points") = 10'000'000);

    m.def(
        "theta", [](const Lattice& l, double q, double tol) { return theta_truncated(l, q, tol).value; },
        py::arg("lattice"), py::arg("q"), py::arg("tail_tol") = 1e-12);
    m.def("theta_closed_form", &theta_closed_form, py::arg("name"), py::arg("q"));
    m.def("jacobi_theta", &jacobi_theta, py::arg("which"), py::arg("q"));
    m.def(
        "theta_approximation",
        [](const Lattice& l, double q) { return dump(to_json(theta_approximation(l, q))); }, py::arg("lattice"),
        py::arg("q"));
    m.def(
        "flatness_factor", [](const Lattice& l, double s2, double tol) { return flatness_factor(l, s2, tol); },
        py::arg("lattice"), py::arg("sigma2"), py::arg("tail_tol") = 1e-12);

    m.def(
        "codebook",
        [](const Lattice& fine, const IntMatrix& subgroup) { return dump(codebook_json(NestedCodePair(fine, subgroup))); },
        py::arg("fine"), py::arg("subgroup"));

    py::class_<SpaceTimeCode>(m, "SpaceTimeCode")
        .def_readonly("label", &SpaceTimeCode::label)
        .def_readonly("basis", &SpaceTimeCode::basis)
        .def_readonly("alphabet", &SpaceTimeCode::alphabet)
        .def_property_readonly("rank", &SpaceTimeCode::rank)
        .def("codeword", &SpaceTimeCode::codeword)
        .def("to_json", [](const SpaceTimeCode& c) { return dump(to_json(c)); });
    m.def("alamouti_code", &alamouti_code, py::arg("alphabet") = std::vector<std::int64_t>{-1, 1});
    m.def("golden_code", &golden_code, py::arg("alphabet") = std::vector<std::int64_t>{-1, 0, 1});
    m.def("iterated_alamouti", &iterated_alamouti, py::arg("alphabet") = std::vector<std::int64_t>{-1, 1});
    m.def(
        "min_determinant",
        [](const SpaceTimeCode& c, const std::string& mode, std::size_t samples, std::uint64_t seed) {
            DeterminantScan s;
            s.mode = mode == "differences" ? ScanMode::Differences
                     : mode == "random"    ? ScanMode::Random
                     : mode == "exhaustive" ? ScanMode::Exhaustive
                                            : throw ConfigError("unknown scan mode: " + mode);
            s.samples = samples;
            s.seed = seed;
            MinDeterminant d = min_determinant(c, s);
            return py::make_tuple(d.value, d.min_rank);
        },
        py::arg("code"), py::arg("mode") = "exhaustive", py::arg("samples") = 10'000, py::arg("seed") = 1);
    m.def(
        "fast_decoding", [](const SpaceTimeCode& c) { return dump(to_json(hr_group_partition(c))); }, py::arg("code"));

    m.def("computation_rate", &computation_rate, py::arg("h"), py::arg("a"), py::arg("rho"));
    m.def("optimal_alpha", &optimal_alpha, py::arg("h"), py::arg("a"), py::arg("rho"));
    m.def(
        "best_coefficients",
        [](const Vector& h, double rho, const std::string& strategy, int relay_id, int bound) {
            CoefficientChoice c = choose_coefficients(h, rho, parse_strategy(strategy), relay_id, bound);
            return py::make_tuple(c.a, c.alpha, c.rate);
        },
        py::arg("h"), py::arg("rho"), py::arg("strategy") = "svp", py::arg("relay_id") = 1, py::arg("bound") = 8);

    m.def(
        "ecdp_bound",
        [](const SpaceTimeCode& code, const IntMatrix& subgroup, double rho_e, int n_e) {
            MatrixLattice coarse = MatrixLattice::from_code(code).sublattice(subgroup);
            return dump(to_json(ecdp_bound(coarse, rho_e, n_e)));
        },
        py::arg("code"), py::arg("subgroup"), py::arg("rho_e"), py::arg("n_e") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
