#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qelab/averaging.hpp"
#include "qelab/experiments.hpp"
#include "qelab/nonbacktracking.hpp"
#include "qelab/spectral.hpp"
#include "qelab/suite.hpp"
#include "qelab/tree.hpp"

namespace py = pybind11;
using namespace qelab;

namespace {

py::dict row_dict(const VarianceRow& r) {
    py::dict d;
    d["n"] = r.n;
    d["seed"] = r.seed;
    d["s0_tau"] = r.s0;
    d["observable"] = r.observable;
    d["r"] = r.r;
    d["delta"] = r.delta;
    d["stride"] = r.stride;
    d["window_count"] = r.window_count;
    d["variance"] = r.variance;
    d["control_variance"] = r.control_variance;
    d["control_mean"] = r.control_mean;
    d["ergodic_form"] = r.ergodic_form;
    d["beta"] = r.beta;
    d["eiir_fraction"] = r.eiir_fraction;
    d["benchmark"] = r.benchmark;
    d["status"] = r.status;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "quantum ergodicity experiments on regular graphs";
    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
    py::register_exception<EmptyWindowError>(m, "EmptyWindowError", PyExc_RuntimeError);

    py::class_<RegularGraph>(m, "RegularGraph")
        .def(py::init<int, int, std::vector<std::pair<Vertex, Vertex>>>(), py::arg("n"), py::arg("q"),
             py::arg("edges"))
        .def_property_readonly("n", &RegularGraph::n)
        .def_property_readonly("q", &RegularGraph::q)
        .def_property_readonly("edges", &RegularGraph::edges)
        .def_property_readonly("simple", &RegularGraph::simple)
        .def_property_readonly("connected", &RegularGraph::connected)
        .def("bipartition", &RegularGraph::bipartition)
        .def("injectivity_radii", [](const RegularGraph& g) { return injectivity_radii(g); })
        .def("adjacency", [](const RegularGraph& g) { return adjacency_operator(g); })
        .def("__repr__", [](const RegularGraph& g) {
            return "<RegularGraph n=" + std::to_string(g.n()) + " q=" + std::to_string(g.q()) + ">";
        });

    m.def("random_regular", &generate_random_regular, py::arg("n"), py::arg("q"), py::arg("seed"),
          py::arg("require_simple") = true);
    m.def("bipartite_regular", &generate_bipartite_regular, py::arg("n_per_side"), py::arg("q"), py::arg("seed"),
          py::arg("require_simple") = false);

    m.def("tau", &tau, py::arg("q"));
    m.def("lambda_from_s", py::overload_cast<double, int>(&lambda_from_s), py::arg("s"), py::arg("q"));
    m.def("spherical", py::overload_cast<double, int, int>(&spherical), py::arg("s"), py::arg("k"), py::arg("q"));
    m.def("plancherel_density", &plancherel_density, py::arg("s"), py::arg("q"));
    m.def("kesten_mckay_density", &kesten_mckay_density, py::arg("lam"), py::arg("q"));

    py::class_<SpectralData>(m, "SpectralData")
        .def_readonly("q", &SpectralData::q)
        .def_readonly("eigenvalues", &SpectralData::eigenvalues)
        .def_readonly("eigenvectors", &SpectralData::eigenvectors)
        .def_readonly("gap", &SpectralData::gap)
        .def_readonly("bipartite", &SpectralData::bipartite)
        .def_property_readonly("s", [](const SpectralData& sd) {
            std::vector<double> s;
            for (const auto& p : sd.params) s.push_back(p.s);
            return s;
        })
        .def_property_readonly("tempered", [](const SpectralData& sd) {
            std::vector<bool> t;
            for (const auto& p : sd.params) t.push_back(p.tempered());
            return t;
        });

    m.def(
        "eig",
        [](const RegularGraph& g, bool randomized, std::uint64_t seed) {
            EigOptions eo;
            eo.basis = randomized ? BasisMode::Randomized : BasisMode::Solver;
            eo.seed = seed;
            return eig(adjacency_operator(g), g.q(), eo);
        },
        py::arg("graph"), py::arg("randomized") = false, py::arg("seed") = 0);
    m.def("ks_distance", [](const SpectralData& sd) { return ks_distance_km(sd.eigenvalues, sd.q); });
    m.def("spectral_gap", [](const SpectralData& sd) { return spectral_gap(sd, sd.bipartite).beta; });

    py::class_<SpectralWindow>(m, "SpectralWindow")
        .def_readonly("s0", &SpectralWindow::s0)
        .def_readonly("delta", &SpectralWindow::delta)
        .def_readonly("indices", &SpectralWindow::indices)
        .def("__len__", &SpectralWindow::count);
    m.def("window", &window, py::arg("spectrum"), py::arg("s0"), py::arg("delta"));

    m.def(
        "make_observable",
        [](const RegularGraph& g, const std::string& kind, std::uint64_t seed) {
            return make_observable(g, parse_observable(kind), seed);
        },
        py::arg("graph"), py::arg("kind"), py::arg("seed"));
    m.def("quantum_variance", &quantum_variance, py::arg("spectrum"), py::arg("window"), py::arg("a"));
    m.def("sk_variance", &sk_variance_spherical, py::arg("spectrum"), py::arg("window"), py::arg("k"), py::arg("s0"));

    m.def("walk_counts", &nb_walk_counts, py::arg("graph"), py::arg("k"));
    m.def(
        "ergodic_decay",
        [](const RegularGraph& g, std::vector<int> Ts, int stride, double beta) {
            auto d = ergodic_decay(g, Ts, stride, beta);
            return py::make_tuple(d.norms, d.fit.exponent);
        },
        py::arg("graph"), py::arg("Ts"), py::arg("stride"), py::arg("beta"));

    m.def("msharp_eigenvalues", [](const RegularGraph& g) { return msharp_eigenvalues(BondSpace(g)); });
    m.def("predicted_msharp_spectrum", &predicted_msharp_spectrum, py::arg("spectrum"), py::arg("graph"));
    m.def("multiset_distance", &multiset_distance);

    m.def(
        "run_suite",
        [](const std::string& config_text, const std::vector<std::string>& overrides) {
            std::istringstream in(config_text);
            auto cfg = parse_config(in);
            for (const auto& o : overrides) apply_override(cfg, o);
            auto report = [&] {
                py::gil_scoped_release release;
                return run_suite(cfg);
            }();
            py::list rows;
            for (const auto& r : report.rows) rows.append(row_dict(r));
            std::ostringstream csv;
            write_report_csv(csv, report);
            py::dict out;
            out["config_hash"] = report.config_hash;
            out["rows"] = rows;
            out["csv"] = csv.str();
            return out;
        },
        py::arg("config") = "", py::arg("overrides") = std::vector<std::string>{});

    m.attr("__version__") = git_describe();
}
