#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "renormlab/finegrid.hpp"
#include "renormlab/mapio.hpp"
#include "renormlab/parabolic.hpp"
#include "renormlab/partitions.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/surgery.hpp"
#include "suite.hpp"

namespace py = pybind11;
using namespace renormlab;

namespace {

PrecisionPolicy policy(const std::string& precision) { return PrecisionPolicy::for_backend(parse_backend(precision)); }

CircleMap tuned_sine(const std::string& quotients, double tol) {
    return critical_sine_map(tune_parameter(sine_family_critical(), RotationTarget::parse(quotients), tol));
}

std::vector<DynamicalPartition> partitions(const CircleMap& f, const ContinuedFraction& cf, int depth,
                                           const PrecisionPolicy& p) {
    std::vector<DynamicalPartition> P;
    for (int n = 1; n <= depth; ++n) P.push_back(build_partition(f, cf, n, p));
    return P;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "renormalization experiments for critical circle maps";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<PrecisionExhausted>(m, "PrecisionExhausted", base.ptr());
    py::register_exception<RationalLock>(m, "RationalLock", base.ptr());
    py::register_exception<CombinatorialMismatch>(m, "CombinatorialMismatch", base.ptr());
    py::register_exception<NonRenormalizable>(m, "NonRenormalizable", base.ptr());
    py::register_exception<HypothesisViolation>(m, "HypothesisViolation", base.ptr());

    py::class_<CircleMap>(m, "CircleMap")
        .def_readonly("critical", &CircleMap::critical)
        .def_readonly("has_critical_point", &CircleMap::has_critical_point)
        .def("__call__", [](const CircleMap& f, double x) { return f.lift->value(x); })
        .def("to_json", [](const CircleMap& f) { return circle_map_to_json(f).dump(); })
        .def_static("from_json", [](const std::string& s) { return circle_map_from_json(json::parse(s)); })
        .def("save", [](const CircleMap& f, const std::string& path) { save_map_file(path, f); })
        .def_static("load", &load_map_file);

    m.def("critical_sine_map", &critical_sine_map, py::arg("omega"));
    m.def("rotation_map", &rotation_map, py::arg("rho"));
    m.def("tuned_sine", &tuned_sine, py::arg("quotients"), py::arg("tol") = 1e-12);
    m.def("conjugate_by_sine", [](const CircleMap& f, double K) { return conjugate(f, sine_family(0.0, K)); },
          py::arg("f"), py::arg("K"));

    m.def(
        "rotation_number",
        [](const CircleMap& f, int depth, const std::string& precision) {
            RotationMeasurement r = rotation_number(f, depth, policy(precision));
            py::dict d;
            d["quotients"] = r.cf.quotients;
            d["p"] = r.cf.p;
            d["q"] = r.cf.q;
            d["displacements"] = r.displacements;
            d["average_estimate"] = r.average_estimate;
            return d;
        },
        py::arg("f"), py::arg("depth"), py::arg("precision") = "f64");

    m.def(
        "heights",
        [](const CircleMap& f, const std::vector<std::int64_t>& quotients, int levels) {
            ContinuedFraction cf = from_quotients(quotients);
            std::vector<std::int64_t> h;
            for (int n = 1; n <= levels; ++n) {
                Height x = extract_pair(f, cf, n).height;
                h.push_back(x.infinite ? -1 : x.value);
            }
            return h;
        },
        py::arg("f"), py::arg("quotients"), py::arg("levels"));

    m.def(
        "pair_distance",
        [](const CircleMap& f, const CircleMap& g, const std::vector<std::int64_t>& quotients, int n, int k) {
            ContinuedFraction cf = from_quotients(quotients);
            return ck_distance(extract_pair(f, cf, n), extract_pair(g, cf, n), k);
        },
        py::arg("f"), py::arg("g"), py::arg("quotients"), py::arg("n"), py::arg("k") = 0);

    m.def(
        "partition_lengths",
        [](const CircleMap& f, const std::vector<std::int64_t>& quotients, int n) {
            DynamicalPartition P = build_partition(f, from_quotients(quotients), n);
            std::vector<double> out;
            for (const Atom& a : P.atoms) out.push_back(a.length);
            return out;
        },
        py::arg("f"), py::arg("quotients"), py::arg("n"));

    m.def(
        "yoccoz_profile",
        [](const CircleMap& f, const std::vector<std::int64_t>& quotients, int n) {
            AlmostParabolicMap ap = make_almost_parabolic(f, from_quotients(quotients), n);
            YoccozProfile p = yoccoz_profile(ap);
            py::dict d;
            d["a"] = ap.a;
            d["lengths"] = p.lengths;
            d["r"] = p.r;
            d["band"] = p.band;
            d["asymmetry"] = p.asymmetry;
            d["sigma"] = p.sigma;
            return d;
        },
        py::arg("f"), py::arg("quotients"), py::arg("n"));

    m.def(
        "fine_grid",
        [](const CircleMap& f, const std::vector<std::int64_t>& quotients, int depth, int threshold) {
            FineGrid g = build_fine_grid(partitions(f, from_quotients(quotients), depth, {}), threshold);
            FineConstants c = fine_constants(g);
            std::ostringstream csv;
            write_grid_csv(csv, g);
            py::dict d;
            d["levels"] = g.levels.size();
            d["a"] = c.a;
            d["c"] = c.c;
            d["C0"] = c.C0;
            d["lambda0"] = c.lambda0;
            d["lambda1"] = c.lambda1;
            d["sandwich"] = c.sandwich;
            d["strict_refinement"] = c.strict_refinement;
            d["saddle_nodes"] = g.saddle_nodes.size();
            d["csv"] = csv.str();
            return d;
        },
        py::arg("f"), py::arg("quotients"), py::arg("depth"), py::arg("threshold"));

    m.def(
        "smoothness",
        [](const CircleMap& f, const CircleMap& g, int depth, int threshold) {
            GridConjugacy h = grid_conjugacy(f, g, depth);
            FineGrid gf = build_fine_grid(partitions(f, h.cf, depth, {}), threshold);
            FineGrid gg = build_fine_grid(partitions(g, h.cf, depth, {}), threshold);
            return smoothness_to_json(smoothness_report(h, gf, gg));
        },
        py::arg("f"), py::arg("g"), py::arg("depth"), py::arg("threshold") = 1000);

    m.def("default_sigma", &default_sigma, py::arg("a"));
    m.def(
        "surgery",
        [](const CircleMap& f, const std::vector<std::int64_t>& quotients, std::vector<int> levels, double sigma,
           int depth, const std::string& precision) {
            ContinuedFraction cf = from_quotients(quotients);
            PrecisionPolicy p = policy(precision);
            SigmaRule rule = sigma > 0.0 ? fixed_sigma(sigma) : auto_sigma();
            Counterexample c = build_counterexample(f, cf, levels, rule, p);
            std::vector<SurgeryCheck> checks;
            CircleMap prev = f;
            for (const auto& s : c.stages) {
                checks.push_back(verify_surgery(prev, s, cf, depth, p));
                prev = s.map;
            }
            return surgery_bundle_json(c, checks);
        },
        py::arg("f"), py::arg("quotients"), py::arg("levels"), py::arg("sigma") = 0.0, py::arg("depth") = 8,
        py::arg("precision") = "dd");
    m.def(
        "discrepancy",
        [](const CircleMap& f, const CircleMap& g, const std::vector<std::int64_t>& quotients, int n,
           const std::string& precision) { return discrepancy(f, g, from_quotients(quotients), n, policy(precision)); },
        py::arg("f"), py::arg("g"), py::arg("quotients"), py::arg("n"), py::arg("precision") = "f64");

    m.def(
        "verify",
        [](const std::string& only, std::uint64_t seed) {
            cli::SuiteOptions opt;
            opt.only = only;
            opt.seed = seed;
            return cli::suite_to_json(cli::run_suite(opt)).dump();
        },
        py::arg("only") = "", py::arg("seed") = 1);
}
