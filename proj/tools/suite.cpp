#include "suite.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "renormlab/distortion.hpp"
#include "renormlab/finegrid.hpp"
#include "renormlab/mapio.hpp"
#include "renormlab/parabolic.hpp"
#include "renormlab/partitions.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/surgery.hpp"

namespace renormlab::cli {

namespace {

struct Check {
    std::string id, module;
    std::function<std::string()> body;  // empty string on success, the reason otherwise
};

CircleMap tuned(const std::string& quotients) {
    return critical_sine_map(tune_parameter(sine_family_critical(), RotationTarget::parse(quotients), 1e-12));
}

const CircleMap& golden() {
    static const CircleMap f = tuned("1,*");
    return f;
}

std::string fmt(double x) { return format_real(x); }

std::vector<Check> checks(const SuiteOptions& opt) {
    std::vector<Check> c;
    c.push_back({"core.moebius_schwarzian", "core", [] {
                     double s = schwarzian(moebius(2.0, 1.0, 0.5, 0.75), 0.4);
                     return std::fabs(s) < 1e-10 ? "" : "Schwarzian of a Moebius map is " + fmt(s);
                 }});
    c.push_back({"core.map_roundtrip", "core", [] {
                     MapPtr f = compose({sine_family(0.1, 0.7), bump(0.3, 0.1, 0.01), affine(1.0, 0.2)});
                     MapPtr g = node_from_json(node_to_json(f));
                     double d = std::fabs(f->value(0.37) - g->value(0.37));
                     return d == 0.0 ? "" : "round trip changed the map by " + fmt(d);
                 }});
    c.push_back({"rotation.golden_quotients", "rotation", [] {
                     RotationMeasurement m = rotation_number(rotation_map((std::sqrt(5.0) - 1) / 2), 10);
                     for (int n = 0; n <= 10; ++n)
                         if (m.cf.quotients[n] != 1) return "a_" + std::to_string(n) + " is not 1";
                     return std::string();
                 }});
    c.push_back({"rotation.rational_lock", "rotation", [] {
                     try {
                         rotation_number(rotation_map(0.25), 6);
                     } catch (const RationalLock&) {
                         return std::string();
                     }
                     return std::string("no lock reported for rho = 1/4");
                 }});
    c.push_back({"partitions.mass_and_refinement", "partitions", [] {
                     ContinuedFraction cf = from_quotients(std::vector<std::int64_t>(14, 1));
                     DynamicalPartition prev = build_partition(golden(), cf, 3);
                     for (int n = 4; n <= 9; ++n) {
                         DynamicalPartition p = build_partition(golden(), cf, n);
                         double total = 0.0;
                         for (const auto& a : p.atoms) total += a.length;
                         if (std::fabs(total - 1.0) > 1e-9) return "mass error at level " + std::to_string(n);
                         parent_map(prev, p);
                         prev = std::move(p);
                     }
                     return std::string();
                 }});
    c.push_back({"renorm.gauss_shift", "renorm", [] {
                     static const CircleMap f = tuned("2,*");
                     ContinuedFraction cf = from_quotients(std::vector<std::int64_t>(14, 2));
                     for (int n = 1; n <= 6; ++n) {
                         auto h = extract_pair(f, cf, n).height;
                         if (h.infinite || h.value != 2) return "height at level " + std::to_string(n) + " is not 2";
                     }
                     return std::string();
                 }});
    c.push_back({"renorm.commutation", "renorm", [] {
                     ContinuedFraction cf = from_quotients(std::vector<std::int64_t>(14, 1));
                     double r = commutation_residue(extract_pair(golden(), cf, 5), 0);
                     return r < 1e-10 ? "" : "commutation residue " + fmt(r);
                 }});
    c.push_back({"distortion.moebius_cross_ratio", "distortion", [opt] {
                     std::mt19937_64 rng(opt.seed);
                     std::uniform_real_distribution<double> u(0.0, 1.0);
                     for (int i = 0; i < 20; ++i) {
                         double x[4] = {u(rng), u(rng), u(rng), u(rng)};
                         std::sort(x, x + 4);
                         if (x[1] - x[0] < 1e-3 || x[2] - x[1] < 1e-3 || x[3] - x[2] < 1e-3) continue;
                         double d = cross_ratio_distortion(moebius(1.0, 0.2, 0.1, 1.02), {x[0], x[1], x[2], x[3]});
                         if (std::fabs(d - 1.0) > 1e-12) return "Moebius map distorted a cross ratio by " + fmt(d - 1.0);
                     }
                     return std::string();
                 }});
    c.push_back({"distortion.nonlinearity_bound", "distortion", [] {
                     JetFn phi = [](double x) {
                         double e = std::exp(3.0 * x);
                         return Jet3{e, 3 * e, 9 * e, 27 * e};
                     };
                     double s = sampled_nonlinearity(phi, 0.0, 1.0), b = nonlinearity_bound(0.5, 4.5);
                     return s <= b + 1e-9 ? "" : "nonlinearity " + fmt(s) + " above bound " + fmt(b);
                 }});
    c.push_back({"parabolic.mobius_orbit", "parabolic", [] {
                     for (double eps : {1e-2, 1e-3, 1e-4, 1e-5})
                         if (!check_mobius_orbit(parabolic_mobius_orbit(eps)).all())
                             return "orbit bounds fail at eps = " + fmt(eps);
                     return std::string();
                 }});
    c.push_back({"parabolic.schwarzian_negative", "parabolic", [opt] {
                     static const CircleMap f = tuned("1,1,50,1,*");
                     ContinuedFraction cf = from_quotients({1, 1, 50, 1, 1, 1, 1, 1});
                     AlmostParabolicMap ap = make_almost_parabolic(f, cf, 2);
                     if (opt.flip_schwarzian) {
                         // the inverse branch walks the same domains backwards with the opposite Schwarzian sign
                         ap = almost_parabolic_from_orbit(inverse_of(ap.map, ap.lo(), ap.hi()), ap.x[ap.a], ap.a - 1);
                     }
                     double s = max_schwarzian(ap);
                     return s < 0.0 ? "" : "sampled Schwarzian reaches " + fmt(s);
                 }});
    c.push_back({"finegrid.structure", "finegrid", [] {
                     ContinuedFraction cf = from_quotients(std::vector<std::int64_t>(14, 1));
                     std::vector<DynamicalPartition> P;
                     for (int n = 1; n <= 10; ++n) P.push_back(build_partition(golden(), cf, n));
                     FineGrid g = build_fine_grid(std::move(P), 30);
                     FineConstants fc = fine_constants(g);
                     if (fc.a > 3) return "an atom has " + std::to_string(fc.a) + " children";
                     if (!fc.strict_refinement) return std::string("refinement is not strict");
                     if (!fc.sandwich) return std::string("parent/child sandwich fails");
                     SmoothnessReport r = smoothness_report(grid_conjugacy(golden(), golden(), 10), g, g);
                     if (r.classification != "zero") return std::string("identity conjugacy has deviations");
                     return std::string();
                 }});
    c.push_back({"surgery.undo_and_orbit", "surgery", [] {
                     static const CircleMap f = tuned("1,1,32,2,*");
                     ContinuedFraction cf = from_quotients({1, 1, 32, 2, 2, 2, 2, 2, 2});
                     PrecisionPolicy dd = PrecisionPolicy::for_backend(Backend::double_double);
                     SurgeryResult s = surgery(f, cf, 2, default_sigma(32), dd);
                     double worst = 0.0;
                     for (int i = 0; i < 64; ++i) {
                         double x = i / 64.0;
                         worst = std::max(worst, std::fabs(s.phi_inverse->value(s.map.lift->value(x)) - f.lift->value(x)));
                     }
                     if (worst > 1e-12) return "undo error " + fmt(worst);
                     double d = discrepancy(f, s.map, cf, 2, dd);
                     if (!(d > 0.0)) return std::string("no discrepancy at the surgery level");
                     return std::string();
                 }});
    return c;
}

}  // namespace

std::vector<CheckResult> run_suite(const SuiteOptions& opt) {
    std::vector<CheckResult> out;
    bool matched = false;
    for (const Check& c : checks(opt)) {
        if (!opt.only.empty() && c.module != opt.only) continue;
        matched = true;
        CheckResult r{c.id, c.module, false, ""};
        try {
            r.detail = c.body();
            r.pass = r.detail.empty();
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    }
    if (!matched) throw std::invalid_argument("verify: no checks for module '" + opt.only + "'");
    return out;
}

nlohmann::json suite_to_json(const std::vector<CheckResult>& results) {
    nlohmann::json j;
    j["schema"] = "verify/1";
    nlohmann::json list = nlohmann::json::array();
    int failed = 0;
    for (const auto& r : results) {
        nlohmann::json e{{"id", r.id}, {"module", r.module}, {"pass", r.pass}};
        if (!r.detail.empty()) e["detail"] = r.detail;
        list.push_back(e);
        if (!r.pass) ++failed;
    }
    j["results"] = list;
    j["passed"] = static_cast<int>(results.size()) - failed;
    j["failed"] = failed;
    return j;
}

}  // namespace renormlab::cli
