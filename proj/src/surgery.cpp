#include "renormlab/surgery.hpp"

#include <algorithm>
#include <cmath>

#include "renormlab/mapio.hpp"
#include "renormlab/parabolic.hpp"
#include "renormlab/renorm.hpp"

namespace renormlab {

double default_sigma(std::int64_t a) { return 1.0 + std::log2(std::log2(static_cast<double>(a) + 4.0)); }

SigmaRule auto_sigma() {
    return [](int, std::int64_t a) { return default_sigma(a); };
}

SigmaRule fixed_sigma(double s) {
    return [s](int, std::int64_t) { return s; };
}

namespace {

double eta(double s) { return std::fabs(s) >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - s * s)); }

// max |d/dt eta(2t - 1)| over [0, 1]
double eta_slope() {
    static const double m = [] {
        double best = 0.0;
        for (int i = 1; i < 4000; ++i) {
            double s = -1.0 + 2.0 * i / 4000.0, u = 1.0 - s * s;
            best = std::max(best, std::fabs(eta(s) * 2.0 * s / (u * u)) * 2.0);
        }
        return best;
    }();
    return m;
}

void need_levels(const ContinuedFraction& cf, int n, const char* who) {
    if (n < 1 || static_cast<std::size_t>(n) + 2 >= cf.q.size())
        throw std::invalid_argument(std::string(who) + ": continued fraction too short for level " + std::to_string(n));
}

Interval hull(double a, double b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

double discrepancy(const CircleMap& f, const CircleMap& g, const ContinuedFraction& cf, int n,
                   const PrecisionPolicy& policy) {
    need_levels(cf, n, "discrepancy");
    const std::int64_t a = cf.quotients[n];
    if (a < 2) throw std::invalid_argument("discrepancy: needs a_n >= 2 at level " + std::to_string(n));
    const std::int64_t N = (a + 1) / 2;
    const auto& q = cf.q;
    const auto& p = cf.p;
    // images under f_n^{N-1} of the endpoints of Δ_1 and of the split point
    auto ratio = [&](const CircleMap& m) {
        double u = displacement(m, q[n - 1] + (N - 1) * q[n], p[n - 1] + (N - 1) * p[n], policy.backend);
        double w = displacement(m, q[n - 1] + N * q[n], p[n - 1] + N * p[n], policy.backend);
        double z = displacement(m, q[n + 2] - (a - N + 1) * q[n], p[n + 2] - (a - N + 1) * p[n], policy.backend);
        return std::fabs(z - u) / std::fabs(w - z);
    };
    return std::fabs(ratio(f) - ratio(g));
}

SurgeryResult surgery(const CircleMap& f, const ContinuedFraction& cf, int n, double sigma,
                      const PrecisionPolicy& policy) {
    need_levels(cf, n, "surgery");
    const std::int64_t a = cf.quotients[n];
    if (a < 2) throw std::invalid_argument("surgery: needs a_n >= 2 at level " + std::to_string(n));
    if (!(sigma > 0.0)) throw std::invalid_argument("surgery: sigma must be positive");
    if (a >= 3) make_almost_parabolic(f, cf, n, policy);

    const auto& q = cf.q;
    const auto& p = cf.p;
    const double c = f.critical;
    auto pos = [&](std::int64_t k, std::int64_t s) { return c + displacement(f, k, s, policy.backend); };

    SurgeryPlan plan;
    plan.level = n;
    plan.a = a;
    plan.sigma = sigma;
    const double x0 = pos(q[n - 1], p[n - 1]), x1 = pos(q[n - 1] + q[n], p[n - 1] + p[n]);
    const double ya = pos(q[n - 1] + (a - 1) * q[n], p[n - 1] + (a - 1) * p[n]), yb = pos(q[n + 1], p[n + 1]);
    plan.z = pos(q[n + 2] - a * q[n], p[n + 2] - a * p[n]);
    plan.J = std::fabs(pos(q[n], p[n]) - x0);
    plan.delta1 = hull(x0, x1);
    plan.delta_a = hull(ya, yb);
    if (!(plan.z > plan.delta1.lo && plan.z < plan.delta1.hi))
        throw CombinatorialMismatch("surgery: split point outside the first fundamental domain");
    plan.left = hull(x0, plan.z);
    plan.right = hull(plan.z, x1);
    const double len = plan.delta1.length();
    plan.tau = std::min(plan.left.length(), plan.right.length()) / len;

    plan.target = std::pow(len, sigma);
    // a little above the bound so that it survives rounding at the ends of [tau, 1 - tau]
    plan.amplitude = plan.target / eta(1.0 - 2.0 * plan.tau) * (1.0 + 1e-9);
    if (!(plan.amplitude * eta_slope() <= 0.5))
        throw HypothesisViolation("surgery: bump amplitude " + format_real(plan.amplitude) +
                                  " would break monotonicity at level " + std::to_string(n));

    const Interval& d1 = plan.delta1;
    const Interval& da = plan.delta_a;
    MapPtr phi = bump(0.5 * (d1.lo + d1.hi), 0.5 * len, plan.amplitude * len);
    MapPtr phi_inv = windowed(inverse_of(phi, d1.lo, d1.hi), d1.lo, d1.hi);
    MapPtr carry = circle_iterate(f.lift, (a - 1) * q[n], (a - 1) * p[n]);
    MapPtr back = inverse_of(carry, d1.lo, d1.hi);
    MapPtr psi = windowed(compose({carry, inverse_of(phi, d1.lo, d1.hi), back}), da.lo, da.hi);
    MapPtr psi_inv = windowed(compose({carry, phi, back}), da.lo, da.hi);

    SurgeryResult r;
    r.plan = plan;
    r.phi = compose({psi, phi});
    r.phi_inverse = compose({psi_inv, phi_inv});
    r.map = {compose({r.phi, f.lift}), f.critical, f.has_critical_point};
    return r;
}

SurgeryCheck verify_surgery(const CircleMap& f, const SurgeryResult& s, const ContinuedFraction& cf, int depth,
                            const PrecisionPolicy& policy) {
    const int n = s.plan.level;
    const CircleMap& g = s.map;
    SurgeryCheck k;

    const std::int64_t qn = cf.q[n], qn1 = cf.q[n + 1];
    CircleOrbit of = circle_orbit(f.lift, f.critical, qn1 + 1, policy);
    CircleOrbit og = circle_orbit(g.lift, g.critical, qn1 + 1, policy);
    for (std::int64_t j : {std::int64_t{1}, qn, qn1})
        k.orbit_error = std::max(k.orbit_error, std::fabs((of.offset_dd(j, 0, DD(0.0)) - og.offset_dd(j, 0, DD(0.0))).to_double()));

    k.renorm_distance = ck_distance(extract_pair(f, cf, n + 1, policy), extract_pair(g, cf, n + 1, policy), 0);
    k.discrepancy = discrepancy(f, g, cf, n, policy);
    for (int m = n + 1; m <= depth && static_cast<std::size_t>(m) + 2 < cf.q.size(); ++m)
        if (cf.quotients[m] >= 2) k.deeper.push_back(discrepancy(f, g, cf, m, policy));

    for (int i = 0; i < 257; ++i) {
        double x = i / 257.0;
        k.undo_error = std::max(k.undo_error, std::fabs(s.phi_inverse->value(g.lift->value(x)) - f.lift->value(x)));
    }
    for (const Interval& d : {s.plan.delta1, s.plan.delta_a})
        for (int i = 1; i < 64; ++i) {
            double y = d.lo + d.length() * i / 64.0;
            k.undo_error = std::max(k.undo_error, std::fabs(s.phi_inverse->value(s.phi->value(y)) - y));
            for (const MapPtr& m : {s.phi, s.phi_inverse}) {
                Jet3 j = m->jet(y);
                k.norms[0] = std::max(k.norms[0], std::fabs(j.f - y));
                k.norms[1] = std::max(k.norms[1], std::fabs(j.d1 - 1.0));
                k.norms[2] = std::max(k.norms[2], std::fabs(j.d2));
                k.norms[3] = std::max(k.norms[3], std::fabs(j.d3));
            }
        }
    for (int i = 0; i < 4; ++i) k.B[i] = k.norms[i] / std::pow(s.plan.J, s.plan.sigma - i + 1);

    k.split_displacement = std::fabs((s.phi->value(DD(s.plan.z)) - DD(s.plan.z)).to_double());
    k.split_ok = k.split_displacement >= std::pow(s.plan.delta1.length(), 1.0 + s.plan.sigma);

    RotationMeasurement rg = rotation_number(g, depth, policy);
    k.quotients_conserved = true;
    for (int i = 0; i <= depth; ++i)
        if (rg.cf.quotients.at(i) != cf.quotients.at(i)) k.quotients_conserved = false;
    return k;
}

Counterexample build_counterexample(const CircleMap& f, const ContinuedFraction& cf, const std::vector<int>& levels,
                                    const SigmaRule& sigma, const PrecisionPolicy& policy) {
    if (levels.empty()) throw std::invalid_argument("build_counterexample: no levels");
    if (!std::is_sorted(levels.begin(), levels.end()) ||
        std::adjacent_find(levels.begin(), levels.end()) != levels.end())
        throw std::invalid_argument("build_counterexample: levels must increase");
    Counterexample c;
    c.base = f;
    c.map = f;
    for (int n : levels) {
        SurgeryResult s = surgery(c.map, cf, n, sigma(n, cf.quotients.at(n)), policy);
        std::array<double, 3> ind{};
        const double betas[3] = {0.1, 0.5, 1.0};
        for (int i = 0; i < 3; ++i)
            ind[i] = std::pow(static_cast<double>(s.plan.a), 2 * betas[i]) *
                     std::pow(s.plan.J, 2 * s.plan.sigma - betas[i]);
        c.rigidity_indicator.push_back(ind);
        c.map = s.map;
        c.stages.push_back(std::move(s));
    }
    return c;
}

std::string surgery_bundle_json(const Counterexample& c, const std::vector<SurgeryCheck>& checks) {
    json j;
    j["schema"] = "surgery/1";
    j["base"] = circle_map_to_json(c.base);
    json plans = json::array();
    for (std::size_t i = 0; i < c.stages.size(); ++i) {
        const SurgeryPlan& p = c.stages[i].plan;
        json e;
        e["level"] = p.level;
        e["a"] = p.a;
        e["sigma"] = p.sigma;
        e["amplitude"] = p.amplitude;
        e["target"] = p.target;
        e["z"] = p.z;
        e["tau"] = p.tau;
        e["J"] = p.J;
        e["delta1"] = {p.delta1.lo, p.delta1.hi};
        e["delta_a"] = {p.delta_a.lo, p.delta_a.hi};
        e["rigidity_indicator"] = c.rigidity_indicator[i];
        plans.push_back(e);
    }
    j["plans"] = plans;
    json checks_j = json::array();
    for (const SurgeryCheck& k : checks) {
        json e;
        e["orbit_error"] = k.orbit_error;
        e["renorm_distance"] = k.renorm_distance;
        e["discrepancy"] = k.discrepancy;
        e["deeper_discrepancies"] = k.deeper;
        e["undo_error"] = k.undo_error;
        e["split_displacement"] = k.split_displacement;
        e["split_ok"] = k.split_ok;
        e["quotients_conserved"] = k.quotients_conserved;
        e["norms"] = k.norms;
        e["B"] = k.B;
        checks_j.push_back(e);
    }
    j["verification"] = checks_j;
    j["map"] = circle_map_to_json(c.map);
    return j.dump(2);
}

}  // namespace renormlab
