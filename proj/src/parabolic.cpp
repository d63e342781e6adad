#include "renormlab/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "renormlab/mapio.hpp"
#include "renormlab/numerics.hpp"

namespace renormlab {

AlmostParabolicMap almost_parabolic_from_orbit(MapPtr map, double x0, std::int64_t a) {
    if (a < 1) throw std::invalid_argument("almost parabolic map needs length >= 1");
    AlmostParabolicMap ap;
    ap.map = std::move(map);
    ap.a = a;
    ap.x.reserve(static_cast<std::size_t>(a + 2));
    ap.x.push_back(x0);
    for (std::int64_t j = 0; j <= a; ++j) ap.x.push_back(ap.map->value(ap.x.back()));
    const bool down = ap.x[1] < ap.x[0];
    for (std::int64_t j = 1; j <= a + 1; ++j)
        if ((ap.x[j] < ap.x[j - 1]) != down || ap.x[j] == ap.x[j - 1])
            throw CombinatorialMismatch("orbit is not monotone over the fundamental domains");
    return ap;
}

AlmostParabolicMap make_almost_parabolic(const CircleMap& f, const ContinuedFraction& cf, int n,
                                         const PrecisionPolicy& policy) {
    if (n < 1 || static_cast<std::size_t>(n) >= cf.quotients.size())
        throw std::invalid_argument("make_almost_parabolic: level needs a_n");
    const std::int64_t a = cf.quotients[n];
    if (a < 3) throw std::invalid_argument("make_almost_parabolic: needs a_n >= 3");
    const double x0 = f.critical + displacement(f, cf.q[n - 1], cf.p[n - 1], policy.backend);
    AlmostParabolicMap ap = almost_parabolic_from_orbit(circle_iterate(f.lift, cf.q[n], cf.p[n]), x0, a);
    double s = max_schwarzian(ap);
    if (!(s < 0.0))
        throw HypothesisViolation("first return branch at level " + std::to_string(n) +
                                  " has nonnegative Schwarzian (max sampled value " + format_real(s) + ")");
    return ap;
}

double max_schwarzian(const AlmostParabolicMap& ap, int samples) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        double x = ap.lo() + ap.length() * i / (samples - 1);
        m = std::max(m, schwarzian(ap.map, x));
    }
    return m;
}

YoccozProfile yoccoz_profile(const AlmostParabolicMap& ap) {
    YoccozProfile p;
    const double I = ap.length();
    for (std::int64_t j = 1; j <= ap.a; ++j) p.lengths.push_back(ap.domain_length(j));
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::int64_t j = 1; j < ap.a; ++j) {
        double m = static_cast<double>(std::min(j, ap.a - j));
        double r = p.lengths[j - 1] * m * m / I;
        p.r.push_back(r);
        lo = std::min(lo, r), hi = std::max(hi, r);
    }
    p.sigma = ap.sigma();
    p.band = p.r.empty() ? 1.0 : hi / lo;
    for (std::size_t j = 0; j < p.r.size(); ++j) {
        double u = p.r[j], v = p.r[p.r.size() - 1 - j];
        p.asymmetry = std::max(p.asymmetry, std::max(u / v, v / u));
    }
    return p;
}

void write_profile_csv(std::ostream& out, const YoccozProfile& p) {
    out << "j,length,r\n";
    for (std::size_t j = 0; j < p.lengths.size(); ++j) {
        out << j + 1 << ',' << format_real(p.lengths[j]) << ',';
        if (j < p.r.size()) out << format_real(p.r[j]);
        out << '\n';
    }
}

// ---------------------------------------------------------------- Moebius model

MobiusOrbit parabolic_mobius_orbit(double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("parabolic_mobius_orbit: need 0 < eps < 1/2");
    MobiusOrbit o;
    o.eps = eps;
    o.x.push_back(1.0);
    o.delta.push_back(0.0);
    while (o.x.back() > 0.0) {
        double x = o.x.back();
        o.x.push_back(x / (1.0 + x) - eps);
        // δ_n = eps + δ_{n-1} / ((1 + 1/n)(1 + 1/n - δ_{n-1}))
        double n = static_cast<double>(o.x.size() - 1), d = o.delta.back(), s = 1.0 + 1.0 / n;
        o.delta.push_back(eps + d / (s * (s - d)));
    }
    o.N = static_cast<std::int64_t>(o.x.size()) - 2;
    return o;
}

MobiusOrbitCheck check_mobius_orbit(const MobiusOrbit& o, double tol) {
    MobiusOrbitCheck c;
    const double eps = o.eps, N = static_cast<double>(o.N);
    c.epsilon_bounds = 1.0 / ((N + 1) * (N + 2)) <= eps + tol && eps < 6.0 / (N * (N + 1)) + tol;
    c.gap_lower = c.gap_upper = true;
    for (std::int64_t n = 0; n <= o.N; ++n) {
        double gap = o.x[n] - o.x[n + 1], k = static_cast<double>(n);
        double unit = 1.0 / ((k + 1) * (k + 2));
        if (gap < unit - tol) c.gap_lower = false;
        if (gap > 54.0 * unit + tol) c.gap_upper = false;
    }
    double last = o.x[o.N] - o.x[o.N + 1];
    c.exit_gap = eps < last + tol && last < 3.0 * eps + tol;
    c.delta_bounds = true;
    for (std::size_t n = 0; n < o.delta.size(); ++n) {
        double k = static_cast<double>(n);
        if (o.delta[n] < k * eps / 6.0 - tol || o.delta[n] > k * eps + tol) c.delta_bounds = false;
        c.recursion_error = std::max(c.recursion_error, std::fabs(o.x[n] - (1.0 / (k + 1) - o.delta[n])));
    }
    return c;
}

MapPtr squeeze_mobius(double lambda, double eps) {
    // (x - eps (1 + lambda x)) / (1 + lambda x)
    return moebius(1.0 - eps * lambda, -eps, lambda, 1.0);
}

std::int64_t squeeze_count(double lambda, double mu, double eps) {
    if (!(lambda > mu && mu > 0.0)) throw std::invalid_argument("squeeze_count: need lambda > mu > 0");
    MapPtr A = squeeze_mobius(lambda, eps), B = squeeze_mobius(mu, eps);
    std::vector<double> alpha{1.0}, beta{1.0};
    while (alpha.back() > 0.0) alpha.push_back(A->value(alpha.back()));
    while (beta.back() > alpha.back()) beta.push_back(B->value(beta.back()));
    std::int64_t worst = 0;
    std::size_t k = 0;
    for (std::size_t n = 0; n + 1 < alpha.size(); ++n) {
        // β's in (α_{n+1}, α_n); both orbits decrease
        while (k < beta.size() && beta[k] >= alpha[n]) ++k;
        std::size_t start = k;
        while (k < beta.size() && beta[k] > alpha[n + 1]) ++k;
        worst = std::max<std::int64_t>(worst, static_cast<std::int64_t>(k - start));
    }
    return worst;
}

Squeeze squeeze(const AlmostParabolicMap& ap) {
    Squeeze s;
    const double x0 = ap.x[0];
    // z minimizes |f(x) - x| over the domains: golden section on the unimodal displacement
    auto gap = [&](double x) { return std::fabs(ap.map->value(x) - x); };
    double lo = ap.lo(), hi = ap.hi();
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
        if (gap(c) < gap(d))
            hi = d;
        else
            lo = c;
        c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    }
    s.z = 0.5 * (lo + hi);
    const double scale = x0 - s.z;
    s.normalized = compose({affine(1.0 / scale, -s.z / scale), ap.map, affine(scale, s.z)});
    const MapPtr& F = s.normalized;
    s.eps = std::fabs(F->value(0.0));
    // A(1) = F(1): 1/(1 + lambda) = F(1) + eps
    s.lambda = 1.0 / (F->value(1.0) + s.eps) - 1.0;
    // B(u_a) = F(u_a) with u_a < 0
    const double ua = (ap.x[ap.a] - s.z) / scale;
    s.mu = (ua / (F->value(ua) + s.eps) - 1.0) / ua;
    MapPtr A = squeeze_mobius(s.lambda, s.eps), B = squeeze_mobius(s.mu, s.eps);
    s.ordered = true;
    for (int i = 0; i <= 256; ++i) {
        double u = i / 256.0, fu = F->value(u);
        double slack = 1e-12 * std::max(1.0, std::fabs(fu));
        if (A->value(u) > fu + slack || fu > B->value(u) + slack) s.ordered = false;
    }
    if (s.lambda > s.mu && s.mu > 0.0) {
        s.max_count = squeeze_count(s.lambda, s.mu, s.eps);
        s.allowed = static_cast<std::int64_t>(std::floor(1.0 + s.lambda / s.mu)) + 1;
    }
    return s;
}

Divergence compare_almost_parabolic(const AlmostParabolicMap& f, const AlmostParabolicMap& g,
                                    const std::vector<double>& starts, std::int64_t kmax) {
    if (f.a != g.a) throw CombinatorialMismatch("almost parabolic maps differ in length");
    if (2 * kmax > f.a) throw std::invalid_argument("compare_almost_parabolic: kmax must be at most a/2");
    Divergence dv;
    dv.d.assign(static_cast<std::size_t>(kmax + 1), 0.0);
    for (double x : starts) {
        double u = x, v = x;
        for (std::int64_t k = 1; k <= kmax; ++k) {
            u = f.map->value(u), v = g.map->value(v);
            dv.d[k] = std::max(dv.d[k], std::fabs(u - v));
        }
    }
    dv.sup_diff = sampled_max([&](double x) { return f.map->value(x) - g.map->value(x); }, f.lo(), f.hi(), 513);
    std::vector<double> lk, ld;
    for (std::int64_t k = 1; k <= kmax; ++k) {
        if (dv.d[k] < dv.d[k - 1]) dv.monotone = false;
        if (dv.d[k] > 0.0) {
            lk.push_back(std::log(static_cast<double>(k)));
            ld.push_back(std::log(dv.d[k]));
        }
        if (dv.sup_diff > 0.0) {
            double k3 = static_cast<double>(k) * k * k;
            dv.C_hat = std::max(dv.C_hat, dv.d[k] / (dv.sup_diff * k3));
        }
    }
    if (lk.size() >= 2) dv.slope = fit_line(lk, ld).slope;
    return dv;
}

MobiusModel mobius_model_pair(std::int64_t a, double eta) {
    if (a < 4) throw std::invalid_argument("mobius_model_pair: need a >= 4");
    // N(eps) is nonincreasing; look for N = a - 1 so that Δ_a reaches past 0
    auto N = [](double e) { return parabolic_mobius_orbit(e).N; };
    double lo = 1e-14, hi = 0.49;
    double eps = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = std::sqrt(lo * hi);
        std::int64_t n = N(mid);
        if (n == a - 1) {
            eps = mid;
            break;
        }
        (n > a - 1 ? lo : hi) = mid;
    }
    if (eps == 0.0) throw BracketFailure("mobius_model_pair: no eps with the requested length");
    MobiusModel m;
    m.eps = eps;
    MapPtr T = moebius(1.0 - eps, -eps, 1.0, 1.0);
    m.f = almost_parabolic_from_orbit(T, 1.0, a);
    m.g = almost_parabolic_from_orbit(compose({T, affine(1.0, eta)}), 1.0, a);
    return m;
}

}  // namespace renormlab
