#include "renormlab/map.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace renormlab {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double eps = std::numeric_limits<double>::epsilon();

double sign_of(double u) { return u < 0.0 ? -1.0 : 1.0; }

// coef * t^e without 0 * inf when the coefficient vanishes
double power_term(double coef, double t, double e) { return coef == 0.0 ? 0.0 : coef * std::pow(t, e); }

}  // namespace

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::affine: return "affine";
        case Kind::moebius: return "moebius";
        case Kind::power_law: return "power-law-chart";
        case Kind::sine_family: return "sine-family";
        case Kind::bump: return "bump";
        case Kind::inverse_of: return "inverse-of";
        case Kind::composition: return "composition";
        case Kind::iterate: return "iterate";
        case Kind::windowed: return "windowed";
    }
    return "?";
}

Kind kind_from_name(const std::string& s) {
    for (Kind k : {Kind::affine, Kind::moebius, Kind::power_law, Kind::sine_family, Kind::bump, Kind::inverse_of,
                   Kind::composition, Kind::iterate, Kind::windowed})
        if (kind_name(k) == s) return k;
    throw std::invalid_argument("unknown map kind: " + s);
}

double schwarzian(const Jet3& j) {
    if (j.d1 == 0.0) throw CriticalPointError("Schwarzian undefined where the derivative vanishes");
    const double r = j.d2 / j.d1;
    return j.d3 / j.d1 - 1.5 * r * r;
}

// ---------------------------------------------------------------- Moebius

MoebiusNode::MoebiusNode(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {
    double det = a * d - b * c;
    if (!(det > 0.0)) throw DomainError("Moebius node needs a positive determinant");
    if (std::fabs(det - 1.0) > 1e-12) {
        double s = 1.0 / std::sqrt(det);
        a *= s, b *= s, c *= s, d *= s;
    }
}

Jet3 MoebiusNode::jet(double x) const {
    double den = c * x + d;
    if (den == 0.0) throw DomainError("Moebius pole at evaluation point");
    double det = a * d - b * c;
    double inv = 1.0 / den;
    return {(a * x + b) * inv, det * inv * inv, -2.0 * c * det * inv * inv * inv,
            6.0 * c * c * det * inv * inv * inv * inv};
}

double MoebiusNode::value(double x) const {
    double den = c * x + d;
    if (den == 0.0) throw DomainError("Moebius pole at evaluation point");
    return (a * x + b) / den;
}

DD MoebiusNode::value(const DD& x) const {
    DD den = x * c + d;
    if (den.hi == 0.0) throw DomainError("Moebius pole at evaluation point");
    return (x * a + b) / den;
}

// ---------------------------------------------------------------- power law

PowerLawNode::PowerLawNode(double p_, double c_, double a_) : p(p_), c(c_), a(a_) {
    if (!(p >= 1.0)) throw std::invalid_argument("power-law exponent must be >= 1");
}

Jet3 PowerLawNode::jet(double x) const {
    double u = x - c;
    double t = std::fabs(u);
    double s = sign_of(u);
    return {s * std::pow(t, p) + a, power_term(p, t, p - 1.0), s * power_term(p * (p - 1.0), t, p - 2.0),
            power_term(p * (p - 1.0) * (p - 2.0), t, p - 3.0)};
}

double PowerLawNode::value(double x) const {
    double u = x - c;
    return sign_of(u) * std::pow(std::fabs(u), p) + a;
}

DD PowerLawNode::value(const DD& x) const {
    DD u = x - c;
    DD t = abs(u);
    DD r = pow(t, p);
    return (u.hi < 0.0 ? -r : r) + a;
}

// ---------------------------------------------------------------- sine family

Jet3 SineFamilyNode::jet(double x) const {
    double r = x - std::nearbyint(x);
    double s = std::sin(two_pi * r), co = std::cos(two_pi * r);
    return {x + omega - K / two_pi * s, 1.0 - K * co, two_pi * K * s, two_pi * two_pi * K * co};
}

double SineFamilyNode::value(double x) const {
    double r = x - std::nearbyint(x);
    return x + omega - K / two_pi * std::sin(two_pi * r);
}

DD SineFamilyNode::value(const DD& x) const {
    return x + omega - (DD(K) / dd_two_pi) * sin2pi(x);
}

// ---------------------------------------------------------------- bump

BumpNode::BumpNode(double center_, double radius_, double amplitude_)
    : center(center_), radius(radius_), amplitude(amplitude_) {
    if (!(radius > 0.0 && radius < 0.5)) throw std::invalid_argument("bump radius must lie in (0, 1/2)");
}

Jet3 BumpNode::jet(double x) const {
    double dx = x - center;
    dx -= std::nearbyint(dx);
    double t = dx / radius;
    if (std::fabs(t) >= 1.0) return identity_jet(x);
    double s = 1.0 - t * t;
    double eta = std::exp(1.0 - 1.0 / s);
    if (eta == 0.0) return identity_jet(x);
    double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    double g1 = -2.0 * t / s2;
    double g2 = -2.0 / s2 - 8.0 * t * t / s3;
    double g3 = -24.0 * t / s3 - 48.0 * t * t * t / s4;
    double e1 = eta * g1;
    double e2 = eta * (g2 + g1 * g1);
    double e3 = eta * (g3 + 3.0 * g1 * g2 + g1 * g1 * g1);
    double A = amplitude;
    return {x + A * eta, 1.0 + A * e1 / radius, A * e2 / (radius * radius), A * e3 / (radius * radius * radius)};
}

double BumpNode::value(double x) const {
    double dx = x - center;
    dx -= std::nearbyint(dx);
    double t = dx / radius;
    if (std::fabs(t) >= 1.0) return x;
    return x + amplitude * std::exp(1.0 - 1.0 / (1.0 - t * t));
}

DD BumpNode::value(const DD& x) const {
    DD dx = x - center;
    dx = dx - round(dx);
    DD t = dx / radius;
    if (std::fabs(t.hi) >= 1.0) return x;
    DD s = 1.0 - sqr(t);
    return x + exp(1.0 - 1.0 / s) * amplitude;
}

// ---------------------------------------------------------------- inverse

InverseNode::InverseNode(MapPtr f, double lo_, double hi_) : inner(std::move(f)), lo(lo_), hi(hi_) {
    if (!inner) throw std::invalid_argument("inverse-of needs an inner node");
}

double InverseNode::value(double x) const {
    const Node& f = *inner;
    auto g = [&](double y) { return f.value(y) - x; };

    double a, b;
    double increasing;
    if (has_bracket()) {
        a = lo, b = hi;
        double w = b - a;
        double ga = g(a), gb = g(b);
        // tolerate a slightly stale bracket by widening it a few times
        for (int i = 0; i < 8 && ga * gb > 0.0; ++i) {
            a -= w, b += w, w *= 2.0;
            ga = g(a), gb = g(b);
        }
        if (ga * gb > 0.0) throw DomainError("inverse-of: value outside the image of the bracket");
        if (ga == 0.0) return a;
        if (gb == 0.0) return b;
        increasing = ga < 0.0 ? 1.0 : -1.0;
    } else {
        double y0 = x;
        double g0 = g(y0);
        if (g0 == 0.0) return y0;
        double probe = f.value(y0 + 1.0) - f.value(y0);
        increasing = probe > 0.0 ? 1.0 : -1.0;
        double dir = (g0 < 0.0) == (increasing > 0.0) ? 1.0 : -1.0;
        double step = 1.0;
        double y1 = y0 + dir * step;
        double g1 = g(y1);
        int guard = 0;
        while (g0 * g1 > 0.0) {
            if (++guard > 80) throw DomainError("inverse-of: no preimage found");
            y0 = y1, g0 = g1;
            step *= 2.0;
            y1 = y0 + dir * step;
            g1 = g(y1);
        }
        a = std::min(y0, y1), b = std::max(y0, y1);
    }

    // orient so that h(a) < 0 < h(b)
    auto h = [&](double y) { return increasing * g(y); };
    double y = 0.5 * (a + b);
    for (int it = 0; it < 300; ++it) {
        Jet3 j = f.jet(y);
        double hy = increasing * (j.f - x);
        if (hy == 0.0) return y;
        if (hy < 0.0) a = y; else b = y;
        double d = increasing * j.d1;
        double yn = (d > 0.0) ? y - hy / d : 0.5 * (a + b);
        if (!(yn > a && yn < b)) yn = 0.5 * (a + b);
        double tol = 2.0 * eps * std::max(1.0, std::fabs(y));
        if (std::fabs(yn - y) <= tol || b - a <= tol) {
            // final choice between the two closest candidates
            return std::fabs(h(yn)) < std::fabs(hy) ? yn : y;
        }
        y = yn;
    }
    return y;
}

Jet3 InverseNode::jet(double x) const {
    double y = value(x);
    Jet3 j = inner->jet(y);
    if (j.d1 == 0.0) throw CriticalPointError("inverse-of: derivative vanishes at the preimage");
    Jet3 r = invert(j);
    r.f = y;
    return r;
}

DD InverseNode::value(const DD& x) const {
    DD y(value(x.to_double()));
    for (int i = 0; i < 3; ++i) {
        double d = inner->jet(y.to_double()).d1;
        if (d == 0.0) break;
        DD r = inner->value(y) - x;
        if (r.hi == 0.0) break;
        y = y - r / d;
    }
    return y;
}

// ---------------------------------------------------------------- composition / iterate

CompositionNode::CompositionNode(std::vector<MapPtr> p) : parts(std::move(p)) {
    for (auto& q : parts)
        if (!q) throw std::invalid_argument("composition with a null part");
}

Jet3 CompositionNode::jet(double x) const {
    Jet3 j = identity_jet(x);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) j = compose((*it)->jet(j.f), j);
    return j;
}

double CompositionNode::value(double x) const {
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) x = (*it)->value(x);
    return x;
}

DD CompositionNode::value(const DD& x) const {
    DD y = x;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) y = (*it)->value(y);
    return y;
}

IterateNode::IterateNode(MapPtr f, std::int64_t n, std::int64_t translate_, bool reduce_)
    : inner(std::move(f)), count(n), translate(translate_), reduce(reduce_) {
    if (!inner) throw std::invalid_argument("iterate of a null node");
    if (count < 0) throw std::invalid_argument("iterate count must be >= 0");
}

Jet3 IterateNode::jet(double x) const {
    Jet3 j = identity_jet(x);
    if (!reduce) {
        for (std::int64_t k = 0; k < count; ++k) j = compose(inner->jet(j.f), j);
        j.f -= static_cast<double>(translate);
        return j;
    }
    double base = std::floor(x);
    double y = x - base;
    std::int64_t wind = 0;
    j.f = y;
    for (std::int64_t k = 0; k < count; ++k) {
        j = compose(inner->jet(j.f), j);
        double fl = std::floor(j.f);
        j.f -= fl;
        wind += static_cast<std::int64_t>(fl);
    }
    j.f += static_cast<double>(wind - translate) + base;
    return j;
}

double IterateNode::value(double x) const {
    if (!reduce) {
        for (std::int64_t k = 0; k < count; ++k) x = inner->value(x);
        return x - static_cast<double>(translate);
    }
    double base = std::floor(x);
    double y = x - base;
    std::int64_t wind = 0;
    for (std::int64_t k = 0; k < count; ++k) {
        y = inner->value(y);
        double fl = std::floor(y);
        y -= fl;
        wind += static_cast<std::int64_t>(fl);
    }
    return y + (static_cast<double>(wind - translate) + base);
}

DD IterateNode::value(const DD& x) const {
    if (!reduce) {
        DD y = x;
        for (std::int64_t k = 0; k < count; ++k) y = inner->value(y);
        return y - static_cast<double>(translate);
    }
    DD base = floor(x);
    DD y = x - base;
    std::int64_t wind = 0;
    for (std::int64_t k = 0; k < count; ++k) {
        y = inner->value(y);
        DD fl = floor(y);
        y -= fl;
        wind += static_cast<std::int64_t>(fl.to_double());
    }
    return y + (DD(static_cast<double>(wind - translate)) + base);
}

// ---------------------------------------------------------------- windowed

WindowedNode::WindowedNode(MapPtr f, double l, double r) : inner(std::move(f)), left(l), right(r) {
    if (!inner) throw std::invalid_argument("windowed of a null node");
    if (!(right > left && right - left < 1.0)) throw std::invalid_argument("window must be an arc shorter than 1");
}

template <class T>
bool WindowedNode::shift_into(const T& x, T& y, double& shift) const {
    shift = std::floor(to_double(x - left));
    y = x - shift;
    return to_double(y) > left && to_double(y) < right;
}

Jet3 WindowedNode::jet(double x) const {
    double y, k;
    if (!shift_into(x, y, k)) return identity_jet(x);
    Jet3 j = inner->jet(y);
    j.f += k;
    return j;
}

double WindowedNode::value(double x) const {
    double y, k;
    if (!shift_into(x, y, k)) return x;
    return inner->value(y) + k;
}

DD WindowedNode::value(const DD& x) const {
    DD y;
    double k;
    if (!shift_into(x, y, k)) return x;
    return inner->value(y) + k;
}

// ---------------------------------------------------------------- factories

MapPtr identity() { return affine(1.0, 0.0); }
MapPtr affine(double a, double b) { return std::make_shared<AffineNode>(a, b); }
MapPtr moebius(double a, double b, double c, double d) { return std::make_shared<MoebiusNode>(a, b, c, d); }
MapPtr power_law(double p, double c, double a) { return std::make_shared<PowerLawNode>(p, c, a); }
MapPtr sine_family(double omega, double K) { return std::make_shared<SineFamilyNode>(omega, K); }
MapPtr rigid_rotation(double rho) { return affine(1.0, rho); }
MapPtr bump(double center, double radius, double amplitude) {
    return std::make_shared<BumpNode>(center, radius, amplitude);
}
MapPtr inverse_of(MapPtr f, double lo, double hi) { return std::make_shared<InverseNode>(std::move(f), lo, hi); }
MapPtr compose(std::vector<MapPtr> parts) { return std::make_shared<CompositionNode>(std::move(parts)); }
MapPtr iterate(MapPtr f, std::int64_t n) { return std::make_shared<IterateNode>(std::move(f), n); }
MapPtr circle_iterate(MapPtr F, std::int64_t n, std::int64_t p) {
    return std::make_shared<IterateNode>(std::move(F), n, p, true);
}
MapPtr windowed(MapPtr f, double left, double right) {
    return std::make_shared<WindowedNode>(std::move(f), left, right);
}

CircleMap critical_sine_map(double omega) { return {sine_family(omega, 1.0), 0.0, true}; }
CircleMap rotation_map(double rho) { return {rigid_rotation(rho), 0.0, false}; }

CircleMap conjugate(const CircleMap& f, MapPtr h) {
    CircleMap g;
    g.critical = h->value(f.critical);
    g.lift = compose({h, f.lift, inverse_of(h)});
    g.has_critical_point = f.has_critical_point;
    return g;
}

// ---------------------------------------------------------------- precision

PrecisionPolicy PrecisionPolicy::for_backend(Backend b) {
    PrecisionPolicy p;
    p.backend = b;
    if (b == Backend::double_double) p.min_interval_guard = 1e-28;
    return p;
}

Backend parse_backend(const std::string& s) {
    if (s == "f64" || s == "binary64") return Backend::binary64;
    if (s == "dd" || s == "double-double") return Backend::double_double;
    throw std::invalid_argument("unknown precision backend: " + s);
}

std::string backend_name(Backend b) { return b == Backend::binary64 ? "f64" : "dd"; }

PrecisionPolicy policy_from_env(Backend fallback) {
    const char* env = std::getenv("RENORMLAB_PRECISION");
    if (env && *env) return PrecisionPolicy::for_backend(parse_backend(env));
    return PrecisionPolicy::for_backend(fallback);
}

Jet3 eval_jet(const MapPtr& f, double x) { return f->jet(x); }

Jet3 iterate_jet(const MapPtr& f, double x, std::int64_t n, const PrecisionPolicy& policy) {
    if (n < 0) throw std::invalid_argument("iterate_jet: negative count");
    if (n > policy.orbit_length_guard) throw PrecisionExhausted("iterate_jet: count exceeds the orbit-length guard");
    Jet3 j = identity_jet(x);
    double err = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        Jet3 step = f->jet(j.f);
        err = std::fabs(step.d1) * err + 2.0 * eps * std::max(1.0, std::fabs(step.f));
        if (err > policy.jet_error_tolerance)
            throw PrecisionExhausted("iterate_jet: forward error estimate exceeds tolerance at step " +
                                     std::to_string(k + 1));
        j = compose(step, j);
    }
    return j;
}

double schwarzian(const MapPtr& f, double x) { return schwarzian(f->jet(x)); }

std::vector<DD> orbit_dd(const MapPtr& f, const DD& x0, std::int64_t n) {
    std::vector<DD> z;
    z.reserve(static_cast<std::size_t>(n) + 1);
    z.push_back(x0);
    for (std::int64_t k = 0; k < n; ++k) z.push_back(f->value(z.back()));
    return z;
}

std::vector<double> orbit(const MapPtr& f, double x0, std::int64_t n, const PrecisionPolicy& policy) {
    if (n > policy.orbit_length_guard) throw PrecisionExhausted("orbit length exceeds the orbit-length guard");
    std::vector<double> z;
    z.reserve(static_cast<std::size_t>(n) + 1);
    if (policy.backend == Backend::double_double) {
        DD y(x0);
        z.push_back(x0);
        for (std::int64_t k = 0; k < n; ++k) {
            y = f->value(y);
            z.push_back(y.to_double());
        }
        return z;
    }
    z.push_back(x0);
    double y = x0;
    for (std::int64_t k = 0; k < n; ++k) {
        y = f->value(y);
        z.push_back(y);
    }
    return z;
}

void CircleOrbit::extend(const MapPtr& F, std::int64_t n, Backend backend) {
    if (wind.empty()) throw std::logic_error("CircleOrbit::extend on an empty orbit");
    wind.reserve(static_cast<std::size_t>(n) + 1);
    frac.reserve(static_cast<std::size_t>(n) + 1);
    std::int64_t w = wind.back();
    if (backend == Backend::double_double) {
        DD y = frac.back();
        while (size() <= n) {
            y = F->value(y);
            DD fl = floor(y);
            y -= fl;
            w += static_cast<std::int64_t>(fl.to_double());
            wind.push_back(w);
            frac.push_back(y);
        }
        return;
    }
    double y = frac.back().hi;
    while (size() <= n) {
        y = F->value(y);
        double fl = std::floor(y);
        y -= fl;
        w += static_cast<std::int64_t>(fl);
        wind.push_back(w);
        frac.push_back(DD(y));
    }
}

CircleOrbit circle_orbit(const MapPtr& F, double x0, std::int64_t n, const PrecisionPolicy& policy) {
    if (n > policy.orbit_length_guard) throw PrecisionExhausted("orbit length exceeds the orbit-length guard");
    CircleOrbit o;
    double fl = std::floor(x0);
    o.wind.push_back(static_cast<std::int64_t>(fl));
    o.frac.push_back(DD(x0 - fl));
    o.extend(F, n, policy.backend);
    return o;
}

}  // namespace renormlab
