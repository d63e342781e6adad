#include "renormlab/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace renormlab {

CommutingPair make_pair(double lambda, MapPtr f_minus, MapPtr f_plus, int level) {
    if (!(lambda < 0.0)) throw DomainError("commuting pair needs lambda < 0");
    CommutingPair p;
    p.lambda = lambda;
    p.f_minus = std::move(f_minus);
    p.f_plus = std::move(f_plus);
    p.level = level;
    p.height = compute_height(p);
    return p;
}

Jet3 shadow_jet(const CommutingPair& pair, double x) {
    if (x < pair.lambda || x > 1.0) throw DomainError("shadow evaluated outside [lambda, 1]");
    return x <= 0.0 ? pair.f_minus->jet(x) : pair.f_plus->jet(x);
}

double shadow_eval(const CommutingPair& pair, double x) {
    if (x < pair.lambda || x > 1.0) throw DomainError("shadow evaluated outside [lambda, 1]");
    return x <= 0.0 ? pair.f_minus->value(x) : pair.f_plus->value(x);
}

Height compute_height(const CommutingPair& pair, std::int64_t guard) {
    Height h;
    const MapPtr& fp = pair.f_plus;
    // look for f_+(x) >= x on (0, 1]
    const int grid = 257;
    double prev = 0.0;
    for (int i = 1; i < grid; ++i) {
        double x = static_cast<double>(i) / (grid - 1);
        if (fp->value(x) - x >= 0.0) {
            double lo = prev, hi = x;
            for (int k = 0; k < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon(); ++k) {
                double mid = 0.5 * (lo + hi);
                (fp->value(mid) - mid >= 0.0 ? hi : lo) = mid;
            }
            h.infinite = true;
            h.fixed_point = 0.5 * (lo + hi);
            return h;
        }
        prev = x;
    }
    double x = 1.0;
    for (std::int64_t k = 0; k < guard; ++k) {
        double y = fp->value(x);
        if (y < 0.0) {
            h.value = k;
            return h;
        }
        if (!(y < x)) throw PrecisionExhausted("shadow orbit stalled near a fixed point of f_+");
        x = y;
    }
    throw PrecisionExhausted("height exceeds the iteration guard");
}

CommutingPair renormalize_pair(const CommutingPair& pair) {
    if (pair.height.infinite) throw NonRenormalizable("pair has infinite height");
    const std::int64_t a = pair.height.value;
    double xa = 1.0;
    for (std::int64_t k = 0; k < a; ++k) xa = pair.f_plus->value(xa);
    if (!(xa > 0.0)) throw NonRenormalizable("shadow^a(1) is not positive");
    const double l = pair.lambda;
    MapPtr scale = affine(l, 0.0), unscale = affine(1.0 / l, 0.0);
    MapPtr fm = compose({unscale, pair.f_plus, scale});
    MapPtr fp = a == 0 ? compose({unscale, pair.f_minus, scale})
                       : compose({unscale, iterate(pair.f_plus, a), pair.f_minus, scale});
    return make_pair(xa / l, fm, fp, pair.level > 0 ? pair.level + 1 : 0);
}

namespace {

void check_level(const ContinuedFraction& cf, int n) {
    if (n < 1 || static_cast<std::size_t>(n) >= cf.q.size())
        throw std::invalid_argument("level " + std::to_string(n) + " needs q_n from the continued fraction");
}

}  // namespace

CommutingPair extract_pair(const CircleMap& f, const ContinuedFraction& cf, int n, const PrecisionPolicy& policy) {
    check_level(cf, n);
    const std::int64_t qn = cf.q[n], qm = cf.q[n - 1], pn = cf.p[n], pm = cf.p[n - 1];
    if (qn + qm > policy.orbit_length_guard) throw PrecisionExhausted("pair exceeds the orbit-length guard");
    const double c = f.critical;
    const double s = displacement(f, qm, pm, policy.backend);
    const double d = displacement(f, qn, pn, policy.backend);
    if (std::fabs(s) < policy.min_interval_guard || std::fabs(d) < policy.min_interval_guard)
        throw PrecisionExhausted("first return intervals below the minimal interval guard at level " +
                                 std::to_string(n));
    const double lambda = d / s;
    if (!(lambda < 0.0))
        throw CombinatorialMismatch("closest returns on the same side of the marked point at level " +
                                    std::to_string(n));
    MapPtr chart = affine(s, c), unchart = affine(1.0 / s, -c / s);
    MapPtr fm = compose({unchart, circle_iterate(f.lift, qm, pm), chart});
    MapPtr fp = compose({unchart, circle_iterate(f.lift, qn, pn), chart});
    return make_pair(lambda, fm, fp, n);
}

CommutingPair extract_pair(const CircleMap& f, int n, const PrecisionPolicy& policy) {
    RotationMeasurement m = rotation_number(f, n + 1, policy);
    return extract_pair(f, m.cf, n, policy);
}

NormalizedPair normalize(const CommutingPair& pair) {
    const double l = pair.lambda;
    const double r = std::sqrt(l * l - l);
    MapPtr M = moebius(1.0 / r, -l / r, (1.0 + l) / r, -2.0 * l / r);
    MapPtr Minv = moebius(-2.0 * l / r, l / r, -(1.0 + l) / r, 1.0 / r);
    NormalizedPair np;
    np.lambda = l;
    np.left = compose({M, pair.f_minus, Minv});
    np.right = compose({M, pair.f_plus, Minv});
    return np;
}

namespace {

double jet_part(const Jet3& j, int order) {
    switch (order) {
        case 0: return j.f;
        case 1: return j.d1;
        case 2: return j.d2;
        default: return j.d3;
    }
}

double halves_distance(const NormalizedPair& a, const NormalizedPair& b, int k, int points) {
    double m = 0.0;
    for (int half = 0; half < 2; ++half) {
        const MapPtr& fa = half == 0 ? a.left : a.right;
        const MapPtr& fb = half == 0 ? b.left : b.right;
        const double lo = 0.5 * half;
        for (int i = 0; i < points; ++i) {
            double y = lo + 0.5 * i / (points - 1);
            Jet3 ja = fa->jet(y), jb = fb->jet(y);
            for (int o = 0; o <= k; ++o) m = std::max(m, std::fabs(jet_part(ja, o) - jet_part(jb, o)));
        }
    }
    return m;
}

}  // namespace

double ck_distance(const NormalizedPair& a, const NormalizedPair& b, int k) {
    if (k < 0 || k > 3) throw std::invalid_argument("ck_distance: k must be in 0..3");
    int points = 257;
    double est = halves_distance(a, b, k, points);
    for (int doubling = 0; doubling < 4; ++doubling) {
        points = 2 * points - 1;
        double next = halves_distance(a, b, k, points);
        bool settled = std::fabs(next - est) < 1e-10;
        est = std::max(est, next);
        if (settled) break;
    }
    return std::max(std::fabs(a.lambda - b.lambda), est);
}

double ck_distance(const CommutingPair& a, const CommutingPair& b, int k) {
    return ck_distance(normalize(a), normalize(b), k);
}

double commutation_residue(const CommutingPair& pair, int order) {
    Jet3 m0 = pair.f_minus->jet(0.0), p0 = pair.f_plus->jet(0.0);
    Jet3 pm = pair.f_plus->jet(m0.f), mp = pair.f_minus->jet(p0.f);
    if (order == 0) return std::fabs(pm.f - mp.f);
    if (order == 1) return std::fabs(pm.d1 * m0.d1 - mp.d1 * p0.d1);
    throw std::invalid_argument("commutation_residue: order must be 0 or 1");
}

// ---------------------------------------------------------------- elementary factors

MapPtr ElementaryFactors::composite(std::size_t first) const {
    std::vector<MapPtr> parts{closing};
    for (std::size_t j = factors.size(); j-- > first;) parts.push_back(factors[j]);
    return compose(parts);
}

ElementaryFactors elementary_factors(const CircleMap& f, const ContinuedFraction& cf, int n,
                                     const PrecisionPolicy& policy) {
    check_level(cf, n);
    const std::int64_t Q = cf.q[n];
    if (Q > policy.orbit_length_guard) throw PrecisionExhausted("factorization exceeds the orbit-length guard");
    const double s = displacement(f, cf.q[n - 1], cf.p[n - 1], policy.backend);
    ElementaryFactors ef;
    ef.level = n;
    ef.steps = Q;
    ef.left.push_back(std::min(f.critical, f.critical + s));
    ef.length.push_back(std::fabs(s));
    for (std::int64_t j = 0; j < Q; ++j) {
        double lo = ef.left.back(), len = ef.length.back();
        double a = f.lift->value(lo);
        double k = std::floor(a);
        double lo1 = a - k;
        double len1 = f.lift->value(lo + len) - k - lo1;
        if (!(len1 > policy.min_interval_guard))
            throw PrecisionExhausted("elementary factor interval below the minimal interval guard");
        ef.factors.push_back(compose({affine(1.0 / len1, -(lo1 + k) / len1), f.lift, affine(len, lo)}));
        ef.left.push_back(lo1);
        ef.length.push_back(len1);
    }
    const double lo0 = ef.left.front(), len0 = ef.length.front();
    const double loQ = ef.left.back(), lenQ = ef.length.back();
    const double m = std::round(loQ - lo0);
    ef.closing = affine(lenQ / len0, (loQ - m - lo0) / len0);
    return ef;
}

MapPtr coefficient_plus(const CircleMap& f, const ContinuedFraction& cf, int n, const PrecisionPolicy& policy) {
    check_level(cf, n);
    const std::int64_t Q = cf.q[n];
    const double s = displacement(f, cf.q[n - 1], cf.p[n - 1], policy.backend);
    const double lo0 = std::min(f.critical, f.critical + s), len0 = std::fabs(s);
    double a = f.lift->value(lo0);
    const double lo1 = a - std::floor(a);
    const double len1 = f.lift->value(lo0 + len0) - a;
    MapPtr it = circle_iterate(f.lift, Q - 1, 0);
    const double p = std::round(it->value(lo1) - lo0);
    return compose({affine(1.0 / len0, -lo0 / len0), circle_iterate(f.lift, Q - 1, static_cast<std::int64_t>(p)),
                    affine(len1, lo1)});
}

namespace {

struct SchwarzianSample {
    double sup = 0.0, max = -std::numeric_limits<double>::infinity();
    bool vacuous = true;
};

// S of f^m on [x0, x0 + len] in a chart of slope `unit`:
// S f^m(x) = Σ Sf(x_j) (D f^j(x))^2, and rescaling multiplies by unit^2.
SchwarzianSample sample_schwarzian(const CircleMap& f, double x0, double len, double unit, std::int64_t m,
                                   int samples) {
    SchwarzianSample out;
    if (m <= 0) return out;
    out.vacuous = false;
    for (int i = 0; i < samples; ++i) {
        double x = x0 + len * i / (samples - 1);
        x -= std::floor(x);
        double scale = unit, acc = 0.0;
        for (std::int64_t j = 0; j < m; ++j) {
            Jet3 jt = f.lift->jet(x);
            acc += schwarzian(jt) * scale * scale;
            scale *= jt.d1;
            x = jt.f - std::floor(jt.f);
        }
        out.sup = std::max(out.sup, std::fabs(acc));
        out.max = std::max(out.max, acc);
    }
    return out;
}

}  // namespace

SchwarzianReport coefficient_schwarzian_report(const CircleMap& f, const ContinuedFraction& cf, int n, int samples) {
    check_level(cf, n);
    const double c = f.critical;
    // I_{n-1}^1 and I_n^1
    const double s = displacement(f, cf.q[n - 1], cf.p[n - 1]);
    const double d = displacement(f, cf.q[n], cf.p[n]);
    auto image = [&](double width) {
        double lo = std::min(c, c + width), hi = std::max(c, c + width);
        double a = f.lift->value(lo);
        return std::pair<double, double>{a, f.lift->value(hi) - a};
    };
    auto [lp, wp] = image(s);
    auto [lm, wm] = image(d);
    // both coefficients use the chart of I_{n-1}^1
    SchwarzianSample plus = sample_schwarzian(f, lp, wp, wp, cf.q[n] - 1, samples);
    SchwarzianSample minus = sample_schwarzian(f, lm, wm, wp, cf.q[n - 1] - 1, samples);

    SchwarzianReport r;
    r.level = n;
    r.sup_plus = plus.sup;
    r.sup_minus = minus.sup;
    r.max_plus = plus.vacuous ? 0.0 : plus.max;
    r.max_minus = minus.vacuous ? 0.0 : minus.max;
    r.negative = !(plus.vacuous && minus.vacuous) && (plus.vacuous || plus.max < 0.0) &&
                 (minus.vacuous || minus.max < 0.0);
    return r;
}

SchwarzianSweep schwarzian_sweep(const CircleMap& f, const ContinuedFraction& cf, int n_lo, int n_hi, int samples) {
    SchwarzianSweep sw;
    for (int n = n_lo; n <= n_hi; ++n) sw.levels.push_back(coefficient_schwarzian_report(f, cf, n, samples));
    for (auto it = sw.levels.rbegin(); it != sw.levels.rend() && it->negative; ++it) sw.negative_from = it->level;
    return sw;
}

json pair_to_json(const CommutingPair& pair, int points_per_half) {
    NormalizedPair np = normalize(pair);
    json doc;
    doc["schema"] = "pair/1";
    doc["level"] = pair.level;
    doc["lambda"] = format_real(pair.lambda);
    if (pair.height.infinite)
        doc["height"] = "infinite";
    else
        doc["height"] = pair.height.value;
    for (int half = 0; half < 2; ++half) {
        const MapPtr& g = half == 0 ? np.left : np.right;
        json xs = json::array(), f = json::array(), d1 = json::array(), d2 = json::array(), d3 = json::array();
        for (int i = 0; i < points_per_half; ++i) {
            double y = 0.5 * half + 0.5 * i / (points_per_half - 1);
            Jet3 j = g->jet(y);
            xs.push_back(format_real(y));
            f.push_back(format_real(j.f));
            d1.push_back(format_real(j.d1));
            d2.push_back(format_real(j.d2));
            d3.push_back(format_real(j.d3));
        }
        doc[half == 0 ? "left" : "right"] = {{"x", xs}, {"f", f}, {"d1", d1}, {"d2", d2}, {"d3", d3}};
    }
    return doc;
}

}  // namespace renormlab
