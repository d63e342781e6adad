#include "renormlab/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "renormlab/numerics.hpp"

namespace renormlab {

JetFn as_jet_fn(const MapPtr& f) {
    return [f](double x) { return f->jet(x); };
}

double cross_ratio(const IntervalPair& p) {
    if (!(p.t_lo <= p.m_lo && p.m_lo < p.m_hi && p.m_hi <= p.t_hi)) throw DomainError("cross ratio: M must lie in T");
    if (!(p.left() > 0.0 && p.right() > 0.0)) throw DomainError("cross ratio: degenerate pair");
    return p.middle() * p.total() / (p.left() * p.right());
}

double cross_ratio_distortion(const JetFn& f, const IntervalPair& p) {
    const int pts = 65;
    int sign = 0;
    for (int i = 0; i < pts; ++i) {
        double d = f(p.t_lo + p.total() * i / (pts - 1)).d1;
        int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (s == 0 || (sign != 0 && s != sign)) throw DomainError("cross ratio distortion: map is not injective on T");
        sign = s;
    }
    double a = f(p.t_lo).f, b = f(p.m_lo).f, c = f(p.m_hi).f, d = f(p.t_hi).f;
    if (sign < 0) std::swap(a, d), std::swap(b, c);
    IntervalPair img{a, b, c, d};
    return cross_ratio(img) / cross_ratio(p);
}

double cross_ratio_distortion(const MapPtr& f, const IntervalPair& p) {
    return cross_ratio_distortion(as_jet_fn(f), p);
}

double koebe_constant(double tau, double ell, double C) {
    if (tau < 0.0 || ell < 0.0 || C < 0.0) throw std::invalid_argument("koebe_constant: arguments must be >= 0");
    if (tau == 0.0) return std::numeric_limits<double>::infinity();
    double s = 1.0 + 1.0 / tau;
    return s * s * std::exp(C * ell);
}

double nonlinearity_bound(double tau, double B) {
    if (!(tau > 0.0) || B < 0.0) throw std::invalid_argument("nonlinearity_bound: need tau > 0 and B >= 0");
    if (B == 0.0) return 2.0 / tau;
    double beta = std::sqrt(2.0 * B);
    // (e^x + 1)/(e^x - 1) = 1/tanh(x/2)
    return beta / std::tanh(0.5 * beta * tau);
}

double sampled_nonlinearity(const JetFn& phi, double lo, double hi) {
    return sup_norm(
        [&](double t) {
            Jet3 j = phi(t);
            return j.d2 / j.d1;
        },
        lo, hi);
}

double sampled_schwarzian_min(const JetFn& phi, double lo, double hi, int points) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) m = std::min(m, schwarzian(phi(lo + (hi - lo) * i / (points - 1))));
    return m;
}

// ---------------------------------------------------------------- C^m approximation

double composition_constant(double M, int m) {
    if (m < 1 || m > 3) throw std::invalid_argument("composition_constant: m must be in 1..3");
    // at m = 1 the sup-norm estimate is Lipschitz: |u| + |Dphi| |v|
    if (m == 1) return 1.0 + M;
    // A(1) = A(2) = 1, maxima of the Faa di Bruno coefficients
    const double A = 1.0;
    double sum = 0.0, pk = 1.0;
    for (int k = 1; k <= m - 1; ++k) sum += (pk *= M);
    return A * (1.0 + std::ldexp(M, m - 1)) * sum;
}

namespace {

double norm_component(const Jet3& j, int order) {
    switch (order) {
        case 0: return std::fabs(j.f);
        case 1: return std::fabs(j.d1);
        case 2: return std::fabs(j.d2);
        default: return std::fabs(j.d3);
    }
}

double jet_norm(const Jet3& j, int m) {
    double r = 0.0;
    for (int o = 0; o <= m; ++o) r = std::max(r, norm_component(j, o));
    return r;
}

Jet3 jet_diff(const Jet3& a, const Jet3& b) { return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2, a.d3 - b.d3}; }

std::vector<double> grid(Interval I, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = I.lo + I.length() * i / (n - 1);
    return x;
}

void check_chain(const FactorChain& c) {
    if (c.maps.empty() || c.domains.size() != c.maps.size() + 1)
        throw std::invalid_argument("factor chain needs n maps and n + 1 domains");
}

}  // namespace

double chain_radius(const FactorChain& fs, int m) {
    check_chain(fs);
    double radius = 0.0;
    const std::size_t n = fs.maps.size();
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> xs = grid(fs.domains[j], 129);
        std::vector<Jet3> J(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) J[i] = identity_jet(xs[i]);
        for (std::size_t k = j; k < n; ++k)
            for (auto& jt : J) {
                jt = compose(fs.maps[k]->jet(jt.f), jt);
                radius = std::max(radius, jet_norm(jt, m));
            }
    }
    return radius;
}

bool CmCheck::holds() const {
    for (std::size_t k = 0; k < bound.size(); ++k)
        if (actual[k] > bound[k]) return false;
    return true;
}

CmCheck cm_composition_error(const FactorChain& fs, const FactorChain& gs, int m, double M) {
    check_chain(fs);
    check_chain(gs);
    if (fs.maps.size() != gs.maps.size()) throw std::invalid_argument("factor chains differ in length");
    if (m < 1 || m > 3) throw std::invalid_argument("cm_composition_error: m must be in 1..3");
    const std::size_t n = fs.maps.size();
    CmCheck r;
    r.measured_radius = chain_radius(fs, m);
    if (r.measured_radius >= M)
        throw HypothesisViolation("partial compositions leave the C^m ball of the declared radius");

    const double c2 = composition_constant(2 * M, m), c3 = composition_constant(3 * M, m);
    r.C_M = std::max({1.0, c2, c2 * c3});
    r.eps_M = M / r.C_M;

    std::vector<double> partial(n);
    for (std::size_t j = 0; j < n; ++j) {
        const MapPtr &f = fs.maps[j], &g = gs.maps[j];
        double d = 0.0;
        for (int o = 0; o <= m; ++o)
            d = std::max(d, sup_norm([&](double x) { return norm_component(jet_diff(f->jet(x), g->jet(x)), o); },
                                     fs.domains[j].lo, fs.domains[j].hi));
        r.sum += d;
        partial[j] = r.sum;
    }
    if (r.sum >= r.eps_M) throw HypothesisViolation("perturbation exceeds the admissible total size");

    // ||F_k - G_k||_{m-1} on two grids, then one Richardson step per k
    std::vector<std::vector<double>> est(2, std::vector<double>(n, 0.0));
    const int sizes[2] = {129, 257};
    for (int s = 0; s < 2; ++s) {
        std::vector<double> xs = grid(fs.domains[0], sizes[s]);
        std::vector<Jet3> F(xs.size()), G(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) F[i] = G[i] = identity_jet(xs[i]);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < xs.size(); ++i) {
                F[i] = compose(fs.maps[k]->jet(F[i].f), F[i]);
                G[i] = compose(gs.maps[k]->jet(G[i].f), G[i]);
                est[s][k] = std::max(est[s][k], jet_norm(jet_diff(F[i], G[i]), m - 1));
            }
    }
    for (std::size_t k = 0; k < n; ++k) {
        double s1 = est[0][k], s2 = est[1][k];
        r.actual.push_back(std::max(s2, s2 + (s2 - s1) / 3.0));
        r.bound.push_back(r.C_M * partial[k]);
    }
    return r;
}

// ---------------------------------------------------------------- Moebius 2-jet

double moebius_length_scale(const JetFn& phi, Interval domain) {
    double inf = std::numeric_limits<double>::infinity();
    const int pts = 1025;
    for (int i = 0; i < pts; ++i) {
        Jet3 j = phi(domain.lo + domain.length() * i / (pts - 1));
        if (j.d2 != 0.0) inf = std::min(inf, std::fabs(j.d1 / j.d2));
    }
    return std::min(1.0, inf);
}

MoebiusFit moebius_2jet(const JetFn& phi, Interval delta, double ell) {
    if (!(delta.length() > 0.0)) throw DomainError("moebius_2jet: empty interval");
    if (ell > 0.0 && delta.length() > ell) throw DomainError("moebius_2jet: interval too long");
    const double x0 = delta.lo;
    Jet3 j = phi(x0);
    if (!(j.d1 > 0.0)) throw DomainError("moebius_2jet: phi must be orientation preserving");
    // T(x) = (a (x - x0) + b)/(c (x - x0) + d), ad - bc = 1
    const double d = 1.0 / std::sqrt(j.d1);
    const double b = j.f * d;
    const double c = -0.5 * j.d2 * d * d * d;
    const double a = (1.0 + b * c) / d;
    auto T = [&](double x) { return (a * (x - x0) + b) / (c * (x - x0) + d); };
    const double t0 = T(delta.lo), t1 = T(delta.hi);
    const double p0 = j.f, p1 = phi(delta.hi).f;
    MoebiusFit fit;
    fit.mu = (p1 - p0) / (t1 - t0);
    // affine correction t -> p0 + mu (t - t0), composed with T in matrix form
    const double A11 = fit.mu, A12 = p0 - fit.mu * t0;
    const double a2 = a, b2 = b - a * x0, c2 = c, d2 = d - c * x0;
    fit.map = moebius(A11 * a2 + A12 * c2, A11 * b2 + A12 * d2, c2, d2);
    return fit;
}

std::array<double, 3> moebius_fit_errors(const JetFn& phi, const MoebiusFit& fit, Interval delta) {
    std::array<double, 3> e{};
    for (int k = 0; k < 3; ++k)
        e[k] = sup_norm(
            [&](double x) { return norm_component(jet_diff(phi(x), fit.map->jet(x)), k); }, delta.lo, delta.hi);
    return e;
}

// ---------------------------------------------------------------- chains of iterates

ChainDistortion chain_cross_ratio(const MapPtr& f, const IntervalPair& p, std::int64_t m) {
    ChainDistortion out;
    double pts[4] = {p.t_lo, p.m_lo, p.m_hi, p.t_hi};
    for (std::int64_t j = 0; j < m; ++j) {
        out.total_length += std::fabs(pts[3] - pts[0]);
        for (double& x : pts) x = f->value(x);
    }
    IntervalPair img{pts[0], pts[1], pts[2], pts[3]};
    if (img.t_lo > img.t_hi) img = {pts[3], pts[2], pts[1], pts[0]};
    out.distortion = cross_ratio(img) / cross_ratio(p);
    return out;
}

double fit_cross_ratio_sigma(const std::vector<ChainDistortion>& chains) {
    double sigma = 0.0;
    for (const auto& c : chains)
        if (c.distortion < 1.0 && c.total_length > 0.0) sigma = std::max(sigma, -std::log(c.distortion) / c.total_length);
    return sigma;
}

}  // namespace renormlab
