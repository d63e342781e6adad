#include "renormlab/dd.hpp"

#include <cstdio>
#include <stdexcept>

namespace renormlab {

const DD dd_pi{3.141592653589793116e+00, 1.224646799147353207e-16};
const DD dd_two_pi{6.283185307179586232e+00, 2.449293598294706414e-16};
const DD dd_ln2{6.931471805599452862e-01, 2.319046813846299558e-17};

DD sqrt(const DD& a) {
    if (a.hi <= 0.0) {
        if (a.hi == 0.0) return DD(0.0);
        throw std::domain_error("sqrt of negative double-double");
    }
    double x = 1.0 / std::sqrt(a.hi);
    double ax = a.hi * x;
    DD r = a - dd_detail::two_prod(ax, ax);
    return dd_detail::two_sum(ax, r.hi * (x * 0.5));
}

DD exp(const DD& a) {
    if (a.hi > 709.0) throw std::overflow_error("exp overflow in double-double");
    if (a.hi < -745.0) return DD(0.0);
    double k = std::nearbyint(a.hi / dd_ln2.hi);
    DD r = a - dd_ln2 * k;
    // scale the reduced argument by 2^-10 and square back
    r = r * (1.0 / 1024.0);
    DD term = r;
    DD sum = r;
    for (int i = 2; i < 20; ++i) {
        term = term * r / static_cast<double>(i);
        sum += term;
        if (std::fabs(term.hi) < 1e-34) break;
    }
    // sum = exp(r) - 1; square via (1+s)^2 - 1 = 2s + s^2
    for (int i = 0; i < 10; ++i) sum = sum * 2.0 + sqr(sum);
    DD e = sum + 1.0;
    return {std::ldexp(e.hi, static_cast<int>(k)), std::ldexp(e.lo, static_cast<int>(k))};
}

DD log(const DD& a) {
    if (a.hi <= 0.0) throw std::domain_error("log of non-positive double-double");
    DD x(std::log(a.hi));
    for (int i = 0; i < 2; ++i) x = x + a * exp(-x) - 1.0;
    return x;
}

DD pow(const DD& a, double p) {
    if (p == std::floor(p) && std::fabs(p) <= 64.0) {
        long n = static_cast<long>(std::fabs(p));
        DD base = a;
        DD result(1.0);
        while (n > 0) {
            if (n & 1) result *= base;
            base = sqr(base);
            n >>= 1;
        }
        return p < 0 ? DD(1.0) / result : result;
    }
    if (a.hi == 0.0) return DD(0.0);
    return exp(log(a) * p);
}

namespace {

// sin and cos of t for |t| <= pi/4
void sincos_small(const DD& t, DD& s, DD& c) {
    DD t2 = sqr(t);
    DD term = t;
    s = t;
    for (int i = 1; i < 20; ++i) {
        term = -term * t2 / static_cast<double>((2 * i) * (2 * i + 1));
        s += term;
        if (std::fabs(term.hi) < 1e-34) break;
    }
    term = DD(1.0);
    c = DD(1.0);
    for (int i = 1; i < 20; ++i) {
        term = -term * t2 / static_cast<double>((2 * i - 1) * (2 * i));
        c += term;
        if (std::fabs(term.hi) < 1e-34) break;
    }
}

void sincos2pi(const DD& x, DD& s, DD& c) {
    DD r = x - round(x);
    DD y = r * 4.0;
    double k = std::nearbyint(y.hi);
    DD t = (y - k) * 0.25;
    DD st, ct;
    sincos_small(t * dd_two_pi, st, ct);
    int q = static_cast<int>(k) & 3;
    switch (q) {
        case 0: s = st; c = ct; break;
        case 1: s = ct; c = -st; break;
        case 2: s = -st; c = -ct; break;
        default: s = -ct; c = st; break;
    }
}

}  // namespace

DD sin2pi(const DD& x) {
    DD s, c;
    sincos2pi(x, s, c);
    return s;
}

DD cos2pi(const DD& x) {
    DD s, c;
    sincos2pi(x, s, c);
    return c;
}

std::string to_string(const DD& a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17g", a.hi, a.lo);
    return buf;
}

}  // namespace renormlab
