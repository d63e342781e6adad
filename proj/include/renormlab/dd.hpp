#pragma once

#include <cmath>
#include <string>

namespace renormlab {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
    double to_double() const { return hi + lo; }
};

namespace dd_detail {

inline DD quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

}  // namespace dd_detail

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }

inline DD operator+(const DD& a, const DD& b) {
    DD s = dd_detail::two_sum(a.hi, b.hi);
    DD t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DD operator+(const DD& a, double b) {
    DD s = dd_detail::two_sum(a.hi, b);
    s.lo += a.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DD operator+(double a, const DD& b) { return b + a; }
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }
inline DD operator-(const DD& a, double b) { return a + (-b); }
inline DD operator-(double a, const DD& b) { return (-b) + a; }

inline DD operator*(const DD& a, const DD& b) {
    DD p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DD operator*(const DD& a, double b) {
    DD p = dd_detail::two_prod(a.hi, b);
    p.lo += a.lo * b;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DD operator*(double a, const DD& b) { return b * a; }

inline DD operator/(const DD& a, const DD& b) {
    double q1 = a.hi / b.hi;
    DD r = a - b * q1;
    double q2 = r.hi / b.hi;
    r = r - b * q2;
    double q3 = r.hi / b.hi;
    DD q = dd_detail::quick_two_sum(q1, q2);
    return q + q3;
}

inline DD operator/(const DD& a, double b) { return a / DD(b); }
inline DD operator/(double a, const DD& b) { return DD(a) / b; }

inline DD& operator+=(DD& a, const DD& b) { return a = a + b; }
inline DD& operator-=(DD& a, const DD& b) { return a = a - b; }
inline DD& operator*=(DD& a, const DD& b) { return a = a * b; }
inline DD& operator/=(DD& a, const DD& b) { return a = a / b; }

inline bool operator<(const DD& a, const DD& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(const DD& a, const DD& b) { return b < a; }
inline bool operator<=(const DD& a, const DD& b) { return !(b < a); }
inline bool operator>=(const DD& a, const DD& b) { return !(a < b); }
inline bool operator==(const DD& a, const DD& b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(const DD& a, const DD& b) { return !(a == b); }

inline DD abs(const DD& a) { return a.hi < 0.0 ? -a : a; }

inline DD floor(const DD& a) {
    double h = std::floor(a.hi);
    if (h == a.hi) return dd_detail::quick_two_sum(h, std::floor(a.lo));
    return {h, 0.0};
}

inline DD round(const DD& a) { return floor(a + 0.5); }

inline DD sqr(const DD& a) { return a * a; }

DD sqrt(const DD& a);
DD exp(const DD& a);
DD log(const DD& a);
DD pow(const DD& a, double p);
// sin and cos of 2*pi*x; the argument is reduced exactly mod 1 first.
DD sin2pi(const DD& x);
DD cos2pi(const DD& x);

extern const DD dd_pi;
extern const DD dd_two_pi;
extern const DD dd_ln2;

std::string to_string(const DD& a);

inline double to_double(double x) { return x; }
inline double to_double(const DD& x) { return x.hi + x.lo; }

}  // namespace renormlab
