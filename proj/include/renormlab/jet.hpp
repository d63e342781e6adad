#pragma once

namespace renormlab {

// Value and first three derivatives at a point.
struct Jet3 {
    double f = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

inline Jet3 identity_jet(double x) { return {x, 1.0, 0.0, 0.0}; }

// Jet of outer∘inner, where `outer` is evaluated at inner.f.
inline Jet3 compose(const Jet3& outer, const Jet3& inner) {
    const double g1 = inner.d1, g2 = inner.d2, g3 = inner.d3;
    return {outer.f,
            outer.d1 * g1,
            outer.d2 * g1 * g1 + outer.d1 * g2,
            outer.d3 * g1 * g1 * g1 + 3.0 * outer.d2 * g1 * g2 + outer.d1 * g3};
}

// Jet of the local inverse at y = j.f, given the jet of the map at x.
inline Jet3 invert(const Jet3& j) {
    const double a = j.d1, b = j.d2, c = j.d3;
    return {0.0, 1.0 / a, -b / (a * a * a), (3.0 * b * b - a * c) / (a * a * a * a * a)};
}

double schwarzian(const Jet3& j);

}  // namespace renormlab
