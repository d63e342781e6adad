#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "renormlab/dd.hpp"
#include "renormlab/errors.hpp"
#include "renormlab/jet.hpp"

namespace renormlab {

enum class Kind {
    affine,
    moebius,
    power_law,
    sine_family,
    bump,
    inverse_of,
    composition,
    iterate,
    windowed,
};

std::string kind_name(Kind k);
Kind kind_from_name(const std::string& s);

class Node;
using MapPtr = std::shared_ptr<const Node>;

class Node {
public:
    virtual ~Node() = default;
    virtual Kind kind() const = 0;
    virtual Jet3 jet(double x) const = 0;
    virtual double value(double x) const { return jet(x).f; }
    virtual DD value(const DD& x) const = 0;
};

// x -> a*x + b
struct AffineNode final : Node {
    double a, b;
    AffineNode(double a_, double b_) : a(a_), b(b_) {}
    Kind kind() const override { return Kind::affine; }
    Jet3 jet(double x) const override { return {a * x + b, a, 0.0, 0.0}; }
    double value(double x) const override { return a * x + b; }
    DD value(const DD& x) const override { return x * a + b; }
};

// x -> (a*x + b)/(c*x + d), ad - bc = 1
struct MoebiusNode final : Node {
    double a, b, c, d;
    MoebiusNode(double a_, double b_, double c_, double d_);
    Kind kind() const override { return Kind::moebius; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;
};

// x -> (x - c)|x - c|^(p-1) + a
struct PowerLawNode final : Node {
    double p, c, a;
    PowerLawNode(double p_, double c_, double a_);
    Kind kind() const override { return Kind::power_law; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;
};

// x -> x + omega - (K / 2pi) sin(2 pi x)
struct SineFamilyNode final : Node {
    double omega, K;
    SineFamilyNode(double o, double k) : omega(o), K(k) {}
    Kind kind() const override { return Kind::sine_family; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;
};

// x -> x + amplitude * eta((x - center)/radius), eta(t) = exp(1 - 1/(1 - t^2)) on |t| < 1.
// The profile is repeated with period one so the node is a lift of a circle map.
struct BumpNode final : Node {
    double center, radius, amplitude;
    BumpNode(double center_, double radius_, double amplitude_);
    Kind kind() const override { return Kind::bump; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;
};

// Inverse of a monotone node. When lo < hi is given the preimage is searched there.
struct InverseNode final : Node {
    MapPtr inner;
    double lo, hi;
    InverseNode(MapPtr f, double lo_, double hi_);
    bool has_bracket() const { return lo < hi; }
    Kind kind() const override { return Kind::inverse_of; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;
};

// parts[0] ∘ parts[1] ∘ ... ∘ parts[n-1]; the last part is applied first.
struct CompositionNode final : Node {
    std::vector<MapPtr> parts;
    explicit CompositionNode(std::vector<MapPtr> p);
    Kind kind() const override { return Kind::composition; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;
};

// F^count(x) - translate. With `reduce` set, F is taken to be a circle lift and the orbit is kept
// in [0,1) with the winding counted separately, so the result stays accurate for long orbits.
struct IterateNode final : Node {
    MapPtr inner;
    std::int64_t count;
    std::int64_t translate = 0;
    bool reduce = false;
    IterateNode(MapPtr f, std::int64_t n, std::int64_t translate_ = 0, bool reduce_ = false);
    Kind kind() const override { return Kind::iterate; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;
};

// Acts as `inner` on the open arc (left, right) of the circle and as the identity elsewhere.
struct WindowedNode final : Node {
    MapPtr inner;
    double left, right;
    WindowedNode(MapPtr f, double l, double r);
    Kind kind() const override { return Kind::windowed; }
    Jet3 jet(double x) const override;
    double value(double x) const override;
    DD value(const DD& x) const override;

private:
    template <class T>
    bool shift_into(const T& x, T& y, double& shift) const;
};

MapPtr identity();
MapPtr affine(double a, double b);
MapPtr moebius(double a, double b, double c, double d);
MapPtr power_law(double p, double c = 0.0, double a = 0.0);
MapPtr sine_family(double omega, double K = 1.0);
MapPtr rigid_rotation(double rho);
MapPtr bump(double center, double radius, double amplitude);
MapPtr inverse_of(MapPtr f, double lo = 0.0, double hi = 0.0);
MapPtr compose(std::vector<MapPtr> parts);
MapPtr iterate(MapPtr f, std::int64_t n);
// F^n(x) - p for a circle lift F, evaluated with winding bookkeeping.
MapPtr circle_iterate(MapPtr F, std::int64_t n, std::int64_t p);
MapPtr windowed(MapPtr f, double left, double right);

// A circle map given by a lift of degree one together with its critical (or marked) point.
struct CircleMap {
    MapPtr lift;
    double critical = 0.0;
    bool has_critical_point = true;
};

CircleMap critical_sine_map(double omega);
CircleMap rotation_map(double rho);
// h ∘ f ∘ h^{-1}, with critical point h(c).
CircleMap conjugate(const CircleMap& f, MapPtr h);

enum class Backend { binary64, double_double };

struct PrecisionPolicy {
    Backend backend = Backend::binary64;
    std::int64_t orbit_length_guard = 20'000'000;
    double min_interval_guard = 1e-13;
    double jet_error_tolerance = 1e-6;

    static PrecisionPolicy for_backend(Backend b);
};

Backend parse_backend(const std::string& s);
std::string backend_name(Backend b);
// Policy from the RENORMLAB_PRECISION environment variable if set, otherwise `fallback`.
PrecisionPolicy policy_from_env(Backend fallback = Backend::binary64);

Jet3 eval_jet(const MapPtr& f, double x);
// Jet of the n-th iterate by repeated chain rule, with a running forward error estimate.
Jet3 iterate_jet(const MapPtr& f, double x, std::int64_t n, const PrecisionPolicy& policy = {});
double schwarzian(const MapPtr& f, double x);

inline double reduce_mod1(double x) { return x - std::floor(x); }

// Orbit z_0 = x0, z_k = f(z_{k-1}) for k <= n of a map of the line (no reduction).
std::vector<double> orbit(const MapPtr& f, double x0, std::int64_t n, const PrecisionPolicy& policy);
std::vector<DD> orbit_dd(const MapPtr& f, const DD& x0, std::int64_t n);

// Orbit of a circle lift stored as winding + fractional part, z_k = wind[k] + frac[k].
struct CircleOrbit {
    std::vector<std::int64_t> wind;
    std::vector<DD> frac;

    std::int64_t size() const { return static_cast<std::int64_t>(wind.size()); }
    // z_k - p - ref, accurate even when z_k is large
    DD offset_dd(std::int64_t k, std::int64_t p, const DD& ref) const {
        return DD(static_cast<double>(wind[k] - p)) + frac[k] - ref;
    }
    double offset(std::int64_t k, std::int64_t p, double ref) const { return offset_dd(k, p, DD(ref)).to_double(); }
    // representative of z_k in [ref, ref + 1)
    double near(std::int64_t k, double ref) const {
        double d = offset(k, 0, ref);
        return ref + (d - std::floor(d));
    }
    void extend(const MapPtr& F, std::int64_t n, Backend backend);
};

CircleOrbit circle_orbit(const MapPtr& F, double x0, std::int64_t n, const PrecisionPolicy& policy);

}  // namespace renormlab
