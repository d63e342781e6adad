#include <cfloat>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "renormlab/map.hpp"
#include "renormlab/mapio.hpp"

using namespace renormlab;

namespace {

constexpr double pi = std::numbers::pi;

// relative closeness with an absolute floor
bool close(double a, double b, double rel, double abs_floor = 1e-12) {
    return std::fabs(a - b) <= rel * std::max({std::fabs(a), std::fabs(b), abs_floor / rel});
}

// Random orientation-preserving diffeo pieces, all admissible on [0, 1].
MapPtr random_piece(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (rng() % 5) {
        case 0: return affine(0.5 + u(rng), u(rng) - 0.5);
        case 1: {
            // x -> (a x + b)/(c x + d), pole away from [-3, 3]
            double c = 0.2 * u(rng), d = 1.0, a = 1.0 + u(rng), b = 0.3 * u(rng);
            return moebius(a, b, c, d);
        }
        case 2: return sine_family(u(rng), 0.9 * u(rng));
        case 3: return bump(u(rng), 0.1 + 0.3 * u(rng), 0.02 * u(rng));
        default: return power_law(3.0, -2.0 - u(rng), u(rng));
    }
}

}  // namespace

TEST_CASE("jet examples") {
    Jet3 j = eval_jet(identity(), 0.3);
    CHECK(j.f == 0.3);
    CHECK(j.d1 == 1.0);
    CHECK(j.d2 == 0.0);
    CHECK(j.d3 == 0.0);

    j = eval_jet(power_law(3.0), 1.0);
    CHECK(j.f == doctest::Approx(1.0));
    CHECK(j.d1 == doctest::Approx(3.0));
    CHECK(j.d2 == doctest::Approx(6.0));
    CHECK(j.d3 == doctest::Approx(6.0));

    // x + omega - sin(2 pi x)/(2 pi): derivatives 1 - cos, 2 pi sin, 4 pi^2 cos
    j = eval_jet(sine_family(0.0, 1.0), 0.0);
    CHECK(j.f == 0.0);
    CHECK(j.d1 == 0.0);
    CHECK(j.d2 == 0.0);
    CHECK(j.d3 == doctest::Approx(4.0 * pi * pi));
}

TEST_CASE("iterate_jet examples") {
    Jet3 j = iterate_jet(sine_family(0.2, 0.7), 0.4, 0);
    CHECK(j.f == 0.4);
    CHECK(j.d1 == 1.0);

    const double rho = (std::sqrt(5.0) - 1.0) / 2.0;
    j = iterate_jet(rigid_rotation(rho), 0.25, 5);
    CHECK(j.f == doctest::Approx(0.25 + 5.0 * rho).epsilon(1e-15));
    CHECK(j.d1 == 1.0);
    CHECK(j.d2 == 0.0);
    CHECK(j.d3 == 0.0);

    j = iterate_jet(affine(2.0, 0.0), 1.0, 10);
    CHECK(j.f == 1024.0);
    CHECK(j.d1 == 1024.0);

    PrecisionPolicy tight;
    tight.orbit_length_guard = 4;
    CHECK_THROWS_AS(iterate_jet(affine(2.0, 0.0), 1.0, 5, tight), PrecisionExhausted);

    // the forward error estimate grows like 3^n for an expanding map
    CHECK_THROWS_AS(iterate_jet(affine(3.0, 0.0), 1.0, 60), PrecisionExhausted);
}

TEST_CASE("schwarzian examples") {
    CHECK(std::fabs(schwarzian(moebius(2.0, 1.0, 0.5, 0.75), 0.3)) < 1e-12);
    CHECK(schwarzian(power_law(3.0), 1.0) == doctest::Approx(-4.0));
    // canonical chart formula -(p^2 - 1)/(2 (x - c)^2)
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        double x = 0.7, c = 0.2;
        CHECK(schwarzian(power_law(p, c, 0.3), x) == doctest::Approx(-(p * p - 1.0) / (2.0 * (x - c) * (x - c))));
    }
    CHECK_THROWS_AS(schwarzian(power_law(3.0), 0.0), CriticalPointError);
    CHECK_THROWS_AS(schwarzian(sine_family(0.1, 1.0), 0.0), CriticalPointError);
}

TEST_CASE("chain rule and Schwarzian cocycle on random compositions") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
        MapPtr f = random_piece(rng), g = random_piece(rng);
        double x = u(rng);
        Jet3 direct = eval_jet(compose({f, g}), x);
        Jet3 jg = eval_jet(g, x);
        Jet3 chained = compose(eval_jet(f, jg.f), jg);
        CHECK(close(direct.f, chained.f, 1e-10));
        CHECK(close(direct.d1, chained.d1, 1e-10));
        CHECK(close(direct.d2, chained.d2, 1e-10));
        CHECK(close(direct.d3, chained.d3, 1e-10));

        double lhs = schwarzian(compose({f, g}), x);
        double rhs = schwarzian(f, jg.f) * jg.d1 * jg.d1 + schwarzian(g, x);
        CHECK(close(lhs, rhs, 1e-8, 1e-8));
    }
}

TEST_CASE("jet composition is associative") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < 50; ++trial) {
        MapPtr f = random_piece(rng), g = random_piece(rng), h = random_piece(rng);
        double x = u(rng);
        Jet3 a = eval_jet(compose({compose({f, g}), h}), x);
        Jet3 b = eval_jet(compose({f, compose({g, h})}), x);
        CHECK(close(a.d1, b.d1, 1e-12));
        CHECK(close(a.d2, b.d2, 1e-12, 1e-10));
        CHECK(close(a.d3, b.d3, 1e-12, 1e-10));
    }
}

TEST_CASE("lift periodicity") {
    std::mt19937_64 rng(3);
    std::vector<MapPtr> maps = {sine_family(0.3, 1.0), sine_family(0.61, 0.5), bump(0.4, 0.2, 0.05),
                                compose({sine_family(0.1, 0.8), bump(0.9, 0.3, 0.03)}), rigid_rotation(0.37)};
    for (auto& f : maps) {
        for (int k = 0; k < 20; ++k) {
            // dyadic points so that x + 1 is exact
            double x = static_cast<double>(rng() % (1u << 30)) / static_cast<double>(1u << 30);
            Jet3 a = eval_jet(f, x), b = eval_jet(f, x + 1.0);
            // equal up to the rounding of the final addition
            CHECK(std::fabs(b.f - (a.f + 1.0)) <= 2.0 * DBL_EPSILON * std::max(2.0, std::fabs(b.f)));
            CHECK(close(a.d1, b.d1, 1e-14, 1e-14));
            CHECK(close(a.d2, b.d2, 1e-12, 1e-12));
            CHECK(close(a.d3, b.d3, 1e-12, 1e-12));
        }
    }
}

TEST_CASE("finite-difference cross-check on 100 random pairs") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int trial = 0; trial < 100; ++trial) {
        MapPtr f = compose({random_piece(rng), random_piece(rng)});
        double x = u(rng);
        Jet3 j = eval_jet(f, x);
        auto v = [&](double t) { return f->value(t); };
        auto fd = [&](double h) {
            return Jet3{0.0, (v(x + h) - v(x - h)) / (2 * h), (v(x + h) - 2 * v(x) + v(x - h)) / (h * h),
                        (v(x + 2 * h) - 2 * v(x + h) + 2 * v(x - h) - v(x - 2 * h)) / (2 * h * h * h)};
        };
        // central stencils have error C h^2: the error at h/2 is about a third of the change from h to h/2
        const double h = 4e-3;
        Jet3 a = fd(h), b = fd(h / 2);
        auto ok = [](double exact, double coarse, double fine, double noise) {
            return std::fabs(fine - exact) <= std::fabs(coarse - fine) + noise;
        };
        double s = std::max(1.0, std::fabs(j.f));
        CHECK(ok(j.d1, a.d1, b.d1, 1e-9 * s));
        CHECK(ok(j.d2, a.d2, b.d2, 1e-6 * s));
        CHECK(ok(j.d3, a.d3, b.d3, 1e-3 * s));
    }
}

TEST_CASE("bump profile and support") {
    MapPtr b = bump(0.5, 0.2, 0.01);
    CHECK(b->value(0.2) == 0.2);
    CHECK(b->value(0.8) == 0.8);
    CHECK(b->value(0.5) == doctest::Approx(0.51));  // eta(0) = 1
    Jet3 j = eval_jet(b, 0.5);
    CHECK(j.d1 == 1.0);
    // eta''(0) = -2
    CHECK(j.d2 == doctest::Approx(0.01 * -2.0 / 0.04));
    // periodic copy one period away
    CHECK(b->value(1.5) == doctest::Approx(1.51));
}

TEST_CASE("inverse-of") {
    MapPtr f = sine_family(0.3, 0.8);
    MapPtr g = inverse_of(f);
    for (double x : {-0.7, 0.0, 0.13, 0.5, 0.99, 3.4}) {
        CHECK(std::fabs(f->value(g->value(x)) - x) < 1e-14 * std::max(1.0, std::fabs(x)));
        Jet3 jf = eval_jet(f, g->value(x));
        Jet3 jg = eval_jet(g, x);
        Jet3 id = compose(jf, jg);
        CHECK(id.d1 == doctest::Approx(1.0));
        CHECK(std::fabs(id.d2) < 1e-10);
        CHECK(std::fabs(id.d3) < 1e-9);
    }
    MapPtr bracketed = inverse_of(power_law(3.0), 0.0, 2.0);
    CHECK(bracketed->value(8.0) == doctest::Approx(2.0));
    CHECK(bracketed->value(0.125) == doctest::Approx(0.5));
    DD y = bracketed->value(DD(0.125));
    CHECK(std::fabs((y - 0.5).to_double()) < 1e-30);
}

TEST_CASE("windowed node") {
    MapPtr w = windowed(bump(0.5, 0.1, 0.02), 0.4, 0.6);
    CHECK(w->value(0.3) == 0.3);
    CHECK(w->value(0.5) == doctest::Approx(0.52));
    CHECK(w->value(2.5) == doctest::Approx(2.52));
    CHECK(eval_jet(w, 0.7).d1 == 1.0);
}

TEST_CASE("circle iterate keeps accuracy for long orbits") {
    MapPtr F = sine_family(0.6066, 1.0);
    const std::int64_t n = 2000;
    MapPtr plain = iterate(F, n);
    MapPtr reduced = circle_iterate(F, n, 0);
    double x = 0.21;
    double a = plain->value(x), b = reduced->value(x);
    CHECK(std::fabs(a - b) < 1e-9);  // plain loses digits as the lift grows
    CircleOrbit o = circle_orbit(F, x, n, PrecisionPolicy{});
    CHECK(o.offset(n, 0, 0.0) == doctest::Approx(b).epsilon(1e-15));
    MapPtr shifted = circle_iterate(F, n, static_cast<std::int64_t>(std::floor(b)));
    CHECK(shifted->value(x) == doctest::Approx(b - std::floor(b)).epsilon(1e-13));
}

TEST_CASE("double-double against high-precision reference values") {
    auto err = [](const DD& v, double hi, double lo) { return std::fabs(((v - DD(hi)) - DD(lo)).to_double()); };
    // reference values computed once at 200-bit precision, frozen here
    CHECK(err(exp(DD(0.5)), 1.6487212707001282, -4.731568479435833e-17) < 1e-30);
    CHECK(err(exp(DD(-3.7)), 0.024723526470339388, -1.294857794723138e-18) < 1e-32);
    CHECK(err(log(DD(3.0)), 1.0986122886681098, -9.07129723500153e-17) < 1e-30);
    CHECK(err(sqrt(DD(2.0)), 1.4142135623730951, -9.667293313452913e-17) < 1e-30);
    CHECK(err(sin2pi(DD(0.1)), 0.5877852522924731, 2.0282698052150037e-17) < 1e-30);
    CHECK(err(cos2pi(DD(0.3)), -0.30901699437494734, -1.751852518386914e-17) < 1e-30);
    CHECK(err(pow(DD(1.5), 2.5), 2.7556759606310752, 1.3294705582409955e-16) < 1e-29);
}

TEST_CASE("dd evaluation agrees with binary64") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        MapPtr f = compose({random_piece(rng), random_piece(rng), random_piece(rng)});
        double x = u(rng);
        CHECK(close(f->value(DD(x)).to_double(), f->value(x), 1e-13));
    }
}

TEST_CASE("map file round trip is loss-free") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        MapPtr f = compose({random_piece(rng), windowed(random_piece(rng), 0.2, 0.7),
                            inverse_of(random_piece(rng)), circle_iterate(sine_family(0.1, 0.5), 3, 1)});
        CircleMap m{f, 0.1 + 0.01 * trial, trial % 2 == 0};
        std::string text = circle_map_to_json(m).dump();
        CircleMap back = circle_map_from_json(json::parse(text));
        CHECK(back.critical == m.critical);
        CHECK(back.has_critical_point == m.has_critical_point);
        CHECK(circle_map_to_json(back).dump() == text);
        for (double x : {0.1, 0.45, 0.8}) CHECK(back.lift->value(x) == f->value(x));
    }
    CHECK_THROWS(circle_map_from_json(json::parse(R"({"schema":"mapnode/0","map":{"kind":"affine","a":"1","b":"0"}})")));
    CHECK_THROWS(node_from_json(json::parse(R"({"kind":"spline"})")));
    CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("moebius domain errors") {
    CHECK_THROWS_AS(moebius(1.0, 0.0, 1.0, 0.0)->value(0.0), DomainError);
    CHECK_THROWS_AS(moebius(0.0, 1.0, 1.0, 0.0), DomainError);  // det = -1
}
