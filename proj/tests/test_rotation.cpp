#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "renormlab/rotation.hpp"

using namespace renormlab;

namespace {
const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
const double silver = std::sqrt(2.0) - 1.0;

std::vector<std::int64_t> ones(int n, std::int64_t v = 1) { return std::vector<std::int64_t>(n, v); }
}  // namespace

TEST_CASE("continued fraction examples") {
    ContinuedFraction g = continued_fraction(golden, 20);
    CHECK(g.quotients == ones(20));
    CHECK_FALSE(g.terminated);
    CHECK(continued_fraction(silver, 15).quotients == ones(15, 2));
    ContinuedFraction third = continued_fraction(1.0 / 3.0, 10);
    CHECK(third.quotients == std::vector<std::int64_t>{3});
    CHECK(third.terminated);
    ContinuedFraction r = continued_fraction(0.3, 10);  // 3/10 = [3, 3]
    CHECK(r.quotients == std::vector<std::int64_t>{3, 3});
    CHECK_THROWS_AS(continued_fraction(golden, 60), PrecisionExhausted);
    CHECK_THROWS(continued_fraction(1.5, 3));
}

TEST_CASE("return times") {
    CHECK(return_times(continued_fraction(golden, 6), 6) == std::vector<std::int64_t>{1, 1, 2, 3, 5, 8, 13});
    CHECK(return_times(from_quotients(ones(4, 2)), 4) == std::vector<std::int64_t>{1, 2, 5, 12, 29});
    CHECK(return_times(from_quotients({5}), 1) == std::vector<std::int64_t>{1, 5});
    CHECK_THROWS(return_times(from_quotients({5}), 2));
}

TEST_CASE("convergents alternate and approximate") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int64_t> a;
        for (int k = 0; k < 8; ++k) a.push_back(1 + static_cast<std::int64_t>(rng() % 4));
        a.back() += 1;  // keeps [..., a, 1] = [..., a + 1] from merging the tail
        double x = from_quotients(a).value();
        ContinuedFraction cf = continued_fraction(x, 7);
        CHECK(std::equal(cf.quotients.begin(), cf.quotients.end(), a.begin()));
        for (std::size_t n = 1; n + 1 < cf.p.size(); ++n) {
            double qn = static_cast<double>(cf.q[n]), qn1 = static_cast<double>(cf.q[n + 1]);
            CHECK(std::fabs(x - cf.convergent(n)) < 1.0 / (qn * qn1) + 1e-15);
            // odd-indexed convergents lie above x, even-indexed below
            if (n % 2 == 1) CHECK(cf.convergent(n) >= x - 1e-15);
            else CHECK(cf.convergent(n) <= x + 1e-15);
            CHECK(cf.q[n + 1] > cf.q[n]);
        }
        // p_n q_{n-1} - p_{n-1} q_n = (-1)^{n+1}
        for (std::size_t n = 1; n < cf.p.size(); ++n)
            CHECK(cf.p[n] * cf.q[n - 1] - cf.p[n - 1] * cf.q[n] == (n % 2 == 1 ? 1 : -1));
    }
}

TEST_CASE("quotient syntax") {
    RotationTarget t = RotationTarget::parse("1,1,50,1,*");
    CHECK(t.quotient(2) == 50);
    CHECK(t.quotient(9) == 1);
    CHECK(t.bounded_type(20, 50));
    CHECK_FALSE(t.bounded_type(20, 49));
    RotationTarget fin = RotationTarget::parse("3,2,2");
    CHECK_THROWS(fin.quotient(3));
    RotationTarget rule = RotationTarget::parse("rule:doubleexp@3,7");
    CHECK(rule.quotient(0) == 2);
    CHECK(rule.quotient(3) == 16);
    CHECK(rule.quotient(7) == 256);
    CHECK_FALSE(rule.bounded_type(10, 1000));
    CHECK_THROWS(RotationTarget::parse("1,0,2"));
    CHECK_THROWS(RotationTarget::parse("*"));
    CHECK_THROWS(RotationTarget::parse("1,*,2"));
    CHECK_THROWS(RotationTarget::parse("rule:other@1"));
}

TEST_CASE("rotation number of rigid rotations") {
    RotationMeasurement m = rotation_number(rotation_map(golden), 8);
    CHECK(m.cf.quotients == ones(9));
    CHECK(m.average_consistent);
    CHECK(rotation_number(rotation_map(silver), 10).cf.quotients == ones(11, 2));
    CHECK_THROWS_AS(rotation_number(rotation_map(1.0 / 3.0), 4), RationalLock);
    CHECK_THROWS_AS(rotation_number(rotation_map(0.25), 4), RationalLock);
    // displacements alternate in sign and shrink
    for (std::size_t n = 1; n < m.displacements.size(); ++n) {
        CHECK((m.displacements[n] < 0) != (m.displacements[n - 1] < 0));
        CHECK(std::fabs(m.displacements[n]) < std::fabs(m.displacements[n - 1]));
    }
}

TEST_CASE("rational lock in a mode-locked sine map") {
    // Omega = 0 has the fixed point 0: the critical point is periodic
    CHECK_THROWS_AS(rotation_number(critical_sine_map(0.0), 3), RationalLock);
    // inside the 1/2 tongue the orbit is attracted to a period-two cycle and never crosses
    PrecisionPolicy p;
    p.orbit_length_guard = 200000;
    CHECK_THROWS_AS(rotation_number({sine_family(0.5, 1.0), 0.3, true}, 4, p), RationalLock);
}

TEST_CASE("tune_parameter on rigid rotations returns the target") {
    double w = tune_parameter(rotation_family(), RotationTarget::parse("1,*"), 1e-12);
    CHECK(std::fabs(w - golden) < 1e-12);
    w = tune_parameter(rotation_family(), RotationTarget::parse("2,*"), 1e-12);
    CHECK(std::fabs(w - silver) < 1e-12);
}

TEST_CASE("tune_parameter on the sine family") {
    auto t0 = std::chrono::steady_clock::now();
    double w = tune_parameter(sine_family_critical(), RotationTarget::parse("1,*"), 1e-12);
    // frozen from the bisection oracle below
    RotationMeasurement m = rotation_number(critical_sine_map(w), 12);
    CHECK(m.cf.quotients == ones(13));
    CHECK(m.average_consistent);

    double w2 = tune_parameter(sine_family_critical(), RotationTarget::parse("2,*"), 1e-12);
    CHECK(rotation_number(critical_sine_map(w2), 10).cf.quotients == ones(11, 2));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MESSAGE("tuning golden and silver took " << secs << " s, omega = " << w << ", " << w2);

    // independent oracle: plain bisection on the sign of F^q(c) - c - p. The golden parameter lies
    // between the parameters realising consecutive convergents 55/89 and 89/144.
    auto G = [](double om, std::int64_t q, std::int64_t p) {
        MapPtr F = sine_family(om, 1.0);
        double x = 0.0;
        for (std::int64_t k = 0; k < q; ++k) x = F->value(x);
        return x - static_cast<double>(p);
    };
    auto root = [&](std::int64_t q, std::int64_t p) {
        double lo = 0.5, hi = 0.7;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (G(mid, q, p) < 0 ? lo : hi) = mid;
        }
        return lo;
    };
    double r89 = root(89, 55), r144 = root(144, 89);
    CHECK(std::min(r89, r144) < w);
    CHECK(w < std::max(r89, r144));
    CHECK(w == doctest::Approx(0.60666106347011).epsilon(1e-12));
}

TEST_CASE("measured quotients are monotone in the parameter") {
    // lexicographic order with alternating sign: rho increases when the first differing a_n
    // decreases for even n and increases for odd n
    auto key = [](double w) {
        try {
            PrecisionPolicy p;
            p.orbit_length_guard = 20000;
            return rotation_number(critical_sine_map(w), 4, p).cf.quotients;
        } catch (const RationalLock&) {
            return std::vector<std::int64_t>{};
        }
    };
    auto less = [](const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
        for (std::size_t n = 0; n < std::min(a.size(), b.size()); ++n)
            if (a[n] != b[n]) return n % 2 == 0 ? a[n] > b[n] : a[n] < b[n];
        return false;
    };
    std::vector<std::int64_t> prev;
    int inversions = 0;
    for (int i = 1; i < 200; ++i) {
        auto k = key(0.3 + 0.4 * i / 200.0);
        if (k.empty()) continue;
        if (!prev.empty() && less(k, prev)) ++inversions;
        prev = k;
    }
    CHECK(inversions == 0);
}
