#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "renormlab/mapio.hpp"
#include "renormlab/surgery.hpp"

using namespace renormlab;

namespace {

ContinuedFraction target_cf() { return from_quotients({1, 1, 32, 2, 2, 2, 2, 2, 2, 2, 2, 2}); }

PrecisionPolicy dd() { return PrecisionPolicy::for_backend(Backend::double_double); }

}  // namespace

TEST_CASE("sigma schedule") {
    CHECK(default_sigma(32) == doctest::Approx(1.0 + std::log2(std::log2(36.0))));
    CHECK(default_sigma(128) > default_sigma(32));
    CHECK(auto_sigma()(3, 32) == default_sigma(32));
    CHECK(fixed_sigma(1.5)(7, 2) == 1.5);
}

TEST_CASE("discrepancy of a map with itself") {
    const CircleMap& f = fixtures::thirtytwo_sine();
    ContinuedFraction cf = target_cf();
    for (int n = 2; n <= 6; ++n) CHECK(discrepancy(f, f, cf, n) == 0.0);
    CHECK_THROWS_AS(discrepancy(f, f, cf, 1), std::invalid_argument);
}

TEST_CASE("one saddle-node surgery") {
    const CircleMap& f = fixtures::thirtytwo_sine();
    ContinuedFraction cf = target_cf();
    const int n = 2;
    SurgeryResult s = surgery(f, cf, n, default_sigma(32), dd());
    const SurgeryPlan& p = s.plan;
    CHECK(p.a == 32);
    CHECK(p.tau > 0.0);
    CHECK(p.tau <= 0.5);
    CHECK(p.left.length() + p.right.length() == doctest::Approx(p.delta1.length()).epsilon(1e-12));

    // Φ is the identity away from the two fundamental domains
    for (double x : {p.delta1.lo - 1e-3, p.delta1.hi + 1e-3, p.delta_a.lo - 1e-3, p.delta_a.hi + 1e-3, 0.93})
        CHECK(s.phi->value(x) == x);
    CHECK(s.phi->value(p.delta1.lo + 1.0) == p.delta1.lo + 1.0);

    SurgeryCheck k = verify_surgery(f, s, cf, 8, dd());
    CHECK(k.orbit_error <= 1e-12);
    CHECK(k.renorm_distance < 1e-9);
    CHECK(k.discrepancy > 0.0);
    REQUIRE(k.deeper.size() >= 4);
    for (double d : k.deeper) CHECK(d <= 1e-12);
    CHECK(k.discrepancy > 1e3 * *std::max_element(k.deeper.begin(), k.deeper.end()));
    CHECK(k.undo_error <= 1e-12);
    CHECK(k.split_ok);
    CHECK(k.quotients_conserved);
    for (double b : k.norms) CHECK(std::isfinite(b));
    CHECK(k.norms[0] > 0.0);

    const double J2s = std::pow(p.J, 2 * p.sigma);
    MESSAGE("discrepancy ", k.discrepancy, " |J|^(2 sigma) ", J2s, " d0 ", k.renorm_distance);
}

TEST_CASE("surgery refuses oversized bumps") {
    const CircleMap& f = fixtures::thirtytwo_sine();
    CHECK_THROWS_AS(surgery(f, target_cf(), 2, 0.05), HypothesisViolation);
    CHECK_THROWS_AS(surgery(f, target_cf(), 2, -1.0), std::invalid_argument);
}

TEST_CASE("two-stage counterexample") {
    const CircleMap& f = fixtures::thirtytwo_sine();
    ContinuedFraction cf = target_cf();
    Counterexample one = build_counterexample(f, cf, {2}, auto_sigma(), dd());
    SurgeryResult direct = surgery(f, cf, 2, default_sigma(32), dd());
    for (double x : {0.1, 0.37, direct.plan.z - 0.5, direct.plan.z})
        CHECK(one.map.lift->value(x) == direct.map.lift->value(x));

    Counterexample two = build_counterexample(f, cf, {2, 4}, fixed_sigma(1.5), dd());
    REQUIRE(two.stages.size() == 2);
    CHECK(discrepancy(f, two.map, cf, 2, dd()) > 1e-9);
    CHECK(discrepancy(f, two.map, cf, 3, dd()) <= 1e-12);
    CHECK(discrepancy(f, two.map, cf, 4, dd()) > 1e-9);
    for (int m = 5; m <= 7; ++m) CHECK(discrepancy(f, two.map, cf, m, dd()) <= 1e-12);
    CHECK_THROWS_AS(build_counterexample(f, cf, {4, 2}, auto_sigma()), std::invalid_argument);

    std::vector<SurgeryCheck> checks;
    for (const auto& s : one.stages) checks.push_back(verify_surgery(f, s, cf, 6, dd()));
    auto doc = json::parse(surgery_bundle_json(one, checks));
    CHECK(doc["schema"] == "surgery/1");
    CHECK(doc["plans"].size() == 1);
    CHECK(doc["plans"][0]["level"] == 2);
    CHECK(doc["verification"][0]["quotients_conserved"] == true);
    CircleMap back = circle_map_from_json(doc["map"]);
    CHECK(back.lift->value(0.3) == doctest::Approx(one.map.lift->value(0.3)).epsilon(1e-14));
}
