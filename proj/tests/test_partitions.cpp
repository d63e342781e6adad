#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "renormlab/partitions.hpp"

using namespace renormlab;

namespace {

ContinuedFraction golden_cf(int n) { return from_quotients(std::vector<std::int64_t>(n, 1)); }

double total_length(const DynamicalPartition& p) {
    double s = 0.0;
    for (auto& a : p.atoms) s += a.length;
    return s;
}

}  // namespace

TEST_CASE("partition of the golden rotation at level 2") {
    const double rho = fixtures::golden_mean();
    DynamicalPartition P = build_partition(rotation_map(rho), golden_cf(4), 2);
    REQUIRE(P.size() == 3);
    CHECK(total_length(P) == doctest::Approx(1.0).epsilon(1e-15));
    // direct construction: vertices 0, rho, 2 rho mod 1 cut the circle at 0, 2rho - 1, rho
    std::vector<double> cuts = {0.0, 2 * rho - 1.0, rho, 1.0};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(P.atoms[i].u_left == doctest::Approx(cuts[i]).epsilon(1e-14));
        CHECK(P.atoms[i].length == doctest::Approx(cuts[i + 1] - cuts[i]).epsilon(1e-14));
    }
}

TEST_CASE("atom counts") {
    const CircleMap& f = fixtures::golden_sine();
    ContinuedFraction cf = golden_cf(14);
    CHECK(build_partition(f, cf, 1).size() == 2);  // a_0 + 1
    CHECK(build_partition(f, cf, 10).size() == 144);
    ContinuedFraction silver = from_quotients(std::vector<std::int64_t>(8, 2));
    CHECK(build_partition(fixtures::silver_sine(), silver, 1).size() == 3);
    CHECK(build_partition(fixtures::silver_sine(), silver, 5).size() == 70 + 29);
    // wrong combinatorics for this map
    CHECK_THROWS_AS(build_partition(f, silver, 5), CombinatorialMismatch);
}

TEST_CASE("mass conservation, labels and refinement") {
    const CircleMap& f = fixtures::golden_sine();
    ContinuedFraction cf = golden_cf(16);
    std::vector<DynamicalPartition> P;
    for (int n = 1; n <= 14; ++n) P.push_back(build_partition(f, cf, n));
    for (auto& p : P) {
        CHECK(std::fabs(total_length(p) - 1.0) < 1e-9);
        std::size_t longs = 0, shorts = 0;
        for (auto& a : p.atoms) {
            CHECK(a.length > 0.0);
            CHECK(a.length < 1.0);
            (a.gen == Generation::long_gen ? longs : shorts)++;
        }
        CHECK(longs == static_cast<std::size_t>(p.q_n));
        CHECK(shorts == static_cast<std::size_t>(p.q_prev));
    }
    for (std::size_t k = 0; k + 2 < P.size(); ++k) CHECK_NOTHROW(parent_map(P[k], P[k + 2]));
    // long atoms split into a_n + 1 pieces, short atoms persist
    for (std::size_t k = 0; k + 1 < P.size(); ++k) {
        auto parent = parent_map(P[k], P[k + 1]);
        std::vector<int> children(P[k].size(), 0);
        for (auto i : parent) children[i]++;
        for (std::size_t i = 0; i < P[k].size(); ++i)
            CHECK(children[i] == (P[k].atoms[i].gen == Generation::long_gen ? 2 : 1));
    }
}

TEST_CASE("refinement counts for a large quotient") {
    const CircleMap& f = fixtures::fifty_sine();
    ContinuedFraction cf = from_quotients({1, 1, 50, 1, 1, 1, 1});
    DynamicalPartition P3 = build_partition(f, cf, 2), P4 = build_partition(f, cf, 3);
    auto parent = parent_map(P3, P4);
    std::vector<int> children(P3.size(), 0);
    for (auto i : parent) children[i]++;
    for (std::size_t i = 0; i < P3.size(); ++i)
        CHECK(children[i] == (P3.atoms[i].gen == Generation::long_gen ? 51 : 1));
}

TEST_CASE("real bounds on the golden rotation follow the three-distance structure") {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    CircleMap R = rotation_map(fixtures::golden_mean());
    ContinuedFraction cf = golden_cf(16);
    for (int n = 2; n <= 12; ++n) {
        DynamicalPartition a = build_partition(R, cf, n - 1), b = build_partition(R, cf, n);
        BoundsReport r = check_real_bounds(R, a, b, true);
        CHECK(r.max_adjacent_ratio <= phi + 1e-9);
        CHECK(r.max_distortion == doctest::Approx(1.0));
        CHECK(r.max_parent_ratio <= 1.0);
    }
}

TEST_CASE("real bounds on the golden sine map") {
    const CircleMap& f = fixtures::golden_sine();
    ContinuedFraction cf = golden_cf(16);
    std::vector<DynamicalPartition> P;
    for (int n = 1; n <= 12; ++n) P.push_back(build_partition(f, cf, n));
    double first = 0.0;
    for (std::size_t k = 2; k < P.size(); ++k) {
        BoundsReport r = check_real_bounds(f, P[k - 1], P[k], true, &P[k - 2]);
        CHECK(r.mass_error < 1e-9);
        CHECK(r.max_parent_ratio <= 1.0);
        REQUIRE(r.max_two_step_ratio.has_value());
        CHECK(*r.max_two_step_ratio < 1.0);
        CHECK(r.min_parent_ratio > 0.0);
        CHECK(r.max_distortion < 50.0);
        if (k == 4) first = r.max_adjacent_ratio;
        if (k > 4) CHECK(r.max_adjacent_ratio < 3.0 * first);
    }
    // an atom compared with itself
    BoundsReport same = check_real_bounds(f, P[4], P[5], true);
    CHECK(same.max_parent_ratio == 1.0);
}

TEST_CASE("s_n sum") {
    // three atoms, two of them excluded: a single term computed by hand
    const double rho = fixtures::golden_mean();
    DynamicalPartition P = build_partition(rotation_map(rho), golden_cf(4), 2);
    const Atom* mid = nullptr;
    for (auto& a : P.atoms)
        if (a.j != 0) mid = &a;
    REQUIRE(mid);
    double dist = std::min(mid->u_left, 1.0 - mid->u_right());
    CHECK(s_n_sum(P) == doctest::Approx((mid->length / dist) * (mid->length / dist)));
    // the remaining atom is [2 rho - 1, rho], at distance 2 rho - 1 from the marked point
    CHECK(dist == doctest::Approx(2 * rho - 1.0));
    CHECK(mid->length == doctest::Approx(1.0 - rho));

    auto sweep = [](const CircleMap& f) {
        ContinuedFraction cf = golden_cf(18);
        double early = 0.0, late = 0.0;
        for (int n = 4; n <= 14; ++n) {
            double s = s_n_sum(build_partition(f, cf, n));
            if (n <= 8) early = std::max(early, s);
            if (n >= 8) late = std::max(late, s);
        }
        CHECK(late <= 2.0 * early);
    };
    sweep(fixtures::golden_sine());
    sweep(rotation_map(rho));
}

TEST_CASE("partition csv") {
    const double rho = fixtures::golden_mean();
    DynamicalPartition P = build_partition(rotation_map(rho), golden_cf(4), 2);
    std::ostringstream out;
    write_partition_csv(out, {P});
    std::string s = out.str();
    CHECK(s.rfind("level,index,generation,j,left,right,length\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
