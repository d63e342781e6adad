#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "renormlab/finegrid.hpp"

using namespace renormlab;

namespace {

std::vector<DynamicalPartition> partitions(const CircleMap& f, const ContinuedFraction& cf, int depth) {
    std::vector<DynamicalPartition> P;
    for (int n = 1; n <= depth; ++n) P.push_back(build_partition(f, cf, n));
    return P;
}

ContinuedFraction fifty_cf() { return from_quotients({1, 1, 50, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}); }

const FineGrid& fifty_grid() {
    static const FineGrid g = build_fine_grid(partitions(fixtures::fifty_sine(), fifty_cf(), 14), 30);
    return g;
}

void check_structure(const FineGrid& g) {
    for (std::size_t n = 0; n + 1 < g.levels.size(); ++n)
        for (std::size_t c : g.child_counts(n)) {
            CHECK(c >= 2);
            CHECK(c <= 3);
        }
    for (const auto& Q : g.levels) {
        double total = 0.0;
        for (std::size_t k = 0; k < Q.size(); ++k) {
            total += Q[k].length();
            CHECK(Q[k].right_index == Q[(k + 1) % Q.size()].left_index);
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

}  // namespace

TEST_CASE("fine grid of a rotation of bounded type") {
    ContinuedFraction cf = from_quotients(std::vector<std::int64_t>(14, 1));
    CircleMap r = rotation_map(fixtures::golden_mean());
    FineGrid g = build_fine_grid(partitions(r, cf, 10), 1000);
    REQUIRE(g.levels.size() >= 5);
    CHECK(g.saddle_nodes.empty());
    for (const auto& Q : g.levels)
        for (const auto& a : Q) CHECK((a.type == AtomType::b1 || a.type == AtomType::b4));
    check_structure(g);
    FineConstants fc = fine_constants(g);
    CHECK(fc.strict_refinement);
    CHECK(fc.sandwich);
    CHECK(fc.a <= 3);
    CHECK(fc.lambda0 < 1.0);
    CHECK(fc.lambda0 <= fc.lambda1);
}

TEST_CASE("fine grid through a saddle-node level") {
    const FineGrid& g = fifty_grid();
    REQUIRE(g.levels.size() >= 6);
    REQUIRE(g.saddle_nodes.size() >= 1);
    check_structure(g);

    std::set<AtomType> seen;
    for (const auto& Q : g.levels)
        for (const auto& a : Q) seen.insert(a.type);
    CHECK(seen.count(AtomType::b2));
    CHECK(seen.count(AtomType::b3));

    // nested central intervals; lateral intervals and the next central interval tile each one
    for (const auto& d : g.saddle_nodes) {
        CHECK(d.children >= 30);
        CHECK(d.N == 3);
        for (int i = 0; i + 1 <= d.N; ++i) {
            auto [lo, hi] = d.central[i];
            auto [nlo, nhi] = d.central[i + 1];
            CHECK(nlo - lo == (std::size_t{1} << i));
            CHECK(hi - nhi == (std::size_t{1} << i));
            const auto& P = g.partition(d.level + 1);
            double M = P.atoms[hi].u_right() - P.atoms[lo].u_left;
            CHECK(d.left[i] + d.middle[i] + d.right[i] == doctest::Approx(M).epsilon(1e-12));
        }
        CHECK(std::isfinite(d.comparability));
    }
    // central intervals appear with increasing index along the parent chain
    for (std::size_t n = 1; n < g.levels.size(); ++n)
        for (const auto& a : g.levels[n]) {
            const GridAtom& p = g.levels[n - 1][a.parent];
            if (a.type == AtomType::b2 && p.type == AtomType::b2) CHECK(a.central == p.central + 1);
            CHECK(a.u_lo >= p.u_lo - 1e-15);
            CHECK(a.u_hi <= p.u_hi + 1e-15);
        }

    FineConstants fc = fine_constants(g);
    CHECK(fc.a == 3);
    CHECK(fc.strict_refinement);
    CHECK(fc.sandwich);
    CHECK(fc.lower_margin >= 1.0);
    CHECK(fc.upper_margin >= 1.0);
    CHECK(std::isfinite(fc.c));
}

TEST_CASE("fine grid depth and thresholds") {
    auto P = partitions(fixtures::fifty_sine(), fifty_cf(), 5);
    CHECK_THROWS_AS(build_fine_grid(P, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_fine_grid(P, 30, 40), PrecisionExhausted);
    FineGrid g = build_fine_grid(P, 1000);
    CHECK(g.saddle_nodes.empty());
    P.erase(P.begin() + 1);
    CHECK_THROWS_AS(build_fine_grid(P, 30), std::invalid_argument);
}

TEST_CASE("grid conjugacy") {
    const CircleMap& f = fixtures::fifty_sine();
    GridConjugacy id = grid_conjugacy(f, f, 14);
    CHECK(id.order_preserving);
    SmoothnessReport same = smoothness_report(id, fifty_grid(), fifty_grid());
    for (double d : same.deviations) CHECK(d == 0.0);
    CHECK(same.classification == "zero");

    // a conjugate by an explicit diffeomorphism: the vertex map is that diffeomorphism
    MapPtr h0 = sine_family(0.0, -0.3);
    CircleMap g = conjugate(f, h0);
    GridConjugacy h = grid_conjugacy(f, g, 14);
    const double hc = h0->value(f.critical);
    for (std::size_t j = 0; j < h.f_points.size(); j += 17) {
        double v = h0->value(f.critical + h.f_points[j]) - hc;
        CHECK(std::fabs(v - std::floor(v) - h.g_points[j]) < 1e-9);
    }

    CHECK_THROWS_AS(grid_conjugacy(fixtures::golden_sine(), fixtures::silver_sine(), 6), CombinatorialMismatch);

    // a rigid rotation with the same rotation number
    GridConjugacy rot = grid_conjugacy(fixtures::golden_sine(), rotation_map(fixtures::golden_mean()), 12);
    CHECK(rot.order_preserving);
}

TEST_CASE("smoothness of a smooth conjugacy") {
    const CircleMap& f = fixtures::golden_sine();
    CircleMap g = conjugate(f, sine_family(0.0, -0.3));
    ContinuedFraction cf = from_quotients(std::vector<std::int64_t>(20, 1));
    const int depth = 16;
    FineGrid gf = build_fine_grid(partitions(f, cf, depth), 30);
    FineGrid gg = build_fine_grid(partitions(g, cf, depth), 30);
    SmoothnessReport r = smoothness_report(grid_conjugacy(f, g, depth), gf, gg);
    CHECK(r.deviations.size() == gf.levels.size());
    for (double d : r.deviations) CHECK(d >= 0.0);
    CHECK(r.classification == "exponential");
    REQUIRE(r.alpha);
    CHECK(*r.alpha > 0.0);
    CHECK(*r.r2 >= 0.9);

    std::string doc = smoothness_to_json(r);
    CHECK(doc.find("\"smoothness/1\"") != std::string::npos);
    std::ostringstream csv;
    write_grid_csv(csv, gf);
    CHECK(csv.str().rfind("level,index,type,m,left,right\n1,0,b1,1,", 0) == 0);
}
