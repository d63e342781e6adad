#include "renormlab/finegrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "renormlab/mapio.hpp"
#include "renormlab/numerics.hpp"

namespace renormlab {

std::string type_name(AtomType t) {
    switch (t) {
        case AtomType::b1: return "b1";
        case AtomType::b2: return "b2";
        case AtomType::b3: return "b3";
        case AtomType::b4: return "b4";
    }
    return "?";
}

namespace {

struct DepthExhausted : Error {
    using Error::Error;
};

std::vector<std::pair<std::size_t, std::size_t>> child_ranges(const DynamicalPartition& coarse,
                                                              const DynamicalPartition& fine) {
    auto parent = parent_map(coarse, fine);
    std::vector<std::pair<std::size_t, std::size_t>> r(coarse.size(), {0, 0});
    for (std::size_t i = 0; i < fine.size(); ++i) {
        auto& [b, e] = r[parent[i]];
        if (b == e) b = i;
        e = i + 1;
    }
    for (auto& [b, e] : r)
        if (b == e) throw CombinatorialMismatch("partition atom without children");
    return r;
}

SaddleNodeDecomposition decompose(const FineGrid& g, int m, std::size_t i) {
    SaddleNodeDecomposition d;
    d.level = m;
    d.atom = i;
    auto [b, e] = g.children[m - g.first_level()][i];
    const std::size_t a = e - b;
    d.children = a;
    // largest N with 2^{N+1} < a/2; at least one central interval below M_0 is always kept
    int N = 0;
    while (std::ldexp(1.0, N + 2) < 0.5 * static_cast<double>(a)) ++N;
    d.N = std::max(N, 1);
    for (int k = 0; k <= d.N; ++k) {
        std::size_t s = (std::size_t{1} << k) - 1;
        d.central.push_back({b + s, e - 1 - s});
    }
    const DynamicalPartition& P = g.partition(m + 1);
    auto span = [&](std::size_t lo, std::size_t hi) { return P.atoms[hi].u_right() - P.atoms[lo].u_left; };
    for (int k = 0; k < d.N; ++k) {
        auto [lo, hi] = d.central[k];
        auto [nlo, nhi] = d.central[k + 1];
        double l = span(lo, nlo - 1), mid = span(nlo, nhi), r = span(nhi + 1, hi);
        d.left.push_back(l), d.middle.push_back(mid), d.right.push_back(r);
        double mx = std::max({l, mid, r}), mn = std::min({l, mid, r});
        d.comparability = std::max(d.comparability, mx / mn);
    }
    return d;
}

class Builder {
public:
    explicit Builder(FineGrid& g) : g_(g) {}

    GridAtom make(AtomType t, int m, int unit, std::size_t first, std::size_t last) const {
        if (unit - g_.first_level() >= static_cast<int>(g_.partitions.size()))
            throw DepthExhausted("fine grid needs a deeper partition");
        const DynamicalPartition& P = g_.partition(unit);
        GridAtom a;
        a.type = t;
        a.m = m;
        a.unit_level = unit;
        a.first = first;
        a.last = last;
        a.u_lo = P.atoms[first].u_left;
        a.u_hi = P.atoms[last].u_right();
        a.left_index = P.atoms[first].left_index;
        a.right_index = P.atoms[last].right_index;
        return a;
    }

    std::pair<std::size_t, std::size_t> kids(int m, std::size_t i) const {
        if (m + 1 - g_.first_level() >= static_cast<int>(g_.partitions.size()))
            throw DepthExhausted("fine grid needs a deeper partition");
        return g_.children[m - g_.first_level()][i];
    }

    GridAtom central(int m, std::size_t host, int k) const {
        auto [lo, hi] = g_.decomposition(m, host).central[k];
        GridAtom c = make(AtomType::b2, m, m + 1, lo, hi);
        c.host = host;
        c.central = k;
        return c;
    }

    // L_0, M_1, R_0 of a saddle-node atom, or the single atom itself
    void top(int m, std::size_t i, std::vector<GridAtom>& out) const {
        if (g_.is_saddle_node(m, i))
            split_saddle_node(m, i, out);
        else
            out.push_back(make(AtomType::b1, m, m, i, i));
    }

    void split_saddle_node(int m, std::size_t i, std::vector<GridAtom>& out) const {
        const auto& d = g_.decomposition(m, i);
        auto [lo, hi] = d.central[0];
        auto [mlo, mhi] = d.central[1];
        push_units(AtomType::b3, m, lo, mlo - 1, out);
        out.push_back(central(m, i, 1));
        push_units(AtomType::b3, m, mhi + 1, hi, out);
    }

    // a union of units of P_{m+1} (b3) or P_m (b4); a single unit becomes a b1 atom of its level
    void push_units(AtomType t, int m, std::size_t first, std::size_t last, std::vector<GridAtom>& out) const {
        int unit = t == AtomType::b3 ? m + 1 : m;
        if (first == last)
            out.push_back(make(AtomType::b1, unit, unit, first, first));
        else
            out.push_back(make(t, m, unit, first, last));
    }

    void thirds(AtomType t, int m, std::size_t first, std::size_t last, std::vector<GridAtom>& out) const {
        const std::size_t p = last - first + 1, q = p / 3, r = p % 3;
        std::size_t l = r < 2 ? q : q + 1;
        push_units(t, m, first, first + l - 1, out);
        if (p - 2 * l > 0) push_units(t, m, first + l, last - l, out);
        push_units(t, m, last - l + 1, last, out);
    }

    void refine(const GridAtom& a, std::vector<GridAtom>& out) const {
        switch (a.type) {
            case AtomType::b1: {
                int m = a.m;
                std::size_t i = a.first;
                for (;;) {
                    auto [b, e] = kids(m, i);
                    if (g_.is_saddle_node(m, i)) {
                        split_saddle_node(m, i, out);
                        return;
                    }
                    if (e - b == 1) {
                        // the atom persists unchanged into P_{m+1}
                        ++m, i = b;
                        continue;
                    }
                    out.push_back(make(AtomType::b1, m + 1, m + 1, b, b));
                    if (e - b > 2) {
                        if (e - b == 3)
                            out.push_back(make(AtomType::b1, m + 1, m + 1, b + 1, b + 1));
                        else
                            out.push_back(make(AtomType::b4, m + 1, m + 1, b + 1, e - 2));
                    }
                    out.push_back(make(AtomType::b1, m + 1, m + 1, e - 1, e - 1));
                    return;
                }
            }
            case AtomType::b2: {
                const auto& d = g_.decomposition(a.m, a.host);
                if (a.central < d.N) {
                    auto [lo, hi] = d.central[a.central];
                    auto [nlo, nhi] = d.central[a.central + 1];
                    push_units(AtomType::b3, a.m, lo, nlo - 1, out);
                    out.push_back(central(a.m, a.host, a.central + 1));
                    push_units(AtomType::b3, a.m, nhi + 1, hi, out);
                } else {
                    thirds(AtomType::b3, a.m, a.first, a.last, out);
                }
                return;
            }
            case AtomType::b3:
            case AtomType::b4:
                thirds(a.type, a.m, a.first, a.last, out);
                return;
        }
    }

private:
    FineGrid& g_;
};

}  // namespace

bool FineGrid::is_saddle_node(int m, std::size_t i) const {
    std::size_t k = static_cast<std::size_t>(m - first_level());
    if (k >= children.size()) return false;
    auto [b, e] = children[k][i];
    return e - b >= static_cast<std::size_t>(sn_threshold);
}

const SaddleNodeDecomposition& FineGrid::decomposition(int m, std::size_t i) const {
    for (const auto& d : saddle_nodes)
        if (d.level == m && d.atom == i) return d;
    throw std::logic_error("decomposition: not a saddle-node atom");
}

std::vector<std::size_t> FineGrid::child_counts(std::size_t n) const {
    if (n + 1 >= levels.size()) throw std::out_of_range("child_counts: no finer level");
    std::vector<std::size_t> c(levels[n].size(), 0);
    for (const auto& a : levels[n + 1]) ++c.at(a.parent);
    return c;
}

FineGrid build_fine_grid(std::vector<DynamicalPartition> partitions, int sn_threshold, int levels) {
    if (sn_threshold < 4) throw std::invalid_argument("build_fine_grid: saddle-node threshold must be at least 4");
    if (partitions.size() < 2) throw std::invalid_argument("build_fine_grid: needs at least two partitions");
    for (std::size_t k = 1; k < partitions.size(); ++k)
        if (partitions[k].level != partitions[k - 1].level + 1)
            throw std::invalid_argument("build_fine_grid: partitions must have consecutive levels");
    FineGrid g;
    g.sn_threshold = sn_threshold;
    g.partitions = std::move(partitions);
    for (std::size_t k = 0; k + 1 < g.partitions.size(); ++k)
        g.children.push_back(child_ranges(g.partitions[k], g.partitions[k + 1]));
    for (std::size_t k = 0; k < g.children.size(); ++k)
        for (std::size_t i = 0; i < g.children[k].size(); ++i) {
            int m = g.first_level() + static_cast<int>(k);
            if (g.is_saddle_node(m, i)) g.saddle_nodes.push_back(decompose(g, m, i));
        }

    Builder b(g);
    std::vector<GridAtom> q;
    const int m0 = g.first_level();
    try {
        for (std::size_t i = 0; i < g.partitions.front().size(); ++i) b.top(m0, i, q);
    } catch (const DepthExhausted&) {
        throw PrecisionExhausted("build_fine_grid: partition depth insufficient for the first grid level");
    }
    g.levels.push_back(std::move(q));
    while (levels == 0 || static_cast<int>(g.levels.size()) < levels) {
        std::vector<GridAtom> next;
        try {
            const auto& cur = g.levels.back();
            for (std::size_t k = 0; k < cur.size(); ++k) {
                std::size_t before = next.size();
                b.refine(cur[k], next);
                for (std::size_t j = before; j < next.size(); ++j) next[j].parent = k;
            }
        } catch (const DepthExhausted&) {
            if (levels != 0)
                throw PrecisionExhausted("build_fine_grid: partition depth insufficient for " +
                                         std::to_string(levels) + " grid levels");
            break;
        }
        g.levels.push_back(std::move(next));
    }
    return g;
}

FineConstants fine_constants(const FineGrid& grid) {
    if (grid.levels.size() < 3) throw std::invalid_argument("fine_constants: needs at least three grid levels");
    FineConstants fc;
    fc.strict_refinement = true;
    for (std::size_t n = 0; n + 1 < grid.levels.size(); ++n) {
        auto counts = grid.child_counts(n);
        for (std::size_t k = 0; k < counts.size(); ++k) {
            fc.a = std::max(fc.a, counts[k]);
            if (counts[k] < 2) fc.strict_refinement = false;
        }
        // children tile their parent in order
        const auto& next = grid.levels[n + 1];
        for (std::size_t j = 0; j < next.size(); ++j) {
            const GridAtom& p = grid.levels[n][next[j].parent];
            bool first = j == 0 || next[j - 1].parent != next[j].parent;
            bool last = j + 1 == next.size() || next[j + 1].parent != next[j].parent;
            if (first && next[j].left_index != p.left_index) fc.strict_refinement = false;
            if (last && next[j].right_index != p.right_index) fc.strict_refinement = false;
            if (!first && next[j - 1].right_index != next[j].left_index) fc.strict_refinement = false;
        }
    }
    std::vector<double> ns, lmin, lmax;
    for (std::size_t n = 0; n < grid.levels.size(); ++n) {
        const auto& Q = grid.levels[n];
        double mn = 1.0, mx = 0.0;
        for (std::size_t k = 0; k < Q.size(); ++k) {
            double a = Q[k].length(), b = Q[(k + 1) % Q.size()].length();
            fc.c = std::max(fc.c, std::max(a / b, b / a));
            mn = std::min(mn, a), mx = std::max(mx, a);
        }
        ns.push_back(static_cast<double>(n + 1));
        lmin.push_back(std::log(mn));
        lmax.push_back(std::log(mx));
    }
    fc.lambda0 = std::exp(fit_line(ns, lmin).slope);
    fc.lambda1 = std::exp(fit_line(ns, lmax).slope);
    for (std::size_t k = 0; k < ns.size(); ++k) {
        fc.C0 = std::max(fc.C0, std::exp(ns[k] * std::log(fc.lambda0) - lmin[k]));
        fc.C0 = std::max(fc.C0, std::exp(lmax[k] - ns[k] * std::log(fc.lambda1)));
    }

    const double lower = 1.0 + 1.0 / fc.c, upper = static_cast<double>(fc.a) * std::pow(fc.c, static_cast<double>(fc.a));
    fc.lower_margin = fc.upper_margin = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n < grid.levels.size(); ++n)
        for (const GridAtom& J : grid.levels[n]) {
            double I = grid.levels[n - 1][J.parent].length();
            fc.lower_margin = std::min(fc.lower_margin, I / (lower * J.length()));
            fc.upper_margin = std::min(fc.upper_margin, upper * J.length() / I);
        }
    fc.sandwich = fc.lower_margin >= 1.0 - 1e-12 && fc.upper_margin >= 1.0 - 1e-12;
    return fc;
}

GridConjugacy grid_conjugacy(const CircleMap& f, const CircleMap& g, int depth, const PrecisionPolicy& policy) {
    if (depth < 1) throw std::invalid_argument("grid_conjugacy: depth must be positive");
    RotationMeasurement rf = rotation_number(f, depth + 1, policy), rg = rotation_number(g, depth + 1, policy);
    for (int n = 0; n <= depth; ++n)
        if (rf.cf.quotients.at(n) != rg.cf.quotients.at(n))
            throw CombinatorialMismatch("grid_conjugacy: partial quotient a_" + std::to_string(n) + " differs (" +
                                        std::to_string(rf.cf.quotients[n]) + " vs " +
                                        std::to_string(rg.cf.quotients[n]) + ")");
    GridConjugacy h;
    h.cf = rf.cf;
    const std::int64_t len = rf.cf.q[depth] + rf.cf.q[depth - 1];
    auto positions = [&](const CircleMap& m) {
        CircleOrbit o = circle_orbit(m.lift, m.critical, len, policy);
        std::vector<double> u(static_cast<std::size_t>(len));
        for (std::int64_t j = 0; j < len; ++j) {
            DD d = o.offset_dd(j, 0, DD(m.critical));
            double v = (d - floor(d)).to_double();
            u[j] = v >= 1.0 ? 0.0 : v;
        }
        return u;
    };
    h.f_points = positions(f);
    h.g_points = positions(g);
    std::vector<std::size_t> order(h.f_points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return h.f_points[a] < h.f_points[b]; });
    h.order_preserving = true;
    for (std::size_t k = 1; k < order.size(); ++k)
        if (!(h.g_points[order[k]] > h.g_points[order[k - 1]])) h.order_preserving = false;
    if (!h.order_preserving) throw CombinatorialMismatch("grid_conjugacy: vertex map does not preserve order");
    return h;
}

SmoothnessReport smoothness_report(const GridConjugacy& conj, const FineGrid& grid_f, const FineGrid& grid_g) {
    SmoothnessReport r;
    r.sn_threshold = grid_f.sn_threshold;
    const std::size_t L = std::min(grid_f.levels.size(), grid_g.levels.size());
    auto span = [](const std::vector<double>& pts, std::int64_t lo, std::int64_t hi) {
        double d = pts.at(static_cast<std::size_t>(hi)) - pts.at(static_cast<std::size_t>(lo));
        return d > 0.0 ? d : d + 1.0;
    };
    for (std::size_t n = 0; n < L; ++n) {
        const auto& Qf = grid_f.levels[n];
        const auto& Qg = grid_g.levels[n];
        if (Qf.size() != Qg.size()) throw CombinatorialMismatch("smoothness_report: grids are not aligned");
        std::vector<double> lf, lg;
        for (std::size_t k = 0; k < Qf.size(); ++k) {
            if (Qf[k].left_index != Qg[k].left_index || Qf[k].right_index != Qg[k].right_index)
                throw CombinatorialMismatch("smoothness_report: grids are not aligned at level " + std::to_string(n + 1));
            lf.push_back(span(conj.f_points, Qf[k].left_index, Qf[k].right_index));
            lg.push_back(span(conj.g_points, Qf[k].left_index, Qf[k].right_index));
        }
        double d = 0.0;
        for (std::size_t k = 0; k < lf.size(); ++k) {
            std::size_t j = (k + 1) % lf.size();
            d = std::max(d, std::fabs(lf[k] / lf[j] - lg[k] / lg[j]));
            d = std::max(d, std::fabs(lf[j] / lf[k] - lg[j] / lg[k]));
        }
        r.deviations.push_back(d);
    }
    r.qs_constant = r.deviations.empty() ? 0.0 : *std::max_element(r.deviations.begin(), r.deviations.end());
    if (r.qs_constant == 0.0) {
        r.classification = "zero";
        return r;
    }
    if (grid_f.levels.size() >= 3) r.lambda0 = fine_constants(grid_f).lambda0;
    const std::size_t N = r.deviations.size(), use = (2 * N + 2) / 3;
    std::vector<double> x, y;
    for (std::size_t n = N - use; n < N; ++n)
        if (r.deviations[n] > 0.0) {
            x.push_back(static_cast<double>(n + 1));
            y.push_back(std::log(r.deviations[n]));
        }
    r.fit_levels = x.size();
    r.classification = "bounded";
    if (x.size() >= 3) {
        LinearFit fit = fit_line(x, y);
        r.r2 = fit.r2;
        r.lambda = std::exp(fit.slope);
        r.prefactor = std::exp(fit.intercept);
        if (fit.r2 >= 0.9 && *r.lambda < 1.0) {
            r.classification = "exponential";
            if (r.lambda0 > 0.0 && r.lambda0 < 1.0) r.alpha = std::log(*r.lambda) / std::log(r.lambda0);
        }
    }
    return r;
}

void write_grid_csv(std::ostream& out, const FineGrid& grid) {
    out << "level,index,type,m,left,right\n";
    const double c = grid.partitions.front().critical;
    for (std::size_t n = 0; n < grid.levels.size(); ++n)
        for (std::size_t k = 0; k < grid.levels[n].size(); ++k) {
            const GridAtom& a = grid.levels[n][k];
            out << n + 1 << ',' << k << ',' << type_name(a.type) << ',' << a.m << ',' << format_real(c + a.u_lo) << ','
                << format_real(c + a.u_hi) << '\n';
        }
}

std::string smoothness_to_json(const SmoothnessReport& r) {
    json j;
    j["schema"] = "smoothness/1";
    j["sn_threshold"] = r.sn_threshold;
    j["deviations"] = r.deviations;
    j["classification"] = r.classification;
    j["qs_constant"] = r.qs_constant;
    json fit = json::object();
    fit["levels_used"] = r.fit_levels;
    if (r.lambda) fit["lambda"] = *r.lambda;
    if (r.prefactor) fit["prefactor"] = *r.prefactor;
    if (r.r2) fit["r2"] = *r.r2;
    if (r.alpha) fit["alpha"] = *r.alpha;
    fit["lambda0"] = r.lambda0;
    j["fit"] = fit;
    return j.dump(2);
}

}  // namespace renormlab
