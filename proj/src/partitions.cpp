#include "renormlab/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "renormlab/mapio.hpp"

namespace renormlab {

std::size_t DynamicalPartition::locate(double u) const {
    u -= std::floor(u);
    auto it = std::upper_bound(atoms.begin(), atoms.end(), u, [](double v, const Atom& a) { return v < a.u_left; });
    if (it == atoms.begin()) return atoms.size() - 1;
    return static_cast<std::size_t>(it - atoms.begin()) - 1;
}

DynamicalPartition build_partition(const CircleMap& f, const ContinuedFraction& cf, int n,
                                   const PrecisionPolicy& policy) {
    if (n < 1 || static_cast<std::size_t>(n) >= cf.q.size())
        throw std::invalid_argument("build_partition: level needs q_n from the continued fraction");
    std::int64_t len = cf.q[n] + cf.q[n - 1];
    CircleOrbit o = circle_orbit(f.lift, f.critical, len, policy);
    return build_partition(o, f.critical, cf, n, policy);
}

DynamicalPartition build_partition(const CircleOrbit& orbit, double critical, const ContinuedFraction& cf, int n,
                                   const PrecisionPolicy& policy) {
    if (n < 1 || static_cast<std::size_t>(n) >= cf.q.size())
        throw std::invalid_argument("build_partition: level needs q_n from the continued fraction");
    const std::int64_t qn = cf.q[n], qm = cf.q[n - 1];
    const std::int64_t pn = cf.p[n], pm = cf.p[n - 1];
    if (qn + qm > policy.orbit_length_guard) throw PrecisionExhausted("partition exceeds the orbit-length guard");
    if (orbit.size() < qn + qm) throw std::invalid_argument("build_partition: orbit too short");

    DynamicalPartition P;
    P.level = n;
    P.critical = critical;
    P.q_n = qn;
    P.q_prev = qm;
    P.atoms.reserve(static_cast<std::size_t>(qn + qm));
    const DD c(critical);

    auto add = [&](Generation g, std::int64_t j, std::int64_t step, std::int64_t shift) {
        // interval [z_j, z_{j+step} - shift] in the lift
        DD d = orbit.offset_dd(j + step, shift, DD(0.0)) - orbit.offset_dd(j, 0, DD(0.0));
        Atom a;
        a.gen = g;
        a.j = j;
        a.length = std::fabs(d.to_double());
        DD start = orbit.offset_dd(j, 0, c);
        if (d.hi < 0.0) start += d;
        DD u = start - floor(start);
        a.u_left = u.to_double();
        if (a.u_left >= 1.0) a.u_left = 0.0;
        a.left_index = d.hi < 0.0 ? j + step : j;
        a.right_index = d.hi < 0.0 ? j : j + step;
        P.atoms.push_back(a);
    };
    for (std::int64_t j = 0; j < qn; ++j) add(Generation::long_gen, j, qm, pm);
    for (std::int64_t j = 0; j < qm; ++j) add(Generation::short_gen, j, qn, pn);

    std::sort(P.atoms.begin(), P.atoms.end(), [](const Atom& a, const Atom& b) {
        if (a.u_left != b.u_left) return a.u_left < b.u_left;
        return a.left_index < b.left_index;
    });
    double total = 0.0;
    for (std::size_t i = 0; i < P.atoms.size(); ++i) {
        const Atom& a = P.atoms[i];
        if (!(a.length > policy.min_interval_guard))
            throw PrecisionExhausted("partition atom shorter than the minimal interval guard at level " +
                                     std::to_string(n));
        total += a.length;
        const Atom& b = P.atoms[(i + 1) % P.atoms.size()];
        if (a.right_index != b.left_index)
            throw CombinatorialMismatch("partition atoms are not consecutive: the quotients do not match the map at level " +
                                        std::to_string(n));
    }
    if (std::fabs(total - 1.0) > 1e-9) throw PrecisionExhausted("partition lengths do not add up to one");
    return P;
}

std::vector<std::size_t> parent_map(const DynamicalPartition& coarse, const DynamicalPartition& fine, double tol) {
    std::vector<std::size_t> parent(fine.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const Atom& a = fine.atoms[i];
        while (k + 1 < coarse.size() && coarse.atoms[k].u_right() <= a.u_left + tol) ++k;
        const Atom& A = coarse.atoms[k];
        if (a.u_left < A.u_left - tol || a.u_right() > A.u_right() + tol)
            throw CombinatorialMismatch("partition of level " + std::to_string(fine.level) +
                                        " does not refine level " + std::to_string(coarse.level));
        parent[i] = k;
    }
    return parent;
}

namespace {

// max over j in [i, q_n] of the distortion of f^{j-i} on I_{n-1}^i, sampled on 33 points
double distortion_from(const CircleMap& f, const DynamicalPartition& p, std::int64_t i) {
    const int pts = 33;
    // I_{n-1}^i is the long atom with index i
    const Atom* atom = nullptr;
    for (const Atom& a : p.atoms)
        if (a.gen == Generation::long_gen && a.j == i) atom = &a;
    if (!atom) throw std::logic_error("distortion_from: missing atom");
    std::vector<double> x(pts), logd(pts, 0.0);
    for (int k = 0; k < pts; ++k) x[k] = p.critical + atom->u_left + atom->length * k / (pts - 1);
    double worst = 0.0;
    for (std::int64_t step = i; step < p.q_n; ++step) {
        for (int k = 0; k < pts; ++k) {
            Jet3 j = f.lift->jet(x[k]);
            logd[k] += std::log(j.d1);
            x[k] = j.f - std::floor(j.f);
        }
        auto [lo, hi] = std::minmax_element(logd.begin(), logd.end());
        worst = std::max(worst, *hi - *lo);
    }
    return std::exp(worst);
}

}  // namespace

BoundsReport check_real_bounds(const CircleMap& f, const DynamicalPartition& p_prev, const DynamicalPartition& p,
                               bool bounded_type, const DynamicalPartition* p_prev2, int samples_i) {
    if (p_prev.level + 1 != p.level) throw std::invalid_argument("check_real_bounds: levels must be consecutive");
    BoundsReport r;
    r.level = p.level;
    r.bounded_type = bounded_type;

    double total = 0.0;
    r.min_atom_length = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double a = p.atoms[i].length, b = p.atoms[(i + 1) % p.size()].length;
        r.max_adjacent_ratio = std::max(r.max_adjacent_ratio, std::max(a / b, b / a));
        r.min_atom_length = std::min(r.min_atom_length, a);
        total += a;
    }
    r.mass_error = std::fabs(total - 1.0);

    auto parent = parent_map(p_prev, p);
    r.min_parent_ratio = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double ratio = p.atoms[i].length / p_prev.atoms[parent[i]].length;
        r.max_parent_ratio = std::max(r.max_parent_ratio, ratio);
        r.min_parent_ratio = std::min(r.min_parent_ratio, ratio);
    }
    if (p_prev2) {
        auto parent2 = parent_map(*p_prev2, p);
        double mx = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            mx = std::max(mx, p.atoms[i].length / p_prev2->atoms[parent2[i]].length);
        r.max_two_step_ratio = mx;
    }

    // (e) on a few starting indices 0 < i < q_n
    std::vector<std::int64_t> is;
    for (int s = 0; s < samples_i; ++s) {
        std::int64_t i = 1 + (p.q_n - 2) * s / std::max(1, samples_i - 1);
        if (i >= 1 && i < p.q_n && (is.empty() || is.back() != i)) is.push_back(i);
    }
    for (std::int64_t i : is) r.max_distortion = std::max(r.max_distortion, distortion_from(f, p, i));
    return r;
}

double s_n_sum(const DynamicalPartition& p) {
    if (p.level < 2) throw std::invalid_argument("s_n_sum: level must be at least 2");
    double s = 0.0;
    for (const Atom& a : p.atoms) {
        if (a.j == 0) continue;  // I_{n-1} and I_n
        double d = std::min(a.u_left, 1.0 - a.u_right());
        double r = a.length / d;
        s += r * r;
    }
    return s;
}

void write_partition_csv(std::ostream& out, const std::vector<DynamicalPartition>& levels) {
    out << "level,index,generation,j,left,right,length\n";
    for (const auto& P : levels)
        for (std::size_t i = 0; i < P.size(); ++i) {
            const Atom& a = P.atoms[i];
            out << P.level << ',' << i << ',' << (a.gen == Generation::long_gen ? "long" : "short") << ',' << a.j
                << ',' << format_real(P.left(i)) << ',' << format_real(P.right(i)) << ',' << format_real(a.length)
                << '\n';
        }
}

}  // namespace renormlab
