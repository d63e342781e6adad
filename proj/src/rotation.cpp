#include "renormlab/rotation.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace renormlab {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Forward orbit of a circle lift kept as winding + fractional part, without storage.
class OrbitCursor {
public:
    OrbitCursor(MapPtr F, double x0, Backend b) : F_(std::move(F)), backend_(b) {
        double fl = std::floor(x0);
        wind_ = static_cast<std::int64_t>(fl);
        frac_ = DD(x0 - fl);
    }

    std::int64_t index() const { return index_; }

    void advance_to(std::int64_t k) {
        if (backend_ == Backend::double_double) {
            while (index_ < k) {
                frac_ = F_->value(frac_);
                DD fl = floor(frac_);
                frac_ -= fl;
                wind_ += static_cast<std::int64_t>(fl.hi);
                ++index_;
            }
            return;
        }
        double y = frac_.hi;
        while (index_ < k) {
            y = F_->value(y);
            double fl = std::floor(y);
            y -= fl;
            wind_ += static_cast<std::int64_t>(fl);
            ++index_;
        }
        frac_ = DD(y);
    }

    // z_index - p - ref
    DD offset(std::int64_t p, const DD& ref) const { return DD(static_cast<double>(wind_ - p)) + frac_ - ref; }

private:
    MapPtr F_;
    Backend backend_;
    std::int64_t wind_ = 0;
    DD frac_;
    std::int64_t index_ = 0;
};

double lock_tolerance(Backend b) {
    return b == Backend::double_double ? 1e3 * 1e-32 : 1e3 * eps;
}

}  // namespace

double ContinuedFraction::value() const {
    double x = 0.0;
    for (auto it = quotients.rbegin(); it != quotients.rend(); ++it) x = 1.0 / (static_cast<double>(*it) + x);
    return x;
}

ContinuedFraction from_quotients(std::vector<std::int64_t> a) {
    ContinuedFraction cf;
    cf.quotients = std::move(a);
    cf.p = {0};
    cf.q = {1};
    std::int64_t pm = 1, qm = 0;  // p_{-1}, q_{-1}
    for (std::int64_t an : cf.quotients) {
        if (an < 1) throw std::invalid_argument("partial quotients must be >= 1");
        std::int64_t pn = cf.p.back(), qn = cf.q.back();
        if (qn > std::numeric_limits<std::int64_t>::max() / (an + 1))
            throw PrecisionExhausted("return times overflow 64-bit integers");
        cf.p.push_back(an * pn + pm);
        cf.q.push_back(an * qn + qm);
        pm = pn, qm = qn;
    }
    return cf;
}

ContinuedFraction continued_fraction(double x, int max_terms) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("continued_fraction: x must lie in (0, 1)");
    std::vector<std::int64_t> a;
    double err = eps * x;  // uncertainty of the current remainder
    bool terminated = false;
    while (static_cast<int>(a.size()) < max_terms) {
        double y = 1.0 / x;
        double fy = std::floor(y);
        // the integer part must be stable under the propagated uncertainty
        double ey = err / (x * x) + eps * y;
        if (std::floor(y - ey) != std::floor(y + ey)) {
            double near = std::round(y);
            if (std::fabs(y - near) > ey || ey > 1e-6)
                throw PrecisionExhausted("continued_fraction: remainder below working precision");
            // y is an integer within the uncertainty: the expansion ends here
            a.push_back(static_cast<std::int64_t>(near));
            terminated = true;
            break;
        }
        if (fy > 9e15) throw PrecisionExhausted("continued_fraction: quotient beyond integer precision");
        a.push_back(static_cast<std::int64_t>(fy));
        x = y - fy;
        err = ey + eps;
        if (x <= 2.0 * err) {
            terminated = true;
            break;
        }
    }
    ContinuedFraction cf = from_quotients(std::move(a));
    cf.terminated = terminated;
    return cf;
}

std::vector<std::int64_t> return_times(const ContinuedFraction& cf, int n) {
    if (n < 0 || static_cast<std::size_t>(n) > cf.size())
        throw std::invalid_argument("return_times: not enough quotients");
    return std::vector<std::int64_t>(cf.q.begin(), cf.q.begin() + n + 1);
}

// ---------------------------------------------------------------- targets

std::int64_t RotationTarget::quotient(int n) const {
    if (n < 0) throw std::invalid_argument("negative quotient index");
    if (is_rule) {
        for (std::size_t k = 0; k < rule_levels.size(); ++k)
            if (rule_levels[k] == n) {
                // 2^(2^(k+1)) with k counted from 1
                int e = 1 << (static_cast<int>(k) + 2);
                if (e > 62) throw PrecisionExhausted("generator quotient exceeds 64-bit range");
                return std::int64_t{1} << e;
            }
        return base;
    }
    if (static_cast<std::size_t>(n) < prefix.size()) return prefix[n];
    if (repeat_last && !prefix.empty()) return prefix.back();
    throw std::out_of_range("rotation target has only " + std::to_string(prefix.size()) + " quotients");
}

ContinuedFraction RotationTarget::expand(int depth) const {
    std::vector<std::int64_t> a;
    for (int n = 0; n < depth; ++n) a.push_back(quotient(n));
    return from_quotients(std::move(a));
}

bool RotationTarget::bounded_type(int depth, std::int64_t bound) const {
    std::int64_t mx = 0;
    for (int n = 0; n < depth; ++n) {
        if (!is_rule && !repeat_last && static_cast<std::size_t>(n) >= prefix.size()) break;
        mx = std::max(mx, quotient(n));
    }
    if (is_rule) {
        // the rule models lim sup (1/n) log a_n = infinity
        for (int lv : rule_levels)
            if (lv < depth) return false;
    }
    return mx <= bound;
}

RotationTarget RotationTarget::parse(const std::string& text) {
    RotationTarget t;
    std::string s = text;
    if (s.rfind("rule:", 0) == 0) {
        s = s.substr(5);
        const std::string tag = "doubleexp@";
        if (s.rfind(tag, 0) != 0) throw std::invalid_argument("unknown quotient rule: " + text);
        t.is_rule = true;
        std::stringstream ss(s.substr(tag.size()));
        std::string item;
        while (std::getline(ss, item, ',')) {
            int lv = std::stoi(item);
            if (lv < 0 || (!t.rule_levels.empty() && lv <= t.rule_levels.back()))
                throw std::invalid_argument("rule levels must be increasing: " + text);
            t.rule_levels.push_back(lv);
        }
        if (t.rule_levels.empty()) throw std::invalid_argument("rule needs at least one level");
        return t;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        if (item == "*") {
            if (t.prefix.empty()) throw std::invalid_argument("'*' needs a preceding quotient");
            t.repeat_last = true;
            if (std::getline(ss, item, ',')) throw std::invalid_argument("'*' must be the last entry");
            break;
        }
        std::size_t used = 0;
        long long v = std::stoll(item, &used);
        if (used != item.size() || v < 1) throw std::invalid_argument("bad partial quotient: " + item);
        t.prefix.push_back(v);
    }
    if (t.prefix.empty()) throw std::invalid_argument("empty quotient list");
    return t;
}

RotationTarget RotationTarget::from_real(double x, int depth) {
    RotationTarget t;
    t.prefix = continued_fraction(x, depth).quotients;
    return t;
}

// ---------------------------------------------------------------- measurement

double displacement(const CircleMap& f, std::int64_t q, std::int64_t p, Backend backend) {
    OrbitCursor cur(f.lift, f.critical, backend);
    cur.advance_to(q);
    return cur.offset(p, DD(f.critical)).to_double();
}

RotationMeasurement rotation_number(const CircleMap& f, int depth, const PrecisionPolicy& policy) {
    if (depth < 0) throw std::invalid_argument("rotation_number: negative depth");
    const DD c(f.critical);
    const double tol = lock_tolerance(policy.backend);
    OrbitCursor cur(f.lift, f.critical, policy.backend);

    std::vector<std::int64_t> a;
    std::vector<double> disp;
    // level -1: q = 0, p = 1, displacement -1; level 0: q = 1, p = 0
    std::int64_t qm = 0, pm = 1, qn = 1, pn = 0;
    double ym = -1.0;
    cur.advance_to(1);
    double yn = cur.offset(0, c).to_double();
    if (std::fabs(yn) < tol) throw RationalLock("marked point is fixed");
    if (yn < 0.0 || yn >= 1.0) throw DomainError("lift must satisfy c <= F(c) < c + 1");
    disp.push_back(yn);

    for (int n = 0; n <= depth; ++n) {
        // a_n = largest j with sign(F^{q_{n-1} + j q_n}(c) - p_{n-1} - j p_n - c) = sign(y_{n-1})
        std::int64_t j = 0;
        double ylast = ym;
        while (true) {
            std::int64_t idx = qm + (j + 1) * qn;
            if (idx > policy.orbit_length_guard)
                throw RationalLock("no closest return within the orbit-length guard at level " + std::to_string(n));
            cur.advance_to(idx);
            double y = cur.offset(pm + (j + 1) * pn, c).to_double();
            if (std::fabs(y) < tol)
                throw RationalLock("periodic marked orbit: |F^q(c) - p - c| below tolerance at q = " +
                                   std::to_string(idx));
            if ((y < 0.0) != (ym < 0.0)) break;
            ++j;
            ylast = y;
        }
        if (j < 1) throw PrecisionExhausted("closest returns out of order at level " + std::to_string(n));
        a.push_back(j);
        std::int64_t q2 = j * qn + qm, p2 = j * pn + pm;
        qm = qn, pm = pn, ym = yn;
        qn = q2, pn = p2, yn = ylast;
        disp.push_back(yn);
    }

    RotationMeasurement m;
    m.cf = from_quotients(std::move(a));
    m.displacements = std::move(disp);

    const std::int64_t qd = m.cf.q[depth];
    std::int64_t N = std::min<std::int64_t>({qd * qd, policy.orbit_length_guard, 1'000'000});
    N = std::max<std::int64_t>(N, qd);
    OrbitCursor avg(f.lift, f.critical, policy.backend);
    avg.advance_to(N);
    m.average_length = N;
    m.average_estimate = avg.offset(0, c).to_double() / static_cast<double>(N);
    double gap = std::fabs(m.average_estimate - m.cf.convergent(depth));
    m.average_consistent = gap <= 1.0 / (static_cast<double>(qd) * qd) + 1.0 / static_cast<double>(N);
    return m;
}

// ---------------------------------------------------------------- tuning

Family sine_family_critical() { return {[](double w) { return critical_sine_map(w); }, 0.0, 1.0}; }
Family rotation_family() { return {[](double r) { return rotation_map(r); }, 0.0, 1.0}; }

TuneResult tune(const Family& family, const RotationTarget& target, double tol, const PrecisionPolicy& policy) {
    if (!(tol > 0.0)) throw std::invalid_argument("tune: tolerance must be positive");
    // N = smallest n with 1/(q_n q_{n+1}) < tol
    std::vector<std::int64_t> a;
    ContinuedFraction cf = from_quotients({});
    int N = -1;
    for (int n = 0; n < 200; ++n) {
        a.push_back(target.quotient(n));
        cf = from_quotients(a);
        if (n >= 1 && 1.0 / (static_cast<double>(cf.q[n - 1]) * static_cast<double>(cf.q[n])) < tol) {
            N = n - 1;
            break;
        }
    }
    if (N < 0) throw PrecisionExhausted("tune: tolerance not reached within 200 quotients");
    if (cf.q[N + 1] > policy.orbit_length_guard) throw PrecisionExhausted("tune: return time exceeds the orbit guard");

    // G_k(w) = F_w^{q_k}(c) - c - p_k is increasing in w; its root realises p_k/q_k.
    auto G = [&](int k, double w) { return displacement(family.make(w), cf.q[k], cf.p[k], policy.backend); };
    std::vector<double> roots;
    for (int k = 0; k <= N + 1; ++k) {
        double lo = family.lo, hi = family.hi;
        if (k >= 2) {
            lo = std::min(roots[k - 1], roots[k - 2]);
            hi = std::max(roots[k - 1], roots[k - 2]);
        }
        double glo = G(k, lo), ghi = G(k, hi);
        if (glo > 0.0 || ghi < 0.0) {
            lo = family.lo, hi = family.hi;
            glo = G(k, lo), ghi = G(k, hi);
        }
        if (glo == 0.0) { roots.push_back(lo); continue; }
        if (ghi == 0.0) { roots.push_back(hi); continue; }
        if (glo > 0.0 || ghi < 0.0) throw BracketFailure("tune: no sign change for return time " + std::to_string(cf.q[k]));
        std::uintmax_t iters = 200;
        auto stop = [](double x, double y) { return std::fabs(x - y) <= 2.0 * eps * std::max(1.0, std::fabs(x)); };
        auto r = boost::math::tools::toms748_solve([&](double w) { return G(k, w); }, lo, hi, glo, ghi, stop, iters);
        roots.push_back(0.5 * (r.first + r.second));
    }
    TuneResult t;
    t.levels = N;
    t.left = roots[N];
    t.right = roots[N + 1];
    t.parameter = 0.5 * (t.left + t.right);
    if (t.left == t.right) throw RationalLock("tune: consecutive convergents realised at one parameter");
    return t;
}

double tune_parameter(const Family& family, const RotationTarget& target, double tol, const PrecisionPolicy& policy) {
    return tune(family, target, tol, policy).parameter;
}

}  // namespace renormlab
