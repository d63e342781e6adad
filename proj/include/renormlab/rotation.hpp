#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "renormlab/map.hpp"

namespace renormlab {

// x = 1/(a_0 + 1/(a_1 + ...)) with convergents p_n/q_n:
// p_0 = 0, q_0 = 1, p_1 = 1, q_1 = a_0, p_{n+1} = a_n p_n + p_{n-1}, likewise q.
struct ContinuedFraction {
    std::vector<std::int64_t> quotients;
    std::vector<std::int64_t> p, q;  // one more entry than quotients
    bool terminated = false;

    std::size_t size() const { return quotients.size(); }
    double convergent(std::size_t n) const { return static_cast<double>(p[n]) / static_cast<double>(q[n]); }
    // value of the finite expansion
    double value() const;
};

ContinuedFraction from_quotients(std::vector<std::int64_t> a);
ContinuedFraction continued_fraction(double x, int max_terms);
std::vector<std::int64_t> return_times(const ContinuedFraction& cf, int n);

// A prescribed rotation number by its partial quotients.
struct RotationTarget {
    std::vector<std::int64_t> prefix;
    bool repeat_last = false;  // trailing "*"
    // generator: a_n = 2^(2^(k+1)) at the k-th listed level, `base` elsewhere
    std::vector<int> rule_levels;
    std::int64_t base = 2;
    bool is_rule = false;

    std::int64_t quotient(int n) const;
    ContinuedFraction expand(int depth) const;
    // false for generator rules once a listed level lies in range, or for an infinite list beyond `bound`
    bool bounded_type(int depth, std::int64_t bound) const;

    static RotationTarget parse(const std::string& text);
    static RotationTarget from_real(double x, int depth);
};

struct RotationMeasurement {
    ContinuedFraction cf;
    // signed closest-return displacements F^{q_n}(c) - p_n - c, n = 0..depth+1
    std::vector<double> displacements;
    double average_estimate = 0.0;  // (F^N(c) - c)/N
    std::int64_t average_length = 0;
    bool average_consistent = false;  // within 1/q_depth^2 + 1/N of p_depth/q_depth
};

// Partial quotients a_0..a_depth by counting closest returns of the marked orbit.
RotationMeasurement rotation_number(const CircleMap& f, int depth, const PrecisionPolicy& policy = {});

// One-parameter family with rotation number nondecreasing in the parameter.
struct Family {
    std::function<CircleMap(double)> make;
    double lo = 0.0;
    double hi = 1.0;
};

Family sine_family_critical();
Family rotation_family();

struct TuneResult {
    double parameter = 0.0;
    int levels = 0;  // N with 1/(q_N q_{N+1}) < tol
    double left = 0.0, right = 0.0;  // parameters realising p_N/q_N and p_{N+1}/q_{N+1}
};

TuneResult tune(const Family& family, const RotationTarget& target, double tol, const PrecisionPolicy& policy = {});
double tune_parameter(const Family& family, const RotationTarget& target, double tol,
                      const PrecisionPolicy& policy = {});

// F^q(c) - c - p with winding bookkeeping
double displacement(const CircleMap& f, std::int64_t q, std::int64_t p, Backend backend = Backend::binary64);

}  // namespace renormlab
