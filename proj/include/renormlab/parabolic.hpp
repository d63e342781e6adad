#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "renormlab/map.hpp"
#include "renormlab/rotation.hpp"

namespace renormlab {

// A diffeomorphism moving x_0 through x_1, ..., x_a with fundamental domains Δ_j between x_{j-1} and x_j.
struct AlmostParabolicMap {
    MapPtr map;
    std::int64_t a = 0;
    std::vector<double> x;  // x_0 .. x_{a+1}

    double domain_length(std::int64_t j) const { return std::fabs(x[j] - x[j - 1]); }
    // the union of Δ_1 .. Δ_a
    double lo() const { return std::min(x[0], x[a]); }
    double hi() const { return std::max(x[0], x[a]); }
    double length() const { return hi() - lo(); }
    // min(|Δ_1|, |Δ_a|)/|I|
    double sigma() const { return std::min(domain_length(1), domain_length(a)) / length(); }
};

// Orbit of x0 under `map`, taking the first a + 1 steps as domain endpoints.
AlmostParabolicMap almost_parabolic_from_orbit(MapPtr map, double x0, std::int64_t a);

// The branch x -> f^{q_n}(x) - p_n near x_{n-1} = f^{q_{n-1}}(c), of length a_n. Refuses when the sampled
// Schwarzian is not negative.
AlmostParabolicMap make_almost_parabolic(const CircleMap& f, const ContinuedFraction& cf, int n,
                                         const PrecisionPolicy& policy = {});

// max sampled Schwarzian of the map over its domain
double max_schwarzian(const AlmostParabolicMap& ap, int samples = 257);

struct YoccozProfile {
    std::vector<double> lengths;  // |Δ_j|, j = 1..a
    std::vector<double> r;        // |Δ_j| min(j, a - j)^2 / |I|, j = 1..a-1
    double sigma = 0.0;
    double band = 0.0;        // max r / min r
    double asymmetry = 0.0;   // max over j of max(r_j / r_{a-j}, r_{a-j} / r_j)
};

YoccozProfile yoccoz_profile(const AlmostParabolicMap& ap);
void write_profile_csv(std::ostream& out, const YoccozProfile& p);

// Orbit of 1 under x -> x/(1+x) - eps, with deviation from the unperturbed orbit.
struct MobiusOrbit {
    double eps = 0.0;
    std::vector<double> x;      // x_0 .. x_{N+1}
    std::vector<double> delta;  // δ_n = 1/(n+1) - x_n by the recursion, n = 0..N+1
    std::int64_t N = 0;         // x_{N+1} <= 0 < x_N
};

MobiusOrbit parabolic_mobius_orbit(double eps);

struct MobiusOrbitCheck {
    bool epsilon_bounds = false;  // 1/((N+1)(N+2)) <= eps < 6/(N(N+1))
    bool gap_lower = false;       // x_n - x_{n+1} >= 1/((n+1)(n+2)), n <= N
    bool gap_upper = false;       // x_n - x_{n+1} <= 54/((n+1)(n+2)), n <= N
    bool exit_gap = false;        // eps < x_N - x_{N+1} < 3 eps
    bool delta_bounds = false;    // n eps / 6 <= δ_n <= n eps
    double recursion_error = 0.0; // max |x_n - (1/(n+1) - δ_n)|

    bool all() const { return epsilon_bounds && gap_lower && gap_upper && exit_gap && delta_bounds; }
};

MobiusOrbitCheck check_mobius_orbit(const MobiusOrbit& o, double tol = 1e-12);

// x -> x/(1 + lambda x) - eps
MapPtr squeeze_mobius(double lambda, double eps);

// Largest number of B-orbit points strictly inside one gap of the A-orbit, both started at x0 = 1,
// for A = squeeze_mobius(lambda, eps), B = squeeze_mobius(mu, eps) with lambda > mu.
std::int64_t squeeze_count(double lambda, double mu, double eps);

// The squeeze of an almost parabolic map between two Moebius maps: coordinates u with z -> 0 and
// x_0 -> 1, where z minimizes |f(x) - x|.
struct Squeeze {
    double z = 0.0, eps = 0.0, lambda = 0.0, mu = 0.0;
    MapPtr normalized;            // the map in u coordinates
    bool ordered = false;         // A <= f <= B sampled on [0, 1]
    std::int64_t max_count = 0;   // squeeze_count(lambda, mu, eps)
    std::int64_t allowed = 0;     // floor(1 + lambda/mu) + 1
};

Squeeze squeeze(const AlmostParabolicMap& ap);

struct Divergence {
    std::vector<double> d;  // sup over the start points of |f^k(x) - g^k(x)|, k = 0..kmax
    double sup_diff = 0.0;  // sampled ||f - g||_0 on the domain of f
    double slope = 0.0;     // log-log fit of d_k against k for k >= 1
    double C_hat = 0.0;     // max_k d_k / (||f - g||_0 k^3)
    bool monotone = true;
};

Divergence compare_almost_parabolic(const AlmostParabolicMap& f, const AlmostParabolicMap& g,
                                    const std::vector<double>& starts, std::int64_t kmax);

// T_eps ∘ (x -> x + eta) with eps chosen so that the orbit of 1 has exactly a steps before 0.
struct MobiusModel {
    double eps = 0.0;
    AlmostParabolicMap f, g;
};
MobiusModel mobius_model_pair(std::int64_t a, double eta);

}  // namespace renormlab
