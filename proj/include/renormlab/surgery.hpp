#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "renormlab/distortion.hpp"
#include "renormlab/rotation.hpp"

namespace renormlab {

// sigma(n) = 1 + log2 log2(a_n + 4)
double default_sigma(std::int64_t a);

struct SurgeryPlan {
    int level = 0;
    std::int64_t a = 0;
    double sigma = 0.0;
    double target = 0.0;     // |Δ_1|^sigma, the displacement asked for in unit coordinates
    double amplitude = 0.0;  // bump amplitude in unit coordinates
    double z = 0.0;          // f^{q_{n+2} - a_n q_n}(c)
    Interval delta1, delta_a, left, right;
    double tau = 0.0;        // min(|L|, |R|)/|Δ_1|
    double J = 0.0;          // |J_n|
};

struct SurgeryResult {
    CircleMap map;  // Φ ∘ f
    MapPtr phi, phi_inverse;
    SurgeryPlan plan;
};

// n-th order discrepancy from the positions of the critical orbits; needs a_n >= 2.
double discrepancy(const CircleMap& f, const CircleMap& g, const ContinuedFraction& cf, int n,
                   const PrecisionPolicy& policy = {});

SurgeryResult surgery(const CircleMap& f, const ContinuedFraction& cf, int n, double sigma,
                      const PrecisionPolicy& policy = {});

struct SurgeryCheck {
    double orbit_error = 0.0;       // max |f~^j(c) - f^j(c)| over j in {1, q_n, q_{n+1}}
    double renorm_distance = 0.0;   // d_0 of the pairs at level n + 1
    double discrepancy = 0.0;       // at the surgery level
    std::vector<double> deeper;     // at levels n + 1 .. depth
    double undo_error = 0.0;        // sampled |Φ^{-1}(f~(x)) - f(x)|
    double split_displacement = 0.0;
    bool split_ok = false;          // |φ(z) - z| >= |Δ_1|^{1 + sigma}
    bool quotients_conserved = false;
    std::array<double, 4> norms{};  // sampled ||Φ^{±1} - id||_{C^k}, k = 0..3
    std::array<double, 4> B{};      // norms[k] / |J_n|^{sigma - k + 1}
};

SurgeryCheck verify_surgery(const CircleMap& f, const SurgeryResult& s, const ContinuedFraction& cf, int depth,
                            const PrecisionPolicy& policy = {});

using SigmaRule = std::function<double(int level, std::int64_t a)>;
SigmaRule auto_sigma();
SigmaRule fixed_sigma(double s);

struct Counterexample {
    CircleMap base, map;
    std::vector<SurgeryResult> stages;
    // a^{2β}|J|^{2σ - β} per stage for β = 0.1, 0.5, 1
    std::vector<std::array<double, 3>> rigidity_indicator;
};

Counterexample build_counterexample(const CircleMap& f, const ContinuedFraction& cf, const std::vector<int>& levels,
                                    const SigmaRule& sigma, const PrecisionPolicy& policy = {});

std::string surgery_bundle_json(const Counterexample& c, const std::vector<SurgeryCheck>& checks);

}  // namespace renormlab
