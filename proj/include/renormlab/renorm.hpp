#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "renormlab/map.hpp"
#include "renormlab/mapio.hpp"
#include "renormlab/rotation.hpp"

namespace renormlab {

struct Height {
    bool infinite = false;
    std::int64_t value = 0;
    // fixed point of f_+ located by bisection when infinite
    double fixed_point = 0.0;
};

// f_- on [lambda, 0] and f_+ on [0, 1]
struct CommutingPair {
    double lambda = 0.0;
    MapPtr f_minus, f_plus;
    Height height;
    int level = 0;  // level of the first return this pair came from, 0 if unknown
};

// Builds a pair and computes its height.
CommutingPair make_pair(double lambda, MapPtr f_minus, MapPtr f_plus, int level = 0);

double shadow_eval(const CommutingPair& pair, double x);
Jet3 shadow_jet(const CommutingPair& pair, double x);

Height compute_height(const CommutingPair& pair, std::int64_t guard = 10'000'000);

CommutingPair renormalize_pair(const CommutingPair& pair);

// First return to I_n ∪ I_{n-1} in the chart t -> c + (f^{q_{n-1}}(c) - p_{n-1} - c) t.
CommutingPair extract_pair(const CircleMap& f, const ContinuedFraction& cf, int n, const PrecisionPolicy& policy = {});
CommutingPair extract_pair(const CircleMap& f, int n, const PrecisionPolicy& policy = {});

// The pair seen through the Moebius map sending lambda, 0, 1 to 0, 1/2, 1.
struct NormalizedPair {
    double lambda = 0.0;
    MapPtr left;   // on [0, 1/2]
    MapPtr right;  // on [1/2, 1]

    Jet3 jet(double y) const { return y <= 0.5 ? left->jet(y) : right->jet(y); }
};

NormalizedPair normalize(const CommutingPair& pair);

// max(|lambda - mu|, C^k distance of the normalized pairs on each half)
double ck_distance(const CommutingPair& a, const CommutingPair& b, int k);
double ck_distance(const NormalizedPair& a, const NormalizedPair& b, int k);

// Residue of f_+ ∘ f_- - f_- ∘ f_+ at 0, for the value (order 0) or the first derivative (order 1).
double commutation_residue(const CommutingPair& pair, int order = 0);

// Decomposition of the coefficient obtained from q_n steps of f on I_{n-1}:
// factors[j] = Λ_{j+1}^{-1} ∘ f ∘ Λ_j with Λ_j the orientation preserving affine map of [0,1] onto f^j(I_{n-1}).
// factors[0] contains the critical point; closing = Λ_0^{-1} ∘ Λ_Q.
struct ElementaryFactors {
    int level = 0;
    std::int64_t steps = 0;  // q_n
    std::vector<MapPtr> factors;
    std::vector<double> left, length;  // Λ_j(t) = left[j] + length[j] t, j = 0..q_n
    MapPtr closing;

    // closing ∘ factors[Q-1] ∘ ... ∘ factors[first]
    MapPtr composite(std::size_t first = 1) const;
};

ElementaryFactors elementary_factors(const CircleMap& f, const ContinuedFraction& cf, int n,
                                     const PrecisionPolicy& policy = {});

// Λ_0^{-1} ∘ f^{q_n - 1} ∘ Λ_1 evaluated directly, without the factorization
MapPtr coefficient_plus(const CircleMap& f, const ContinuedFraction& cf, int n, const PrecisionPolicy& policy = {});

struct SchwarzianReport {
    int level = 0;
    double sup_minus = 0.0, sup_plus = 0.0;  // sampled sup |S F_n^±|
    double max_minus = 0.0, max_plus = 0.0;  // sampled maxima, negative when the sign is right
    bool negative = false;
};

SchwarzianReport coefficient_schwarzian_report(const CircleMap& f, const ContinuedFraction& cf, int n,
                                               int samples = 33);

struct SchwarzianSweep {
    std::vector<SchwarzianReport> levels;
    // first level from which every later sampled level is negative
    std::optional<int> negative_from;
};

SchwarzianSweep schwarzian_sweep(const CircleMap& f, const ContinuedFraction& cf, int n_lo, int n_hi,
                                 int samples = 33);

// "pair/1" document with lambda, height and jets of the normalized pair on a standard grid
json pair_to_json(const CommutingPair& pair, int points_per_half = 33);

}  // namespace renormlab
