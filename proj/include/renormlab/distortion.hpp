#pragma once

#include <array>
#include <functional>
#include <vector>

#include "renormlab/map.hpp"

namespace renormlab {

// Jet-evaluable function of one variable; nodes convert through as_jet_fn.
using JetFn = std::function<Jet3(double)>;
JetFn as_jet_fn(const MapPtr& f);

struct Interval {
    double lo = 0.0, hi = 0.0;
    double length() const { return hi - lo; }
};

// M inside T, with L and R the two components of T \ M
struct IntervalPair {
    double t_lo, m_lo, m_hi, t_hi;

    double left() const { return m_lo - t_lo; }
    double right() const { return t_hi - m_hi; }
    double middle() const { return m_hi - m_lo; }
    double total() const { return t_hi - t_lo; }
    double space() const { return std::min(left(), right()) / middle(); }
};

double cross_ratio(const IntervalPair& p);
// D(f(M), f(T)) / D(M, T)
double cross_ratio_distortion(const JetFn& f, const IntervalPair& p);
double cross_ratio_distortion(const MapPtr& f, const IntervalPair& p);

// (1 + 1/tau)^2 exp(C ell)
double koebe_constant(double tau, double ell, double C);

// beta (e^{beta tau} + 1)/(e^{beta tau} - 1) with beta = sqrt(2B), and 2/tau at B = 0
double nonlinearity_bound(double tau, double B);
// sup |phi''/phi'| on [lo, hi]
double sampled_nonlinearity(const JetFn& phi, double lo, double hi);
// min of S phi on [lo, hi] over a dense sample
double sampled_schwarzian_min(const JetFn& phi, double lo, double hi, int points = 2049);

// For the factor chains, maps[i] goes from domains[i] to domains[i+1].
struct FactorChain {
    std::vector<MapPtr> maps;
    std::vector<Interval> domains;
};

// c(M) of the composition estimate for C^m norms, m = 1..3
double composition_constant(double M, int m);

struct CmCheck {
    double C_M = 0.0, eps_M = 0.0;
    double sum = 0.0;                 // Σ ||f_j - g_j||_m
    double measured_radius = 0.0;     // largest sampled ||f_k ∘ ... ∘ f_j||_m
    std::vector<double> bound, actual;  // for k = 1..n
    double bound_final() const { return bound.empty() ? 0.0 : bound.back(); }
    double actual_final() const { return actual.empty() ? 0.0 : actual.back(); }
    bool holds() const;
};

// Checks the hypotheses for the declared radius M (throws HypothesisViolation) and returns, for every k,
// the bound C_M Σ_{j<=k} ||f_j - g_j||_m and the sampled ||F_k - G_k||_{m-1} on domains[0].
CmCheck cm_composition_error(const FactorChain& fs, const FactorChain& gs, int m, double M);
// Largest sampled C^m norm of the partial compositions f_k ∘ ... ∘ f_j.
double chain_radius(const FactorChain& fs, int m);

// Moebius map with T(delta) = phi(delta), matching the 2-jet of phi at delta.lo up to an affine correction
struct MoebiusFit {
    MapPtr map;
    double mu = 1.0;  // slope of the affine correction
};

// min(1, inf |phi'/phi''|) over `domain`
double moebius_length_scale(const JetFn& phi, Interval domain);
// With ell > 0, an interval longer than ell is rejected.
MoebiusFit moebius_2jet(const JetFn& phi, Interval delta, double ell = 0.0);
// sup over delta of |D^k phi - D^k T| for k = 0, 1, 2
std::array<double, 3> moebius_fit_errors(const JetFn& phi, const MoebiusFit& fit, Interval delta);

// Cross-ratio distortion of f^m on a chain together with Σ_{j<m} |f^j(T)|.
struct ChainDistortion {
    double distortion = 1.0;
    double total_length = 0.0;
};
ChainDistortion chain_cross_ratio(const MapPtr& f, const IntervalPair& p, std::int64_t m);
// Smallest sigma with B >= exp(-sigma ell) over the given chains (0 when every B >= 1).
double fit_cross_ratio_sigma(const std::vector<ChainDistortion>& chains);

}  // namespace renormlab
