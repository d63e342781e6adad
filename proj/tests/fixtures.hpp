#pragma once

#include "renormlab/rotation.hpp"

// Tuned maps shared by several test files; each is computed once per process.
namespace fixtures {

inline double tuned_omega(const char* quotients) {
    return renormlab::tune_parameter(renormlab::sine_family_critical(), renormlab::RotationTarget::parse(quotients),
                                     1e-12);
}

inline const renormlab::CircleMap& golden_sine() {
    static const renormlab::CircleMap f = renormlab::critical_sine_map(tuned_omega("1,*"));
    return f;
}

inline const renormlab::CircleMap& silver_sine() {
    static const renormlab::CircleMap f = renormlab::critical_sine_map(tuned_omega("2,*"));
    return f;
}

inline const renormlab::CircleMap& fifty_sine() {
    static const renormlab::CircleMap f = renormlab::critical_sine_map(tuned_omega("1,1,50,1,*"));
    return f;
}

inline const renormlab::CircleMap& thirtytwo_sine() {
    static const renormlab::CircleMap f = renormlab::critical_sine_map(tuned_omega("1,1,32,2,*"));
    return f;
}

inline double golden_mean() { return (std::sqrt(5.0) - 1.0) / 2.0; }

}  // namespace fixtures
