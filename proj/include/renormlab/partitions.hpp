#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "renormlab/map.hpp"
#include "renormlab/rotation.hpp"

namespace renormlab {

// Atoms of level n are f^j(I_{n-1}) (long generation, j < q_n) and f^j(I_n) (short, j < q_{n-1}).
enum class Generation { long_gen, short_gen };

struct Atom {
    Generation gen = Generation::long_gen;
    std::int64_t j = 0;
    // position measured from the critical point, u in [0, 1) going once around the circle
    double u_left = 0.0;
    double length = 0.0;
    // orbit indices of the endpoints
    std::int64_t left_index = 0, right_index = 0;

    double u_right() const { return u_left + length; }
};

struct DynamicalPartition {
    int level = 0;
    double critical = 0.0;
    std::int64_t q_n = 0, q_prev = 0;  // q_n, q_{n-1}
    std::vector<Atom> atoms;           // cyclic order starting at the critical point

    std::size_t size() const { return atoms.size(); }
    double left(std::size_t i) const { return critical + atoms[i].u_left; }
    double right(std::size_t i) const { return critical + atoms[i].u_right(); }
    // index of the atom containing u (right endpoints excluded)
    std::size_t locate(double u) const;
};

DynamicalPartition build_partition(const CircleMap& f, const ContinuedFraction& cf, int n,
                                   const PrecisionPolicy& policy = {});
// Same, reusing an orbit of the critical point with at least q_n + q_{n-1} points.
DynamicalPartition build_partition(const CircleOrbit& orbit, double critical, const ContinuedFraction& cf, int n,
                                   const PrecisionPolicy& policy = {});

// For every atom of `fine`, the index of the atom of `coarse` containing it; throws when `fine` does not refine.
std::vector<std::size_t> parent_map(const DynamicalPartition& coarse, const DynamicalPartition& fine,
                                    double tol = 1e-12);

struct BoundsReport {
    int level = 0;
    double max_adjacent_ratio = 0.0;    // (a)
    double max_parent_ratio = 0.0;      // (b) against P_{n-1}
    std::optional<double> max_two_step_ratio;  // (b) against P_{n-2}, if given
    bool bounded_type = false;          // (c), (d) only meaningful then
    double min_parent_ratio = 0.0;      // (d)
    double min_atom_length = 0.0;       // (c)
    double max_distortion = 0.0;        // (e), as a ratio of derivatives
    double mass_error = 0.0;
};

BoundsReport check_real_bounds(const CircleMap& f, const DynamicalPartition& p_prev, const DynamicalPartition& p,
                               bool bounded_type, const DynamicalPartition* p_prev2 = nullptr, int samples_i = 6);

// Sum over atoms other than I_{n-1} and I_n of (|I| / d(c, I))^2.
double s_n_sum(const DynamicalPartition& p);

void write_partition_csv(std::ostream& out, const std::vector<DynamicalPartition>& levels);

}  // namespace renormlab
