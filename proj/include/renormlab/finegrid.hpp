#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "renormlab/partitions.hpp"

namespace renormlab {

enum class AtomType { b1, b2, b3, b4 };
std::string type_name(AtomType t);

// A grid atom is the union of the consecutive atoms first..last of P_{unit_level}.
struct GridAtom {
    AtomType type = AtomType::b1;
    int m = 0;           // source level
    int unit_level = 0;  // m for b1/b4, m + 1 for b2/b3
    std::size_t first = 0, last = 0;
    // b2 only: the saddle-node atom of P_m and the index of the central interval
    std::size_t host = 0;
    int central = -1;
    double u_lo = 0.0, u_hi = 0.0;
    std::int64_t left_index = 0, right_index = 0;  // orbit indices of the endpoints
    std::size_t parent = 0;                        // index in the previous grid level

    double length() const { return u_hi - u_lo; }
};

// Central intervals M_0 ⊇ ... ⊇ M_N of a saddle-node atom, as child index ranges of P_{m+1}.
struct SaddleNodeDecomposition {
    int level = 0;
    std::size_t atom = 0;
    std::size_t children = 0;
    int N = 0;
    std::vector<std::pair<std::size_t, std::size_t>> central;  // M_i, i = 0..N
    std::vector<double> left, middle, right;                   // |L_i|, |M_{i+1}|, |R_i|, i = 0..N-1
    double comparability = 1.0;                                // max ratio among |L_i|, |M_{i+1}|, |R_i|
};

struct FineGrid {
    int sn_threshold = 1000;
    std::vector<DynamicalPartition> partitions;  // consecutive levels
    // children[k][i]: half-open range in partitions[k + 1] of the atoms inside atom i of partitions[k]
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> children;
    std::vector<std::vector<GridAtom>> levels;  // Q_1, Q_2, ...
    std::vector<SaddleNodeDecomposition> saddle_nodes;

    int first_level() const { return partitions.front().level; }
    const DynamicalPartition& partition(int m) const { return partitions.at(m - first_level()); }
    bool is_saddle_node(int m, std::size_t i) const;
    const SaddleNodeDecomposition& decomposition(int m, std::size_t i) const;
    // number of children of each atom of Q_n in Q_{n+1}
    std::vector<std::size_t> child_counts(std::size_t n) const;
};

// Grid over the given consecutive partitions; `levels` = 0 builds as many levels as the partitions allow.
FineGrid build_fine_grid(std::vector<DynamicalPartition> partitions, int sn_threshold, int levels = 0);

struct FineConstants {
    std::size_t a = 0;  // max children per atom
    double c = 1.0;     // max adjacent ratio
    double C0 = 1.0, lambda0 = 0.0, lambda1 = 0.0;
    // worst margins of the parent/child sandwich, each >= 1 when it holds
    double lower_margin = 0.0, upper_margin = 0.0;
    bool sandwich = false;
    bool strict_refinement = false;
};

FineConstants fine_constants(const FineGrid& grid);

// Vertex map f^j(c_f) -> g^j(c_g) for j below q_depth + q_{depth-1}.
struct GridConjugacy {
    ContinuedFraction cf;
    std::vector<double> f_points, g_points;  // positions measured from the critical points, in [0, 1)
    bool order_preserving = false;

    double image(std::int64_t j) const { return g_points.at(static_cast<std::size_t>(j)); }
};

GridConjugacy grid_conjugacy(const CircleMap& f, const CircleMap& g, int depth, const PrecisionPolicy& policy = {});

struct SmoothnessReport {
    int sn_threshold = 0;
    std::vector<double> deviations;  // d_n for Q_1, Q_2, ...
    std::optional<double> lambda, prefactor, alpha, r2;
    double lambda0 = 0.0;
    std::size_t fit_levels = 0;
    double qs_constant = 0.0;
    std::string classification;  // "zero", "bounded" or "exponential"
};

SmoothnessReport smoothness_report(const GridConjugacy& conj, const FineGrid& grid_f, const FineGrid& grid_g);

void write_grid_csv(std::ostream& out, const FineGrid& grid);
std::string smoothness_to_json(const SmoothnessReport& r);

}  // namespace renormlab
