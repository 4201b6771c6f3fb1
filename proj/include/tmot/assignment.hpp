#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "tmot/core.hpp"

namespace tmot {

/// Square cost matrix in row-major order.
struct CostMatrix {
    std::size_t n = 0;
    std::vector<double> values;

    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return values[r * n + c]; }
};

/// Optimal assignment of a square cost matrix together with the dual
/// potentials that certify it (u_r + v_c <= cost(r, c), tight on the
/// assignment).
struct LinearAssignment {
    std::vector<std::size_t> row_to_col;
    std::vector<double> row_potential;
    std::vector<double> col_potential;
    double total_cost = 0.0;
};

/// Hungarian method with potentials, O(n^3).
[[nodiscard]] LinearAssignment solve_linear_assignment(const CostMatrix& cost);

/// Among all minimum-cost assignments, the one whose (row, col) pair list
/// is lexicographically smallest. `tolerance` decides which reduced costs
/// count as zero.
[[nodiscard]] std::vector<std::size_t> lexicographic_min_assignment(const CostMatrix& cost,
                                                                    double tolerance = 1e-9);

struct AssignmentResult {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // (track, detection), ascending track
    std::vector<std::size_t> unmatched_tracks;
    std::vector<std::size_t> unmatched_dets;
};

/// Maximum-similarity matching on cost = 1 - similarity, padded to a
/// square with similarity-0 dummies. Optimal pairs with similarity below
/// `min_similarity` are moved to the unmatched lists afterwards. Ties are
/// broken by lowest (track, detection) lexicographic order.
[[nodiscard]] AssignmentResult solve_assignment(const SimilarityMatrix& sim, double min_similarity);

}  // namespace tmot
