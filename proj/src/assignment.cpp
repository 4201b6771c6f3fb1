#include "tmot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tmot/error.hpp"

namespace tmot {
namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Augmenting-path search restricted to the equality graph. Rows below
// `first_row` and columns flagged in `blocked` are frozen.
class TightGraphMatcher {
public:
    TightGraphMatcher(const std::vector<std::vector<std::size_t>>& tight, std::vector<std::size_t>& row_to_col,
                      std::vector<std::size_t>& col_to_row, const std::vector<char>& blocked)
        : tight_(tight), row_to_col_(row_to_col), col_to_row_(col_to_row), blocked_(blocked),
          visited_(col_to_row.size(), 0) {}

    bool augment(std::size_t row) {
        for (std::size_t col : tight_[row]) {
            if (blocked_[col] || visited_[col]) {
                continue;
            }
            visited_[col] = 1;
            const std::size_t owner = col_to_row_[col];
            if (owner == kNone || augment(owner)) {
                row_to_col_[row] = col;
                col_to_row_[col] = row;
                return true;
            }
        }
        return false;
    }

private:
    const std::vector<std::vector<std::size_t>>& tight_;
    std::vector<std::size_t>& row_to_col_;
    std::vector<std::size_t>& col_to_row_;
    const std::vector<char>& blocked_;
    std::vector<char> visited_;
};

}  // namespace

LinearAssignment solve_linear_assignment(const CostMatrix& cost) {
    const std::size_t n = cost.n;
    if (cost.values.size() != n * n) {
        throw ConfigError("cost matrix value count does not match n*n");
    }
    LinearAssignment out;
    if (n == 0) {
        return out;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is the virtual root of each search.
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<std::size_t> owner(n + 1, 0);
    std::vector<std::size_t> way(n + 1, 0);
    for (std::size_t row = 1; row <= n; ++row) {
        owner[0] = row;
        std::size_t col0 = 0;
        std::vector<double> min_slack(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[col0] = 1;
            const std::size_t row0 = owner[col0];
            double delta = inf;
            std::size_t col1 = 0;
            for (std::size_t col = 1; col <= n; ++col) {
                if (used[col]) {
                    continue;
                }
                const double reduced = cost(row0 - 1, col - 1) - u[row0] - v[col];
                if (reduced < min_slack[col]) {
                    min_slack[col] = reduced;
                    way[col] = col0;
                }
                if (min_slack[col] < delta) {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for (std::size_t col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
        } while (owner[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
        } while (col0 != 0);
    }

    out.row_to_col.assign(n, kNone);
    for (std::size_t col = 1; col <= n; ++col) {
        out.row_to_col[owner[col] - 1] = col - 1;
    }
    out.row_potential.assign(u.begin() + 1, u.end());
    out.col_potential.assign(v.begin() + 1, v.end());
    for (std::size_t r = 0; r < n; ++r) {
        out.total_cost += cost(r, out.row_to_col[r]);
    }
    return out;
}

std::vector<std::size_t> lexicographic_min_assignment(const CostMatrix& cost, double tolerance) {
    const LinearAssignment base = solve_linear_assignment(cost);
    const std::size_t n = cost.n;
    std::vector<std::size_t> row_to_col = base.row_to_col;
    if (n <= 1) {
        return row_to_col;
    }

    // Every optimal assignment uses only edges with zero reduced cost
    // under the optimal potentials.
    std::vector<std::vector<std::size_t>> tight(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const double reduced = cost(r, c) - base.row_potential[r] - base.col_potential[c];
            if (std::abs(reduced) <= tolerance || c == row_to_col[r]) {
                tight[r].push_back(c);
            }
        }
    }

    std::vector<std::size_t> col_to_row(n, kNone);
    for (std::size_t r = 0; r < n; ++r) {
        col_to_row[row_to_col[r]] = r;
    }
    std::vector<char> frozen(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c : tight[r]) {
            if (c >= row_to_col[r]) {
                break;
            }
            if (frozen[c]) {
                continue;
            }
            const auto saved_rows = row_to_col;
            const auto saved_cols = col_to_row;
            const std::size_t displaced = col_to_row[c];
            col_to_row[row_to_col[r]] = kNone;
            row_to_col[displaced] = kNone;
            row_to_col[r] = c;
            col_to_row[c] = r;

            std::vector<char> blocked = frozen;
            blocked[c] = 1;
            TightGraphMatcher matcher(tight, row_to_col, col_to_row, blocked);
            if (matcher.augment(displaced)) {
                break;
            }
            row_to_col = saved_rows;
            col_to_row = saved_cols;
        }
        frozen[row_to_col[r]] = 1;
    }
    return row_to_col;
}

AssignmentResult solve_assignment(const SimilarityMatrix& sim, double min_similarity) {
    const std::size_t m = sim.rows();
    const std::size_t n = sim.cols();
    AssignmentResult result;
    const std::size_t size = std::max(m, n);

    CostMatrix cost{size, std::vector<double>(size * size, 1.0)};
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            cost.values[r * size + c] = 1.0 - sim(r, c);
        }
    }
    const std::vector<std::size_t> row_to_col = lexicographic_min_assignment(cost);

    std::vector<char> det_matched(n, 0);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t c = row_to_col[r];
        if (c < n && sim(r, c) >= min_similarity) {
            result.matches.emplace_back(r, c);
            det_matched[c] = 1;
        } else {
            result.unmatched_tracks.push_back(r);
        }
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (!det_matched[c]) {
            result.unmatched_dets.push_back(c);
        }
    }
    return result;
}

}  // namespace tmot
