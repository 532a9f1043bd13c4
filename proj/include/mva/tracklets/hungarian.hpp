#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace mva {

inline constexpr double kForbidden = std::numeric_limits<double>::infinity();

/// Min-cost assignment (Jonker-Volgenant style shortest augmenting paths,
/// O(n^3)). Entries equal to kForbidden are never assigned; among feasible
/// solutions the one with the most real assignments wins, ties decided by
/// total cost. Returns, for each row, the assigned column or -1.
inline std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const int nr = static_cast<int>(cost.rows());
    const int nc = static_cast<int>(cost.cols());
    if (nr == 0 || nc == 0) return std::vector<int>(nr, -1);
    const int n = std::max(nr, nc);

    // Two tiers of big-M on a squared matrix: dummy cells absorb the
    // rectangular imbalance, forbidden cells cost strictly more than any
    // full set of dummies so they are used only when unavoidable (and are
    // stripped from the result).
    double big = 1.0;
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nc; ++c)
            if (std::isfinite(cost(r, c))) big = std::max(big, std::abs(cost(r, c)));
    const double dummy = big * (n + 1) + 1.0;
    const double forbidden = dummy * (n + 1) + 1.0;

    Eigen::MatrixXd a = Eigen::MatrixXd::Constant(n, n, dummy);
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nc; ++c)
            a(r, c) = std::isfinite(cost(r, c)) ? cost(r, c) : forbidden;

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, n), way(n + 1, n);  // p[col] = row, col n is virtual
    for (int r = 0; r < n; ++r) {
        p[n] = r;
        int j0 = n;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = -1;
            for (int j = 0; j < n; ++j) {
                if (used[j]) continue;
                const double cur = a(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != n);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != n);
    }

    std::vector<int> row_to_col(nr, -1);
    for (int c = 0; c < n; ++c) {
        const int r = p[c];
        if (r < nr && c < nc && std::isfinite(cost(r, c))) row_to_col[r] = c;
    }
    return row_to_col;
}

}  // namespace mva
