#include "dexgrasp/lp.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace dexgrasp {

namespace {

constexpr double kEps = 1e-9;

// Tableau with rows = constraints, columns = variables plus the rhs in the
// last column. `basis[r]` is the variable currently basic in row r.
struct Tableau {
    MatX t;  // m x (n + 1)
    std::vector<int> basis;

    int rows() const { return static_cast<int>(t.rows()); }
    int cols() const { return static_cast<int>(t.cols()) - 1; }

    void pivot(int row, int col) {
        t.row(row) /= t(row, col);
        for (int r = 0; r < rows(); ++r) {
            if (r == row || std::abs(t(r, col)) < 1e-14) continue;
            t.row(r) -= t(r, col) * t.row(row);
        }
        basis[row] = col;
    }
};

// Minimizes obj^T x over the tableau with Bland's rule. Returns false when
// unbounded. `active` marks columns allowed to enter.
bool simplex(Tableau& tab, VecX obj, int max_iterations, const std::vector<bool>& active) {
    const int m = tab.rows(), n = tab.cols();
    // Reduced costs: start from obj, eliminate basic columns.
    VecX red = obj;
    double shift = 0;
    for (int r = 0; r < m; ++r) {
        const double cb = red[tab.basis[r]];
        if (std::abs(cb) < 1e-14) continue;
        red -= cb * tab.t.row(r).head(n).transpose();
        shift += cb * tab.t(r, n);
    }
    (void)shift;

    for (int it = 0; it < max_iterations; ++it) {
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (!active[j]) continue;
            if (red[j] < -kEps) {
                enter = j;  // Bland: lowest index
                break;
            }
        }
        if (enter < 0) return true;  // optimal

        int leave = -1;
        double best_ratio = 0;
        for (int r = 0; r < m; ++r) {
            const double a = tab.t(r, enter);
            if (a <= kEps) continue;
            const double ratio = tab.t(r, n) / a;
            if (leave < 0 || ratio < best_ratio - 1e-12 ||
                (std::abs(ratio - best_ratio) <= 1e-12 && tab.basis[r] < tab.basis[leave])) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return false;  // unbounded

        tab.pivot(leave, enter);
        // Update reduced costs.
        const double re = red[enter];
        red -= re * tab.t.row(leave).head(n).transpose();
        red[enter] = 0;
    }
    return true;  // iteration cap: treat current point as the answer
}

}  // namespace

LpResult solve_lp(const MatX& A, const VecX& b, const VecX& c, int max_iterations) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());

    Tableau tab;
    tab.t.resize(m, n + m + 1);
    tab.t.block(0, 0, m, n) = A;
    tab.t.col(n + m) = b;
    for (int r = 0; r < m; ++r) {
        if (tab.t(r, n + m) < 0) tab.t.row(r) = -tab.t.row(r);
    }
    tab.t.block(0, n, m, m) = MatX::Identity(m, m);
    tab.basis.resize(m);
    std::iota(tab.basis.begin(), tab.basis.end(), n);

    LpResult out;

    // Phase 1: minimize the sum of artificials.
    {
        VecX obj = VecX::Zero(n + m);
        obj.tail(m).setOnes();
        std::vector<bool> active(n + m, true);
        simplex(tab, obj, max_iterations, active);
        double artificial_sum = 0;
        for (int r = 0; r < m; ++r)
            if (tab.basis[r] >= n) artificial_sum += tab.t(r, n + m);
        if (artificial_sum > 1e-7) {
            out.feasible = false;
            return out;
        }
        // Drive remaining artificials out of the basis where possible.
        for (int r = 0; r < m; ++r) {
            if (tab.basis[r] < n) continue;
            int col = -1;
            for (int j = 0; j < n; ++j) {
                if (std::abs(tab.t(r, j)) > 1e-7) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) tab.pivot(r, col);
            // Otherwise the row is redundant; the artificial stays at zero.
        }
    }

    // Phase 2: minimize -c over the original columns only.
    {
        VecX obj = VecX::Zero(n + m);
        obj.head(n) = -c;
        std::vector<bool> active(n + m, false);
        for (int j = 0; j < n; ++j) active[j] = true;
        if (!simplex(tab, obj, max_iterations, active)) {
            out.feasible = true;
            out.bounded = false;
            return out;
        }
    }

    out.feasible = true;
    out.x = VecX::Zero(n);
    for (int r = 0; r < m; ++r)
        if (tab.basis[r] < n) out.x[tab.basis[r]] = tab.t(r, n + m);
    out.objective = c.dot(out.x);
    return out;
}

}  // namespace dexgrasp
