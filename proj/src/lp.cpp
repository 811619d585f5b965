#include "cspat/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cspat {

namespace {

constexpr double kPivotTol = 1e-9;

// Tableau with rows x (cols + 1) layout; the last column is the RHS.
// One reduced-cost row is kept separately.
struct Tableau {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;   // rows x (cols + 1)
    std::vector<double> z;   // cols + 1 (reduced costs, objective in last slot)
    std::vector<int> basis;  // basic column per row

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * (cols + 1) + c]; }

    void pivot(int pr, int pc) {
        const double pv = at(pr, pc);
        for (int c = 0; c <= cols; ++c) at(pr, c) /= pv;
        for (int r = 0; r < rows; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
        }
        const double f = z[pc];
        if (f != 0.0)
            for (int c = 0; c <= cols; ++c) z[c] -= f * at(pr, c);
        basis[pr] = pc;
    }

    // Bland: smallest-index entering column, smallest-index leaving row.
    bool iterate(int allowed_cols) {
        long pivots = 0;
        while (true) {
            if (++pivots > 500000)
                throw std::runtime_error("solve_lp: pivot budget exceeded");
            int pc = -1;
            for (int c = 0; c < allowed_cols; ++c) {
                if (z[c] < -kPivotTol) {
                    pc = c;
                    break;
                }
            }
            if (pc < 0) return true;
            int pr = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < rows; ++r) {
                const double arc = at(r, pc);
                if (arc > kPivotTol) {
                    const double ratio = at(r, cols) / arc;
                    if (ratio < best - 1e-15 ||
                        (std::abs(ratio - best) <= 1e-15 && (pr < 0 || basis[r] < basis[pr]))) {
                        best = ratio;
                        pr = r;
                    }
                }
            }
            if (pr < 0) return false;  // unbounded
            pivot(pr, pc);
        }
    }
};

}  // namespace

LpResult solve_lp(const std::vector<double>& A, int rows, int cols,
                  const std::vector<double>& b, const std::vector<double>& c) {
    if (static_cast<int>(A.size()) != rows * cols || static_cast<int>(b.size()) != rows ||
        static_cast<int>(c.size()) != cols)
        throw std::invalid_argument("solve_lp: inconsistent dimensions");

    Tableau t;
    t.rows = rows;
    t.cols = cols + rows;  // artificials appended
    t.a.assign(static_cast<std::size_t>(rows) * (t.cols + 1), 0.0);
    t.basis.resize(rows);

    for (int r = 0; r < rows; ++r) {
        const double sign = (b[r] < 0.0) ? -1.0 : 1.0;
        for (int j = 0; j < cols; ++j) t.at(r, j) = sign * A[static_cast<std::size_t>(r) * cols + j];
        t.at(r, t.cols) = sign * b[r];
        t.at(r, cols + r) = 1.0;
        t.basis[r] = cols + r;
    }

    // Phase 1: minimize the artificial sum.
    t.z.assign(t.cols + 1, 0.0);
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j <= t.cols; ++j) t.z[j] -= t.at(r, j);
    for (int r = 0; r < rows; ++r) t.z[cols + r] = 0.0;

    if (!t.iterate(t.cols)) return {};  // phase 1 cannot be unbounded in exact arithmetic
    if (-t.z[t.cols] > 1e-7) return {};  // infeasible

    // Drive leftover artificials out of the basis (degenerate rows).
    for (int r = 0; r < rows; ++r) {
        if (t.basis[r] < cols) continue;
        int pc = -1;
        for (int j = 0; j < cols; ++j) {
            if (std::abs(t.at(r, j)) > kPivotTol) {
                pc = j;
                break;
            }
        }
        if (pc >= 0) t.pivot(r, pc);
        // else: redundant constraint, its artificial stays basic at level ~0
    }

    // Phase 2 with the real costs; artificials are excluded from pricing.
    t.z.assign(t.cols + 1, 0.0);
    for (int j = 0; j < cols; ++j) t.z[j] = c[j];
    for (int r = 0; r < rows; ++r) {
        const int bc = t.basis[r];
        if (bc < cols && c[bc] != 0.0) {
            const double f = c[bc];
            for (int j = 0; j <= t.cols; ++j) t.z[j] -= f * t.at(r, j);
        }
    }
    if (!t.iterate(cols)) return {};  // unbounded

    LpResult result;
    result.feasible = true;
    result.x.assign(cols, 0.0);
    for (int r = 0; r < rows; ++r)
        if (t.basis[r] < cols) result.x[t.basis[r]] = t.at(r, t.cols);
    result.objective = 0.0;
    for (int j = 0; j < cols; ++j) result.objective += c[j] * result.x[j];
    return result;
}

}  // namespace cspat
