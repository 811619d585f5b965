#pragma once

#include <vector>

namespace cspat {

/// Dense two-phase simplex for  min c^T x  s.t.  A x = b, x >= 0.
/// Bland's rule throughout, so it terminates on degenerate problems.
/// Sized for the small polyhedral reformulations used here, not for
/// large-scale LP.
struct LpResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

LpResult solve_lp(const std::vector<double>& A, int rows, int cols,
                  const std::vector<double>& b, const std::vector<double>& c);

}  // namespace cspat
