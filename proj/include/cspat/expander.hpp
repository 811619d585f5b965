#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cspat {

/// Zero/one measurement matrix with exactly d ones per column, stored as
/// the adjacency of a left d-regular bipartite graph: row_sets[i] holds the
/// columns hit by measurement i, col_sets[j] the rows containing column j.
struct MeasurementMatrix {
    int m = 0;  // rows (measurements)
    int N = 0;  // columns (detectors)
    int d = 0;  // ones per column
    std::uint64_t seed = 0;
    std::vector<std::vector<int>> row_sets;  // J_i, sorted
    std::vector<std::vector<int>> col_sets;  // sorted, each of size d

    int row_degree(int i) const { return static_cast<int>(row_sets[i].size()); }

    /// Dense row-major copy (m x N), used by the iterative solvers.
    std::vector<double> dense() const;

    /// y = A x for x of length N.
    void apply(const double* x, double* y) const;
    /// z = A^T y for y of length m.
    void apply_transpose(const double* y, double* z) const;

    void validate() const;
};

struct ExpansionReport {
    int s_max = 0;
    std::vector<double> theta;  // theta[s-1] = s-th restricted expansion constant
};

/// Draw each column's d row indices uniformly among the binom(m, d) subsets,
/// independently across columns. Deterministic for a given seed.
MeasurementMatrix sample_matrix(int N, int m, int d, std::uint64_t seed);

/// Set of rows reachable from the given columns (union of their col_sets).
std::vector<int> right_vertices(const MeasurementMatrix& A, const std::vector<int>& cols);

/// Exact restricted expansion constants theta_1..theta_s_max by exhaustive
/// enumeration of column subsets. Refuses when the subset count exceeds
/// the enumeration budget (1e8).
ExpansionReport expansion_constants(const MeasurementMatrix& A, int s_max);

/// Sufficient (d, m) shape for a random graph to expand with probability
/// 1 - eps: d as the ceiled logarithmic formula and the factor
/// s * ln(e N / (eps s)) that m must be proportional to. The proportionality
/// constant depends only on theta and is reported by name, not invented.
struct ExpanderParameters {
    int d = 0;
    double m_factor = 0.0;  // m >= c_theta * m_factor for an unspecified c_theta
};

ExpanderParameters expander_parameters(int N, int s, double theta, double eps);

/// Evaluation of the stable-recovery bound
///   |x - x*|_1 <= 2(1-2t)/(1-6t) sigma_s(x)_1 + 4 eta / ((1-6t) d),
/// with t = theta_{2s} taken from the report. `slack` absorbs solver
/// round-off when comparing lhs <= rhs (the bound itself concerns exact
/// minimizers).
struct RecoveryBound {
    bool applicable = false;  // false when theta_{2s} >= 1/6
    double theta_2s = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

RecoveryBound recovery_error_bound(const ExpansionReport& report,
                                   const std::vector<double>& x,
                                   const std::vector<double>& x_star,
                                   int s, double eta, int d, double slack = 0.0);

/// Best s-term approximation error in l1: sum of all but the s largest
/// magnitudes.
double sigma_s_l1(const std::vector<double>& x, int s);

/// Text format: header "m N d seed", then one line per row with the sorted
/// 1-based column indices of that row.
void save_matrix(const MeasurementMatrix& A, std::ostream& out);
MeasurementMatrix load_matrix(std::istream& in);

}  // namespace cspat
