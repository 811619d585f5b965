#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cspat/expander.hpp"
#include "cspat/rng.hpp"

// Shared test helpers (unit + acceptance).
namespace testutil {

inline cspat::MeasurementMatrix identity_measurement(int n) {
    cspat::MeasurementMatrix A;
    A.m = n;
    A.N = n;
    A.d = 1;
    A.row_sets.assign(n, {});
    A.col_sets.assign(n, {});
    for (int j = 0; j < n; ++j) {
        A.col_sets[j] = {j};
        A.row_sets[j] = {j};
    }
    return A;
}

struct CertifiedSearch {
    bool found = false;
    cspat::MeasurementMatrix matrix;
    cspat::ExpansionReport report;
    std::uint64_t seed = 0;
    int seeds_tried = 0;
};

/// Sample matrices until one has theta_{2s} below the target, certified
/// exhaustively. Exact recovery guarantees need theta_{2s} < 1/6, which a
/// random graph only reaches with many more rows than the nominal
/// compressed-sensing regime; callers escalate (d, m) schedules.
inline CertifiedSearch find_certified_matrix(int N, int m, int d, int s, double theta_target,
                                             int seed_budget, std::uint64_t seed0 = 1) {
    CertifiedSearch result;
    for (int t = 0; t < seed_budget; ++t) {
        const std::uint64_t seed = seed0 + t;
        const cspat::MeasurementMatrix A = cspat::sample_matrix(N, m, d, seed);
        const cspat::ExpansionReport report = cspat::expansion_constants(A, 2 * s);
        ++result.seeds_tried;
        if (report.theta[2 * s - 1] < theta_target) {
            result.found = true;
            result.matrix = A;
            result.report = report;
            result.seed = seed;
            return result;
        }
    }
    return result;
}

/// Random s-sparse vector with magnitudes in [0.5, 2] and random signs.
inline std::vector<double> random_sparse(int N, int s, std::uint64_t seed) {
    cspat::Rng rng(seed);
    std::vector<double> x(N, 0.0);
    std::vector<int> support;
    while (static_cast<int>(support.size()) < s) {
        const int j = rng.uniform_int(0, N - 1);
        bool fresh = true;
        for (int k : support)
            if (k == j) fresh = false;
        if (fresh) support.push_back(j);
    }
    for (int j : support) {
        const double mag = rng.uniform(0.5, 2.0);
        x[j] = rng.uniform01() < 0.5 ? -mag : mag;
    }
    return x;
}

}  // namespace testutil
