#include "cspat/expander.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cspat/rng.hpp"

namespace cspat {

void MeasurementMatrix::validate() const {
    if (m < 1 || N < 1 || d < 1) throw std::invalid_argument("matrix: m, N, d must be positive");
    if (d > m) throw std::invalid_argument("matrix: cannot place d distinct ones in a column of height m");
    if (static_cast<int>(col_sets.size()) != N || static_cast<int>(row_sets.size()) != m)
        throw std::invalid_argument("matrix: inconsistent index sets");
    std::size_t total = 0;
    for (const auto& col : col_sets) {
        if (static_cast<int>(col.size()) != d)
            throw std::invalid_argument("matrix: column without exactly d ones");
        total += col.size();
    }
    std::size_t row_total = 0;
    for (const auto& row : row_sets) row_total += row.size();
    if (row_total != total) throw std::invalid_argument("matrix: row/column sets disagree");
}

std::vector<double> MeasurementMatrix::dense() const {
    std::vector<double> a(static_cast<std::size_t>(m) * N, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j : row_sets[i]) a[static_cast<std::size_t>(i) * N + j] = 1.0;
    return a;
}

void MeasurementMatrix::apply(const double* x, double* y) const {
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j : row_sets[i]) acc += x[j];
        y[i] = acc;
    }
}

void MeasurementMatrix::apply_transpose(const double* y, double* z) const {
    for (int j = 0; j < N; ++j) {
        double acc = 0.0;
        for (int i : col_sets[j]) acc += y[i];
        z[j] = acc;
    }
}

MeasurementMatrix sample_matrix(int N, int m, int d, std::uint64_t seed) {
    if (d < 1 || m < 1 || N < 1) throw std::invalid_argument("sample_matrix: m, N, d must be positive");
    if (d > m) throw std::invalid_argument("sample_matrix: d > m");
    if (m > static_cast<long long>(N) * d)
        throw std::invalid_argument("sample_matrix: m exceeds N*d (empty measurements guaranteed)");

    MeasurementMatrix A;
    A.m = m;
    A.N = N;
    A.d = d;
    A.seed = seed;
    A.row_sets.assign(m, {});
    A.col_sets.assign(N, {});

    Rng rng(seed);
    std::vector<char> taken(m);
    for (int j = 0; j < N; ++j) {
        // Floyd's subset sampling: uniform over the binom(m, d) subsets.
        std::fill(taken.begin(), taken.end(), 0);
        auto& col = A.col_sets[j];
        for (int t = m - d; t < m; ++t) {
            const int r = rng.uniform_int(0, t);
            if (taken[r]) {
                taken[t] = 1;
                col.push_back(t);
            } else {
                taken[r] = 1;
                col.push_back(r);
            }
        }
        std::sort(col.begin(), col.end());
        for (int i : col) A.row_sets[i].push_back(j);
    }
    return A;
}

std::vector<int> right_vertices(const MeasurementMatrix& A, const std::vector<int>& cols) {
    std::vector<char> seen(A.m, 0);
    for (int j : cols) {
        if (j < 0 || j >= A.N) throw std::invalid_argument("right_vertices: column index out of range");
        for (int i : A.col_sets[j]) seen[i] = 1;
    }
    std::vector<int> out;
    for (int i = 0; i < A.m; ++i)
        if (seen[i]) out.push_back(i);
    return out;
}

namespace {

// Rows of each column as a bitmask over ceil(m/64) words.
std::vector<std::uint64_t> column_masks(const MeasurementMatrix& A, int& words) {
    words = (A.m + 63) / 64;
    std::vector<std::uint64_t> masks(static_cast<std::size_t>(A.N) * words, 0);
    for (int j = 0; j < A.N; ++j)
        for (int i : A.col_sets[j])
            masks[static_cast<std::size_t>(j) * words + i / 64] |= 1ull << (i % 64);
    return masks;
}

struct EnumState {
    const std::vector<std::uint64_t>* masks;
    int words = 0;
    int N = 0;
    int d = 0;
    std::vector<double> worst_ratio;  // per subset size: min |R(J)| / (d |J|)
};

// Depth-first enumeration of all column subsets up to size s_max, carrying
// the union of row masks incrementally.
void enumerate(EnumState& st, int next_col, int size, int max_size,
               std::vector<std::uint64_t>& acc) {
    const int words = st.words;
    for (int j = next_col; j < st.N; ++j) {
        std::vector<std::uint64_t> cur(acc);
        int count = 0;
        const std::uint64_t* mj = st.masks->data() + static_cast<std::size_t>(j) * words;
        for (int w = 0; w < words; ++w) {
            cur[w] |= mj[w];
            count += std::popcount(cur[w]);
        }
        const int sz = size + 1;
        const double ratio = static_cast<double>(count) / (static_cast<double>(st.d) * sz);
        if (ratio < st.worst_ratio[sz - 1]) st.worst_ratio[sz - 1] = ratio;
        if (sz < max_size) enumerate(st, j + 1, sz, max_size, cur);
    }
}

double subset_budget(int N, int s_max) {
    double total = 0.0, c = 1.0;
    for (int k = 1; k <= s_max; ++k) {
        c *= static_cast<double>(N - k + 1) / k;
        total += c;
        if (total > 1e18) return total;
    }
    return total;
}

}  // namespace

ExpansionReport expansion_constants(const MeasurementMatrix& A, int s_max) {
    if (s_max < 1 || s_max > A.N) throw std::invalid_argument("expansion_constants: s_max out of range");
    if (subset_budget(A.N, s_max) > 1e8)
        throw std::invalid_argument("expansion_constants: enumeration budget exceeded");

    EnumState st;
    int words = 0;
    const auto masks = column_masks(A, words);
    st.masks = &masks;
    st.words = words;
    st.N = A.N;
    st.d = A.d;
    st.worst_ratio.assign(s_max, 1.0);

    std::vector<std::uint64_t> empty(words, 0);
    enumerate(st, 0, 0, s_max, empty);

    ExpansionReport report;
    report.s_max = s_max;
    report.theta.resize(s_max);
    double worst = 1.0;
    for (int s = 0; s < s_max; ++s) {
        worst = std::min(worst, st.worst_ratio[s]);
        report.theta[s] = 1.0 - worst;
    }
    return report;
}

ExpanderParameters expander_parameters(int N, int s, double theta, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("expander_parameters: eps in (0, 1/2) required");
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("expander_parameters: theta in (0, 1) required");
    if (s < 1 || s > N) throw std::invalid_argument("expander_parameters: s in [1, N] required");
    const double log_term = std::log(std::exp(1.0) * N / (eps * s));
    ExpanderParameters p;
    p.d = static_cast<int>(std::ceil(log_term / theta));
    p.m_factor = s * log_term;
    return p;
}

double sigma_s_l1(const std::vector<double>& x, int s) {
    if (s >= static_cast<int>(x.size())) return 0.0;
    std::vector<double> mags(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    double tail = 0.0;
    for (std::size_t i = s; i < mags.size(); ++i) tail += mags[i];
    return tail;
}

RecoveryBound recovery_error_bound(const ExpansionReport& report,
                                   const std::vector<double>& x,
                                   const std::vector<double>& x_star,
                                   int s, double eta, int d, double slack) {
    if (x.size() != x_star.size()) throw std::invalid_argument("recovery_error_bound: size mismatch");
    if (2 * s > report.s_max)
        throw std::invalid_argument("recovery_error_bound: report does not cover theta_{2s}");

    RecoveryBound rb;
    rb.theta_2s = report.theta[2 * s - 1];
    if (rb.theta_2s >= 1.0 / 6.0) return rb;  // bound vacuous
    rb.applicable = true;

    for (std::size_t i = 0; i < x.size(); ++i) rb.lhs += std::abs(x[i] - x_star[i]);
    const double t = rb.theta_2s;
    rb.rhs = 2.0 * (1.0 - 2.0 * t) / (1.0 - 6.0 * t) * sigma_s_l1(x, s)
           + 4.0 * eta / ((1.0 - 6.0 * t) * d);
    rb.holds = rb.lhs <= rb.rhs + slack;
    return rb;
}

void save_matrix(const MeasurementMatrix& A, std::ostream& out) {
    out << A.m << ' ' << A.N << ' ' << A.d << ' ' << A.seed << '\n';
    for (int i = 0; i < A.m; ++i) {
        const auto& row = A.row_sets[i];
        for (std::size_t t = 0; t < row.size(); ++t) {
            if (t) out << ' ';
            out << row[t] + 1;
        }
        out << '\n';
    }
}

MeasurementMatrix load_matrix(std::istream& in) {
    MeasurementMatrix A;
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("matrix file: missing header");
    std::istringstream hs(header);
    if (!(hs >> A.m >> A.N >> A.d >> A.seed)) throw std::runtime_error("matrix file: bad header");
    if (A.m < 1 || A.N < 1 || A.d < 1) throw std::runtime_error("matrix file: bad dimensions");
    A.row_sets.assign(A.m, {});
    A.col_sets.assign(A.N, {});
    std::string line;
    for (int i = 0; i < A.m; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("matrix file: missing row line");
        std::istringstream ls(line);
        int j;
        while (ls >> j) {
            if (j < 1 || j > A.N) throw std::runtime_error("matrix file: column index out of range");
            A.row_sets[i].push_back(j - 1);
            A.col_sets[j - 1].push_back(i);
        }
        if (!std::is_sorted(A.row_sets[i].begin(), A.row_sets[i].end()))
            throw std::runtime_error("matrix file: row indices not sorted");
    }
    A.validate();
    return A;
}

}  // namespace cspat
