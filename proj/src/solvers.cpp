#include "cspat/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "cspat/lp.hpp"
#include "cspat/rng.hpp"

namespace cspat {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

}  // namespace

CompressedData measure(const MeasurementMatrix& A, const Sinogram& sino) {
    if (A.N != sino.geometry.num_detectors)
        throw std::invalid_argument("measure: matrix columns must match detector count");
    CompressedData y;
    y.matrix = A;
    y.geometry = sino.geometry;
    y.kind = sino.kind;
    const int n_r = sino.geometry.num_radial;
    y.values.assign(static_cast<std::size_t>(A.m) * n_r, 0.0);
    for (int i = 0; i < A.m; ++i) {
        double* out = y.values.data() + static_cast<std::size_t>(i) * n_r;
        for (int j : A.row_sets[i]) {
            const double* row = sino.row(j);
            for (int k = 0; k < n_r; ++k) out[k] += row[k];
        }
    }
    return y;
}

CompressedData add_noise(const CompressedData& y, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be nonnegative");
    CompressedData out = y;
    out.sigma = sigma;
    out.noise_seed = seed;
    if (sigma == 0.0) return out;

    Rng rng(seed);
    const int n_r = y.geometry.num_radial;
    const int N = y.matrix.N;
    std::vector<double> eta(N);
    for (int k = 0; k < n_r; ++k) {
        for (int j = 0; j < N; ++j) eta[j] = sigma * rng.normal();
        for (int i = 0; i < y.matrix.m; ++i) {
            double acc = 0.0;
            for (int j : y.matrix.row_sets[i]) acc += eta[j];
            out.at(i, k) += acc;
        }
    }
    return out;
}

void transform_measurements(CompressedData& y, FilterKind kind) {
    SinogramKind out_kind = y.kind;
    switch (kind) {
        case FilterKind::fbp_filter:
        case FilterKind::sparsifier:
            if (y.kind != SinogramKind::spherical_means)
                throw std::invalid_argument(
                    "transform_measurements: spherical_means input required");
            out_kind = (kind == FilterKind::fbp_filter) ? SinogramKind::filtered
                                                        : SinogramKind::sparsified;
            break;
        case FilterKind::abel_forward:
            if (y.kind != SinogramKind::spherical_means)
                throw std::invalid_argument(
                    "transform_measurements: spherical_means input required");
            out_kind = SinogramKind::pressure;
            break;
        case FilterKind::abel_inverse:
            if (y.kind != SinogramKind::pressure)
                throw std::invalid_argument("transform_measurements: pressure input required");
            out_kind = SinogramKind::spherical_means;
            break;
        default:
            break;
    }
    apply_filter_rows(kind, y.values.data(), y.matrix.m, y.geometry.num_radial,
                      y.geometry.radial_step());
    y.kind = out_kind;
}

// ---------------------------------------------------------------------------
// Taut string
// ---------------------------------------------------------------------------

namespace {

struct Pt {
    int x;
    double y;
};

// slope(a,b) >= slope(b,c) for a.x < b.x < c.x, cross-multiplied.
inline bool slope_ge(const Pt& a, const Pt& b, const Pt& c) {
    return (b.y - a.y) * (c.x - b.x) >= (c.y - b.y) * (b.x - a.x);
}

inline double slope(const Pt& a, const Pt& b) { return (b.y - a.y) / (b.x - a.x); }

// Reusable buffers: the periodic prox and the completion loop call the
// taut string many thousands of times.
struct TautWorkspace {
    std::vector<double> upper, lower, s;
    std::vector<Pt> ceil_chain, floor_chain, path;
    std::vector<double> q_try;
};

// Geodesic through the tube lower[k] <= S(k) <= upper[k] with pinned
// endpoints (funnel algorithm); chains are index-fronted vectors.
void taut_string_path(TautWorkspace& ws, int n) {
    const std::vector<double>& upper = ws.upper;
    const std::vector<double>& lower = ws.lower;
    Pt apex{0, upper[0]};
    ws.ceil_chain.clear();   // lower convex hull of ceiling points (slopes increasing)
    ws.floor_chain.clear();  // upper concave hull of floor points (slopes decreasing)
    ws.path.clear();
    ws.path.push_back(apex);
    std::size_t ceil_head = 0, floor_head = 0;

    auto add = [&](Pt p, bool is_ceiling) {
        std::vector<Pt>& own = is_ceiling ? ws.ceil_chain : ws.floor_chain;
        std::size_t& own_head = is_ceiling ? ceil_head : floor_head;
        std::vector<Pt>& other = is_ceiling ? ws.floor_chain : ws.ceil_chain;
        std::size_t& other_head = is_ceiling ? floor_head : ceil_head;

        while (own.size() > own_head) {
            const Pt prev = own.size() - own_head >= 2 ? own[own.size() - 2] : apex;
            const Pt last = own.back();
            const bool pop = is_ceiling ? slope_ge(prev, last, p) : slope_ge(p, last, prev);
            if (!pop) break;
            own.pop_back();
        }
        if (own.size() == own_head) {
            // Funnel may close: the new tangent from the apex can cross the
            // other chain, fixing path vertices along it.
            while (other.size() > other_head) {
                const double s_new = slope(apex, p);
                const double s_other = slope(apex, other[other_head]);
                const bool crossed = is_ceiling ? (s_new < s_other) : (s_new > s_other);
                if (!crossed) break;
                apex = other[other_head];
                ++other_head;
                ws.path.push_back(apex);
            }
            own_head = own.size();  // chain is empty; reset the window
        }
        own.push_back(p);
    };

    for (int k = 1; k < n; ++k) {
        add({k, upper[k]}, true);
        add({k, lower[k]}, false);
    }
    add({n, upper[n]}, true);
    add({n, lower[n]}, false);
    ws.path.push_back({n, upper[n]});

    ws.s.resize(n + 1);
    ws.s[0] = upper[0];
    for (std::size_t seg = 0; seg + 1 < ws.path.size(); ++seg) {
        const Pt a = ws.path[seg], b = ws.path[seg + 1];
        if (b.x == a.x) continue;
        const double sl = slope(a, b);
        for (int k = a.x; k <= b.x; ++k) ws.s[k] = a.y + sl * (k - a.x);
    }
    ws.s[n] = upper[n];
}

// Exact minimizer of 1/2 ||q - v||^2 + w * sum_{j<n-1} |q_{j+1} - q_j|,
// with the first/last sample shifted by -c/+c (used by the periodic case;
// c = 0 is the plain problem).
void tv_prox_line_shifted_ws(TautWorkspace& ws, const double* v, int n, double w, double c,
                             double* q) {
    if (n == 1) {
        q[0] = v[0];
        return;
    }
    ws.upper.resize(n + 1);
    ws.lower.resize(n + 1);
    double cumulative = 0.0;
    ws.upper[0] = ws.lower[0] = 0.0;
    for (int k = 0; k < n; ++k) {
        cumulative += v[k];
        if (k == 0) cumulative -= c;
        if (k == n - 1) cumulative += c;
        ws.upper[k + 1] = cumulative + w;
        ws.lower[k + 1] = cumulative - w;
    }
    ws.upper[n] = ws.lower[n] = cumulative;
    taut_string_path(ws, n);
    for (int k = 0; k < n; ++k) q[k] = ws.s[k + 1] - ws.s[k];
}

void tv_prox_line_ws(TautWorkspace& ws, const double* v, int n, double w, double* q) {
    tv_prox_line_shifted_ws(ws, v, n, w, 0.0, q);
}

std::vector<double> tv_prox_line(const std::vector<double>& v, double w) {
    std::vector<double> q(v.size());
    if (v.empty()) return q;
    TautWorkspace ws;
    tv_prox_line_ws(ws, v.data(), static_cast<int>(v.size()), w, q.data());
    return q;
}

double tv_line(const std::vector<double>& q) {
    double tv = 0.0;
    for (std::size_t j = 0; j + 1 < q.size(); ++j) tv += std::abs(q[j + 1] - q[j]);
    return tv;
}

// Periodic case: the wrap edge w |q_0 - q_{n-1}| is dualized as
// max_{|c|<=w} c (q_0 - q_{n-1}). The dual function
//   g(c) = min_q 1/2 ||q-v||^2 + w TV_line(q) + c (q_0 - q_{n-1})
// is concave with supergradient phi(c) = q_c[0] - q_c[n-1], where q_c is
// the line taut string of the input shifted by -c e_0 + c e_{n-1}.
// phi is nonincreasing and piecewise linear in c; regula falsi lands on
// the root of the active linear piece, with bisection interleaved so the
// bracket provably collapses. The root's primal solution solves the
// periodic problem.
void tv_prox_periodic_ws(TautWorkspace& ws, const double* v, int n, double w, double* q) {
    if (n == 1) {
        q[0] = v[0];
        return;
    }
    if (n == 2) {  // chain edge and wrap edge coincide
        tv_prox_line_ws(ws, v, n, 2.0 * w, q);
        return;
    }

    auto solve_at = [&](double c, double* out) {
        tv_prox_line_shifted_ws(ws, v, n, w, c, out);
        return out[0] - out[n - 1];
    };

    ws.q_try.resize(n);
    std::vector<double>& q_try = ws.q_try;
    // c = 0 first: when the line solution already closes the wrap (flat
    // columns mostly), one taut string settles it.
    const double f_zero = solve_at(0.0, q);
    if (f_zero == 0.0) return;
    double lo, hi, f_lo, f_hi;
    if (f_zero > 0.0) {
        lo = 0.0;
        f_lo = f_zero;
        hi = w;
        f_hi = solve_at(hi, q_try.data());
        if (f_hi >= 0.0) {
            std::copy(q_try.begin(), q_try.end(), q);
            return;
        }
    } else {
        hi = 0.0;
        f_hi = f_zero;
        lo = -w;
        f_lo = solve_at(lo, q);
        if (f_lo <= 0.0) return;  // maximizer at the boundary
    }

    const double tol = 1e-12 * std::max(1.0, w);
    double checkpoint_width = hi - lo;
    int since_checkpoint = 0;
    bool force_bisection = false;
    for (int it = 0; it < 160 && hi - lo > tol; ++it) {
        double c;
        if (force_bisection) {
            c = 0.5 * (lo + hi);
            force_bisection = false;
        } else {
            c = lo + f_lo * (hi - lo) / (f_lo - f_hi);
            if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
        }
        // regula falsi can crawl along one end; bisect when the bracket
        // stops contracting
        if (++since_checkpoint >= 2) {
            if (hi - lo > 0.7 * checkpoint_width) force_bisection = true;
            checkpoint_width = hi - lo;
            since_checkpoint = 0;
        }
        const double f_c = solve_at(c, q_try.data());
        if (f_c == 0.0) {
            std::copy(q_try.begin(), q_try.end(), q);
            return;
        }
        if (f_c > 0.0) {
            lo = c;
            f_lo = f_c;
        } else {
            hi = c;
            f_hi = f_c;
        }
    }
    solve_at(0.5 * (lo + hi), q);
}

}  // namespace

std::vector<double> tv_prox(const std::vector<double>& v, double weight, bool periodic) {
    if (!(weight > 0.0)) throw std::invalid_argument("tv_prox: weight must be positive");
    if (v.empty()) return v;
    std::vector<double> q(v.size());
    TautWorkspace ws;
    if (periodic)
        tv_prox_periodic_ws(ws, v.data(), static_cast<int>(v.size()), weight, q.data());
    else
        tv_prox_line_ws(ws, v.data(), static_cast<int>(v.size()), weight, q.data());
    return q;
}

// ---------------------------------------------------------------------------
// FISTA for TV-regularized least squares
// ---------------------------------------------------------------------------

double operator_norm_sq(const MeasurementMatrix& A, int iters) {
    std::vector<double> v(A.N), av(A.m), w(A.N);
    for (int j = 0; j < A.N; ++j) v[j] = 1.0 + 0.5 * std::sin(j + 1.0);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        A.apply(v.data(), av.data());
        A.apply_transpose(av.data(), w.data());
        double nrm = 0.0;
        for (double x : w) nrm += x * x;
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) return 0.0;
        for (int j = 0; j < A.N; ++j) v[j] = w[j] / nrm;
        lambda = nrm;
    }
    // after normalization ||A v||^2 is the Rayleigh quotient
    A.apply(v.data(), av.data());
    double out = 0.0;
    for (double x : av) out += x * x;
    return std::max(out, lambda);
}

namespace {

// Dense row-major operator; the completion cost model is the dense
// matrix-vector product, O(m N) per application.
struct DenseOp {
    int m = 0, N = 0;
    std::vector<double> a;

    explicit DenseOp(const MeasurementMatrix& A) : m(A.m), N(A.N), a(A.dense()) {}

    void apply(const double* x, double* y) const {
        for (int i = 0; i < m; ++i) {
            const double* row = a.data() + static_cast<std::size_t>(i) * N;
            double acc = 0.0;
            for (int j = 0; j < N; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
    }

    void apply_transpose(const double* y, double* z) const {
        std::fill(z, z + N, 0.0);
        for (int i = 0; i < m; ++i) {
            const double* row = a.data() + static_cast<std::size_t>(i) * N;
            const double yi = y[i];
            if (yi == 0.0) continue;
            for (int j = 0; j < N; ++j) z[j] += yi * row[j];
        }
    }
};

double tv_value(const std::vector<double>& q, bool periodic) {
    double tv = tv_line(q);
    if (periodic && q.size() > 1) tv += std::abs(q.front() - q.back());
    return tv;
}

std::pair<std::vector<double>, SolverReport> fista_tv_prepared(
    const DenseOp& op, const std::vector<double>& b, double lambda, bool periodic,
    const SolverOptions& opts, double norm_sq) {
    const int N = op.N;
    const int m = op.m;
    const double tv_weight = lambda * 2.0 * M_PI / N;
    const double L = std::max(2.0 * 1.01 * norm_sq, 1e-12);

    // Images A q and A y are carried along by linearity, so each iteration
    // costs one forward and one transpose product.
    std::vector<double> q(N, 0.0), q_prev(N), y(N, 0.0), step(N), grad(N);
    std::vector<double> a_q(m, 0.0), a_q_prev(m), a_y(m, 0.0), a_z(m), residual(m);
    TautWorkspace ws;

    auto objective_from = [&](const std::vector<double>& x, const std::vector<double>& ax) {
        double f = 0.0;
        for (int i = 0; i < m; ++i) {
            const double r = ax[i] - b[i];
            f += r * r;
        }
        return f + tv_weight * tv_value(x, periodic);
    };
    auto prox_from = [&](const std::vector<double>& point, const std::vector<double>& a_point,
                         std::vector<double>& z_out) {
        for (int i = 0; i < m; ++i) residual[i] = a_point[i] - b[i];
        op.apply_transpose(residual.data(), grad.data());
        for (int j = 0; j < N; ++j) step[j] = point[j] - 2.0 * grad[j] / L;
        z_out.resize(N);
        if (periodic)
            tv_prox_periodic_ws(ws, step.data(), N, tv_weight / L, z_out.data());
        else
            tv_prox_line_ws(ws, step.data(), N, tv_weight / L, z_out.data());
    };

    SolverReport report;
    report.objective_trace.reserve(opts.max_iter);
    double f_q = objective_from(q, a_q);
    std::vector<double> best = q;
    std::vector<double> z(N);
    double f_best = f_q;
    double t = 1.0;

    for (int it = 1; it <= opts.max_iter; ++it) {
        prox_from(y, a_y, z);
        op.apply(z.data(), a_z.data());
        double f_z = objective_from(z, a_z);
        if (f_z > f_q) {  // momentum overshoot: restart from the last iterate
            t = 1.0;
            y = q;
            a_y = a_q;
            prox_from(y, a_y, z);
            op.apply(z.data(), a_z.data());
            f_z = objective_from(z, a_z);
        }
        q_prev.swap(q);
        q.swap(z);
        a_q_prev.swap(a_q);
        a_q.swap(a_z);
        f_q = f_z;
        if (f_z < f_best) {
            f_best = f_z;
            best = q;
        }
        report.objective_trace.push_back(f_best);
        report.iterations = it;

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / t_next;
        for (int j = 0; j < N; ++j) y[j] = q[j] + momentum * (q[j] - q_prev[j]);
        for (int i = 0; i < m; ++i) a_y[i] = a_q[i] + momentum * (a_q[i] - a_q_prev[i]);
        t = t_next;

        if (!opts.fixed_iters) {
            double dq = 0.0, qs = 0.0;
            for (int j = 0; j < N; ++j) {
                dq = std::max(dq, std::abs(q[j] - q_prev[j]));
                qs = std::max(qs, std::abs(q[j]));
            }
            if (dq <= opts.tol * std::max(1.0, qs)) {
                report.converged = true;
                break;
            }
        }
    }

    report.objective = f_best;
    op.apply(best.data(), a_z.data());
    double res = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r = a_z[i] - b[i];
        res += r * r;
    }
    report.residual = std::sqrt(res);
    return {std::move(best), report};
}

}  // namespace

std::pair<std::vector<double>, SolverReport> fista_tv(const TVProblem& problem,
                                                      const SolverOptions& opts) {
    if (!problem.A) throw std::invalid_argument("fista_tv: missing matrix");
    if (!(problem.lambda > 0.0)) throw std::invalid_argument("fista_tv: lambda must be positive");
    if (static_cast<int>(problem.b.size()) != problem.A->m)
        throw std::invalid_argument("fista_tv: rhs size mismatch");
    SolverOptions local = opts;
    if (local.max_iter == 5000) local.max_iter = 100;  // iteration guidance for FISTA
    const DenseOp op(*problem.A);
    const double norm_sq = opts.lipschitz > 0.0 ? opts.lipschitz : operator_norm_sq(*problem.A);
    return fista_tv_prepared(op, problem.b, problem.lambda, problem.periodic, local, norm_sq);
}

// ---------------------------------------------------------------------------
// Basis pursuit
// ---------------------------------------------------------------------------

namespace {

std::vector<double> project_l1_ball(std::vector<double> v, double radius) {
    if (radius <= 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        return v;
    }
    double l1 = 0.0;
    for (double x : v) l1 += std::abs(x);
    if (l1 <= radius) return v;
    std::vector<double> mags(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    double acc = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k) {
        acc += mags[k];
        const double candidate = (acc - radius) / static_cast<double>(k + 1);
        if (k + 1 == mags.size() || candidate >= mags[k + 1]) {
            tau = candidate;
            break;
        }
    }
    for (double& x : v) x = soft_threshold(x, tau);
    return v;
}

double residual_l1(const MeasurementMatrix& A, const std::vector<double>& q,
                   const std::vector<double>& b) {
    std::vector<double> aq(A.m);
    A.apply(q.data(), aq.data());
    double r = 0.0;
    for (int i = 0; i < A.m; ++i) r += std::abs(aq[i] - b[i]);
    return r;
}

double norm_l1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

// Equality-constrained path: row-reduce [A | b] and solve the l1 problem as
// an LP over the independent rows. Exact for any m once the system is
// consistent.
std::pair<std::vector<double>, SolverReport> basis_pursuit_equality_lp(
    const MeasurementMatrix& A, const std::vector<double>& b) {
    const int m = A.m, N = A.N;
    std::vector<double> M(static_cast<std::size_t>(m) * (N + 1), 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j : A.row_sets[i]) M[static_cast<std::size_t>(i) * (N + 1) + j] = 1.0;
        M[static_cast<std::size_t>(i) * (N + 1) + N] = b[i];
    }

    auto row = [&](int i) { return M.data() + static_cast<std::size_t>(i) * (N + 1); };
    int rank = 0;
    for (int col = 0; col < N && rank < m; ++col) {
        int pivot = -1;
        double best = 1e-9;
        for (int i = rank; i < m; ++i) {
            if (std::abs(row(i)[col]) > best) {
                best = std::abs(row(i)[col]);
                pivot = i;
            }
        }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (int c = 0; c <= N; ++c) std::swap(row(pivot)[c], row(rank)[c]);
        const double pv = row(rank)[col];
        for (int i = rank + 1; i < m; ++i) {
            const double f = row(i)[col] / pv;
            if (f == 0.0) continue;
            for (int c = col; c <= N; ++c) row(i)[c] -= f * row(rank)[c];
        }
        ++rank;
    }

    SolverReport report;
    const double b_scale = std::max(1.0, max_abs(b));
    for (int i = rank; i < m; ++i) {
        if (std::abs(row(i)[N]) > 1e-9 * b_scale) {
            report.converged = false;  // inconsistent system, no preimage
            return {std::vector<double>(N, 0.0), report};
        }
    }

    // LP over split variables q = q+ - q-.
    std::vector<double> lp_a(static_cast<std::size_t>(rank) * 2 * N);
    std::vector<double> lp_b(rank);
    for (int i = 0; i < rank; ++i) {
        for (int j = 0; j < N; ++j) {
            lp_a[static_cast<std::size_t>(i) * 2 * N + j] = row(i)[j];
            lp_a[static_cast<std::size_t>(i) * 2 * N + N + j] = -row(i)[j];
        }
        lp_b[i] = row(i)[N];
    }
    std::vector<double> cost(2 * N, 1.0);
    const LpResult lr = solve_lp(lp_a, rank, 2 * N, lp_b, cost);
    if (!lr.feasible) {
        report.converged = false;
        return {std::vector<double>(N, 0.0), report};
    }
    std::vector<double> q(N);
    for (int j = 0; j < N; ++j) q[j] = lr.x[j] - lr.x[N + j];
    report.converged = true;
    report.objective = norm_l1(q);
    report.residual = residual_l1(A, q, b);
    return {std::move(q), report};
}

// Full polyhedral form for eta > 0: residual split into r+ - r- with
// sum(r+ + r-) + slack = eta.
std::pair<std::vector<double>, SolverReport> basis_pursuit_inequality_lp(
    const MeasurementMatrix& A, const std::vector<double>& b, double eta) {
    const int m = A.m, N = A.N;
    const int cols = 2 * N + 2 * m + 1;
    const int rows = m + 1;
    std::vector<double> lp_a(static_cast<std::size_t>(rows) * cols, 0.0);
    std::vector<double> lp_b(rows, 0.0);
    auto at = [&](int r, int c) -> double& { return lp_a[static_cast<std::size_t>(r) * cols + c]; };
    for (int i = 0; i < m; ++i) {
        for (int j : A.row_sets[i]) {
            at(i, j) = 1.0;
            at(i, N + j) = -1.0;
        }
        at(i, 2 * N + i) = -1.0;
        at(i, 2 * N + m + i) = 1.0;
        lp_b[i] = b[i];
    }
    for (int i = 0; i < m; ++i) {
        at(m, 2 * N + i) = 1.0;
        at(m, 2 * N + m + i) = 1.0;
    }
    at(m, 2 * N + 2 * m) = 1.0;
    lp_b[m] = eta;

    std::vector<double> cost(cols, 0.0);
    for (int j = 0; j < 2 * N; ++j) cost[j] = 1.0;

    SolverReport report;
    const LpResult lr = solve_lp(lp_a, rows, cols, lp_b, cost);
    if (!lr.feasible) {
        report.converged = false;
        return {std::vector<double>(N, 0.0), report};
    }
    std::vector<double> q(N);
    for (int j = 0; j < N; ++j) q[j] = lr.x[j] - lr.x[N + j];
    report.converged = true;
    report.objective = norm_l1(q);
    report.residual = residual_l1(A, q, b);
    return {std::move(q), report};
}

// Linearized ADMM on  min ||q||_1 + I{||r||_1 <= eta}  s.t.  r = A q - b.
// Basis pursuit is positively homogeneous, so the data is normalized to
// unit sup-norm first; the step sizes are then scale-free.
std::pair<std::vector<double>, SolverReport> basis_pursuit_admm(
    const MeasurementMatrix& A, const std::vector<double>& b_raw, double eta_raw,
    const SolverOptions& opts) {
    const int m = A.m, N = A.N;
    const double b_scale = max_abs(b_raw);
    if (b_scale == 0.0) {
        SolverReport report;
        report.converged = true;
        return {std::vector<double>(N, 0.0), report};
    }
    std::vector<double> b(b_raw);
    for (double& x : b) x /= b_scale;
    const double eta = eta_raw / b_scale;

    const double norm_sq = opts.lipschitz > 0.0 ? opts.lipschitz : operator_norm_sq(A);
    const double rho = 1.0;
    const double mu = 1.01 * rho * std::max(norm_sq, 1e-12);

    std::vector<double> q(N, 0.0), r(m, 0.0), u(m, 0.0);
    std::vector<double> aq(m, 0.0), tmp(m), grad(N);
    SolverReport report;

    for (int it = 1; it <= opts.max_iter; ++it) {
        for (int i = 0; i < m; ++i) tmp[i] = aq[i] - b[i] - r[i] + u[i];
        A.apply_transpose(tmp.data(), grad.data());
        double dq = 0.0, q_scale = 0.0;
        for (int j = 0; j < N; ++j) {
            const double next = soft_threshold(q[j] - (rho / mu) * grad[j], 1.0 / mu);
            dq = std::max(dq, std::abs(next - q[j]));
            q[j] = next;
            q_scale = std::max(q_scale, std::abs(next));
        }
        A.apply(q.data(), aq.data());
        for (int i = 0; i < m; ++i) tmp[i] = aq[i] - b[i] + u[i];
        r = project_l1_ball(tmp, eta);
        double primal = 0.0;
        for (int i = 0; i < m; ++i) {
            const double gap = aq[i] - b[i] - r[i];
            u[i] += gap;
            primal = std::max(primal, std::abs(gap));
        }
        report.iterations = it;
        report.objective_trace.push_back(b_scale * norm_l1(q));
        if (!opts.fixed_iters && primal <= opts.tol &&
            dq <= opts.tol * std::max(1.0, q_scale)) {
            report.converged = true;
            break;
        }
    }
    for (double& x : q) x *= b_scale;
    report.objective = norm_l1(q);
    report.residual = residual_l1(A, q, b_raw);
    return {std::move(q), report};
}

}  // namespace

std::pair<std::vector<double>, SolverReport> basis_pursuit(const BasisPursuitProblem& problem,
                                                           const SolverOptions& opts) {
    if (!problem.A) throw std::invalid_argument("basis_pursuit: missing matrix");
    if (problem.eta < 0.0) throw std::invalid_argument("basis_pursuit: eta must be nonnegative");
    const MeasurementMatrix& A = *problem.A;
    if (static_cast<int>(problem.b.size()) != A.m)
        throw std::invalid_argument("basis_pursuit: rhs size mismatch");

    if (!opts.force_splitting) {
        // eta = 0 reduces to a row-reduced equality system whose LP stays
        // cheap well past the generic small-N cutoff.
        if (problem.eta == 0.0 && A.N <= 256) return basis_pursuit_equality_lp(A, problem.b);
        if (problem.eta > 0.0 && A.N <= 50 && A.m <= 120)
            return basis_pursuit_inequality_lp(A, problem.b, problem.eta);
    }
    return basis_pursuit_admm(A, problem.b, problem.eta, opts);
}

// ---------------------------------------------------------------------------
// Completion
// ---------------------------------------------------------------------------

Sinogram complete_sinogram(const MeasurementMatrix& A, const CompressedData& y,
                           CompletionMethod method, const SolverOptions& opts,
                           double lambda, double eta, CompletionReport* report) {
    if (A.m != y.matrix.m || A.N != y.matrix.N)
        throw std::invalid_argument("complete_sinogram: matrix does not match measurements");
    if (method == CompletionMethod::tv_filtered && y.kind != SinogramKind::filtered)
        throw std::invalid_argument("complete_sinogram: tv route expects filtered measurements");
    if (method == CompletionMethod::l1_sparsified && y.kind != SinogramKind::sparsified)
        throw std::invalid_argument("complete_sinogram: l1 route expects sparsified measurements");
    if (method == CompletionMethod::tv_filtered && !(lambda > 0.0))
        throw std::invalid_argument("complete_sinogram: tv route needs lambda > 0");

    const int n_r = y.geometry.num_radial;
    const int m = A.m;
    Sinogram out(y.geometry, method == CompletionMethod::tv_filtered ? SinogramKind::filtered
                                                                     : SinogramKind::sparsified);
    CompletionReport local;
    CompletionReport& rep = report ? *report : local;
    rep = CompletionReport{};

    const double norm_sq = operator_norm_sq(A);
    DenseOp const* op = nullptr;
    std::unique_ptr<DenseOp> op_storage;
    if (method == CompletionMethod::tv_filtered) {
        op_storage = std::make_unique<DenseOp>(A);
        op = op_storage.get();
    }
    SolverOptions col_opts = opts;
    col_opts.lipschitz = norm_sq;

    std::vector<double> b(m);
    for (int k = 0; k < n_r; ++k) {
        for (int i = 0; i < m; ++i) b[i] = y.at(i, k);
        if (max_abs(b) == 0.0) continue;  // zero data: zero column is the exact minimizer

        std::vector<double> q;
        bool ok = true;
        try {
            if (method == CompletionMethod::tv_filtered) {
                auto [sol, r] = fista_tv_prepared(*op, b, lambda, true, col_opts, norm_sq);
                q = std::move(sol);
                rep.total_iterations += r.iterations;
                if (r.converged) ++rep.converged_columns;
            } else {
                BasisPursuitProblem bp{&A, b, eta};
                auto [sol, r] = basis_pursuit(bp, col_opts);
                q = std::move(sol);
                rep.total_iterations += r.iterations;
                if (r.converged) ++rep.converged_columns;
                else if (A.N <= 50) ok = false;  // exact path reported infeasibility
            }
        } catch (const std::exception&) {
            ok = false;
        }
        if (ok)
            for (double x : q)
                if (!std::isfinite(x)) ok = false;
        if (!ok) {
            rep.failed_columns.push_back(k);
            continue;
        }
        for (int j = 0; j < A.N; ++j) out.at(j, k) = q[j];
    }
    return out;
}

Sinogram radial_integrate(const Sinogram& sino) {
    if (sino.kind != SinogramKind::sparsified)
        throw std::invalid_argument("radial_integrate: sparsified input required");
    Sinogram out = sino;
    out.kind = SinogramKind::filtered;
    const double h = sino.geometry.radial_step();
    for (int j = 0; j < sino.geometry.num_detectors; ++j) {
        const double* in = sino.row(j);
        double* dst = out.row(j);
        double acc = 0.0;
        dst[0] = 0.0;
        for (int k = 1; k < sino.geometry.num_radial; ++k) {
            acc += 0.5 * h * (in[k - 1] + in[k]);
            dst[k] = acc;
        }
    }
    return out;
}

double sweep_lambda(const MeasurementMatrix& A, const CompressedData& y,
                    const SolverOptions& opts, int points) {
    if (y.kind != SinogramKind::filtered)
        throw std::invalid_argument("sweep_lambda: filtered measurements required");
    const int n_r = y.geometry.num_radial;
    std::vector<double> b(A.m), z(A.N);
    double scale = 0.0;
    for (int k = 0; k < n_r; ++k) {
        for (int i = 0; i < A.m; ++i) b[i] = y.at(i, k);
        A.apply_transpose(b.data(), z.data());
        scale = std::max(scale, max_abs(z));
    }
    if (scale == 0.0) return 1.0;

    double best_lambda = 0.0, best_residual = std::numeric_limits<double>::infinity();
    for (int p = 0; p < points; ++p) {
        const double frac = points > 1 ? static_cast<double>(p) / (points - 1) : 0.0;
        const double lambda = scale * 1e-4 * std::pow(1e5, frac);  // 1e-4..10 times scale
        CompletionReport rep;
        Sinogram completed = complete_sinogram(A, y, CompletionMethod::tv_filtered, opts,
                                               lambda, 0.0, &rep);
        double residual = 0.0;
        std::vector<double> q(A.N), aq(A.m);
        for (int k = 0; k < n_r; ++k) {
            for (int j = 0; j < A.N; ++j) q[j] = completed.at(j, k);
            A.apply(q.data(), aq.data());
            for (int i = 0; i < A.m; ++i) {
                const double r = aq[i] - y.at(i, k);
                residual += r * r;
            }
        }
        if (residual < best_residual) {
            best_residual = residual;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

}  // namespace cspat
