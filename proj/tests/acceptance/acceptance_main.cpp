// Acceptance suite: every release criterion runs here with its tolerance
// pinned in code, one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cspat/expander.hpp"
#include "cspat/io.hpp"
#include "cspat/phantom.hpp"
#include "cspat/pipeline.hpp"
#include "cspat/recon.hpp"
#include "cspat/rng.hpp"
#include "cspat/solvers.hpp"
#include "cspat/transforms.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace cspat;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome& outcome;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            outcome.pass = false;
            outcome.detail += (outcome.detail.empty() ? "" : "; ") + what;
        }
    }
};

struct Deadline {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double limit;
    explicit Deadline(double seconds) : limit(seconds) {}
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    void enforce(Check& check) const {
        check.require(elapsed() < limit,
                      "runtime " + std::to_string(elapsed()) + "s over the " +
                          std::to_string(limit) + "s budget");
    }
};

double rel_l2v(const std::vector<double>& a, const std::vector<double>& r) {
    return oracle::rel_l2(a, r);
}

Phantom fig_disc() {
    Phantom p;
    p.detector_radius = 1.0;
    p.discs.push_back({{0.2, 0.0}, 0.25, 1.0});
    return p;
}

DetectorGeometry full_geometry(int N, int n_r) {
    DetectorGeometry g;
    g.num_detectors = N;
    g.num_radial = n_r;
    g.detector_radius = 1.0;
    return g;
}

// ---------------------------------------------------------------------------
// 1. Forward-model oracle equivalence
// ---------------------------------------------------------------------------
Outcome criterion1() {
    Outcome out;
    Check check{out};
    Deadline deadline(60.0);
    const DetectorGeometry g = full_geometry(32, 65);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Phantom phantom = oracle::random_phantom(1.0, 5, seed);
        const Sinogram sino = forward_sinogram(phantom, g);
        std::vector<double> reference(sino.values.size());
        for (int j = 0; j < g.num_detectors; ++j) {
            const Vec2 z = g.detector_position(j);
            for (int k = 0; k < g.num_radial; ++k)
                reference[static_cast<std::size_t>(j) * g.num_radial + k] =
                    oracle::spherical_mean_adaptive(phantom, z, g.radial_sample(k));
        }
        worst = std::max(worst, rel_l2v(sino.values, reference));
    }
    check.require(worst < 1e-6, "worst phantom rel_l2 " + std::to_string(worst));
    deadline.enforce(check);
    out.detail = "50 phantoms, worst rel_l2 = " + std::to_string(worst);
    return out;
}

// ---------------------------------------------------------------------------
// 2. Expander certification against an independent implementation
// ---------------------------------------------------------------------------
Outcome criterion2() {
    Outcome out;
    Check check{out};
    Rng rng(77);
    int compared = 0;
    for (int t = 0; t < 100; ++t) {
        const int N = rng.uniform_int(10, 25);
        const int d = rng.uniform_int(2, 5);
        const int m = rng.uniform_int(d, 15);
        const MeasurementMatrix A = sample_matrix(N, m, d, 5000 + t);
        const ExpansionReport fast = expansion_constants(A, 4);
        const ExpansionReport slow = oracle::naive_expansion_constants(A, 4);
        for (int s = 1; s <= 4; ++s)
            check.require(fast.theta[s - 1] == slow.theta[s - 1],
                          "theta mismatch at matrix " + std::to_string(t));
        ++compared;
    }

    // 2-regular reference graph with 7 left and 5 right vertices: columns
    // {2,3} (1-based) reach rows {2,3,4}, giving theta_2 >= 1/4.
    MeasurementMatrix G;
    G.m = 5;
    G.N = 7;
    G.d = 2;
    G.col_sets = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {0, 2}, {1, 4}};
    G.row_sets.assign(5, {});
    for (int j = 0; j < G.N; ++j)
        for (int i : G.col_sets[j]) G.row_sets[i].push_back(j);
    const std::vector<int> reached = right_vertices(G, {1, 2});
    check.require(reached == std::vector<int>{1, 2, 3}, "witness R(J) mismatch");
    const ExpansionReport rep = expansion_constants(G, 2);
    check.require(rep.theta[1] >= 0.25, "witness theta_2 below 1/4");
    std::ostringstream ss;
    ss << compared << " matrices bit-identical; witness R({2,3}) = {2,3,4}, theta_2 = "
       << rep.theta[1];
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 3. Exact sparse recovery on certified expanders
// ---------------------------------------------------------------------------
Outcome criterion3() {
    Outcome out;
    Check check{out};
    Deadline deadline(300.0);
    std::ostringstream ss;

    // the nominal sizes first, reported honestly
    const auto nominal = testutil::find_certified_matrix(30, 25, 8, 1, 1.0 / 6.0, 60);
    ss << "nominal (N=30,m=25,d=8): " << (nominal.found ? "certified" : "0 certified")
       << " in " << nominal.seeds_tried << " seeds";

    struct Schedule {
        int s;
        std::vector<std::pair<int, int>> dm;  // (d, m)
    };
    const std::vector<Schedule> schedules = {
        {1, {{8, 25}, {8, 120}, {8, 180}, {8, 240}}},
        {2, {{8, 25}, {16, 400}, {20, 500}, {20, 600}}},
    };

    for (const Schedule& sched : schedules) {
        testutil::CertifiedSearch found;
        int d_used = 0, m_used = 0;
        for (const auto& [d, m] : sched.dm) {
            found = testutil::find_certified_matrix(30, m, d, sched.s, 1.0 / 6.0, 40);
            if (found.found) {
                d_used = d;
                m_used = m;
                break;
            }
        }
        check.require(found.found, "no certified matrix for s=" + std::to_string(sched.s));
        if (!found.found) continue;

        const MeasurementMatrix& A = found.matrix;
        int exact = 0, bound_ok = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<double> x =
                testutil::random_sparse(A.N, sched.s, 40000 + 100 * sched.s + trial);
            std::vector<double> b(A.m);
            A.apply(x.data(), b.data());
            const auto [q, report] = basis_pursuit({&A, b, 0.0});
            check.require(report.converged, "solver failure in a trial");
            double err = 0.0;
            for (int j = 0; j < A.N; ++j) err += std::abs(q[j] - x[j]);
            if (err < 1e-6) ++exact;
            const RecoveryBound rb =
                recovery_error_bound(found.report, x, q, sched.s, 0.0, A.d, 1e-6);
            if (rb.applicable && rb.holds) ++bound_ok;
        }
        check.require(exact == 100, "s=" + std::to_string(sched.s) + " exact " +
                                        std::to_string(exact) + "/100");
        check.require(bound_ok == 100, "s=" + std::to_string(sched.s) + " bound " +
                                           std::to_string(bound_ok) + "/100");
        ss << "; s=" << sched.s << " at (d=" << d_used << ",m=" << m_used
           << ", theta_" << 2 * sched.s << "=" << found.report.theta[2 * sched.s - 1]
           << "): " << exact << "/100 exact, " << bound_ok << "/100 bound";
    }
    deadline.enforce(check);
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 4. TV prox against the dual-ascent oracle
// ---------------------------------------------------------------------------
Outcome criterion4() {
    Outcome out;
    Check check{out};
    Deadline deadline(60.0);
    Rng rng(99);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(63));
        const bool periodic = trial % 2 == 1;
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(-2.0, 2.0);
        const double w = rng.uniform(0.01, 1.5);
        const std::vector<double> fast = tv_prox(v, w, periodic);
        const std::vector<double> slow = oracle::tv_prox_dual(v, w, periodic);
        for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
    }
    check.require(worst < 1e-6, "worst deviation " + std::to_string(worst));
    deadline.enforce(check);
    out.detail = "1000 instances (line and periodic), worst deviation = " + std::to_string(worst);
    return out;
}

// polar resampling, energy of angular modes above `cutoff`
double streak_energy(const ImageGrid& img, int cutoff) {
    const int n_theta = 256, n_rad = 64;
    double energy = 0.0;
    std::vector<double> ring(n_theta);
    for (int qi = 1; qi <= n_rad; ++qi) {
        const double rho = 0.9 * img.extent * qi / n_rad;
        for (int t = 0; t < n_theta; ++t) {
            const double th = 2.0 * M_PI * t / n_theta;
            const double px = (rho * std::cos(th) + img.extent) / (2.0 * img.extent) * img.n - 0.5;
            const double py = (rho * std::sin(th) + img.extent) / (2.0 * img.extent) * img.n - 0.5;
            const int ax = static_cast<int>(std::floor(px));
            const int ay = static_cast<int>(std::floor(py));
            const double fx = px - ax, fy = py - ay;
            auto at = [&](int a, int b) {
                a = std::clamp(a, 0, img.n - 1);
                b = std::clamp(b, 0, img.n - 1);
                return img.at(a, b);
            };
            ring[t] = (1 - fx) * (1 - fy) * at(ax, ay) + fx * (1 - fy) * at(ax + 1, ay) +
                      (1 - fx) * fy * at(ax, ay + 1) + fx * fy * at(ax + 1, ay + 1);
        }
        for (int mode = 0; mode < n_theta; ++mode) {
            if (std::min(mode, n_theta - mode) <= cutoff) continue;
            double re = 0.0, im = 0.0;
            for (int t = 0; t < n_theta; ++t) {
                re += ring[t] * std::cos(2.0 * M_PI * mode * t / n_theta);
                im -= ring[t] * std::sin(2.0 * M_PI * mode * t / n_theta);
            }
            energy += re * re + im * im;
        }
    }
    return energy;
}

// ---------------------------------------------------------------------------
// 5. Desk-scale reproduction of the N=200, m=100 disc experiment
// ---------------------------------------------------------------------------
Outcome criterion5() {
    Outcome out;
    Check check{out};
    Deadline deadline(600.0);
    const Phantom phantom = fig_disc();
    const DetectorGeometry g = full_geometry(200, 512);
    const int n = 256;

    const Sinogram means = forward_sinogram(phantom, g);
    const Sinogram direct = apply_filter(FilterKind::fbp_filter, means);
    const ImageGrid reference = rasterize(phantom, n);
    const ImageGrid full_img = backproject(direct, n);
    const double full_err = compare(full_img, reference).rel_l2;

    const MeasurementMatrix A = sample_matrix(200, 100, 10, 1);

    // TV route on filtered measurements
    CompressedData y_tv = measure(A, means);
    transform_measurements(y_tv, FilterKind::fbp_filter);
    SolverOptions tv_opts;
    tv_opts.max_iter = 200;
    CompletionReport tv_rep;
    const Sinogram tv_completed =
        complete_sinogram(A, y_tv, CompletionMethod::tv_filtered, tv_opts, 3.0, 0.0, &tv_rep);
    const double sino_rel = rel_l2v(tv_completed.values, direct.values);
    check.require(tv_rep.failed_columns.empty(), "tv completion failures");
    check.require(sino_rel < 0.05, "tv sinogram rel_l2 " + std::to_string(sino_rel));
    const ImageGrid tv_img = backproject(tv_completed, n);
    const double tv_err = compare(tv_img, reference).rel_l2;
    check.require(std::abs(tv_err - full_err) <= 0.05,
                  "tv image error not within 0.05 of the full-data baseline");

    // l1 route on sparsified measurements, then radial integration
    CompressedData y_l1 = measure(A, means);
    transform_measurements(y_l1, FilterKind::sparsifier);
    SolverOptions l1_opts;
    l1_opts.max_iter = 3000;
    l1_opts.tol = 1e-7;
    CompletionReport l1_rep;
    Sinogram l1_completed =
        complete_sinogram(A, y_l1, CompletionMethod::l1_sparsified, l1_opts, 0.0, 0.0, &l1_rep);
    check.require(l1_rep.failed_columns.empty(), "l1 completion failures");
    const Sinogram l1_filtered = radial_integrate(l1_completed);
    const ImageGrid l1_img = backproject(l1_filtered, n);
    const double l1_err = compare(l1_img, reference).rel_l2;
    check.require(tv_err <= l1_err, "tv image error exceeds l1 image error");

    // standard subsampling baseline: every second detector
    DetectorGeometry gs = g;
    gs.num_detectors = 100;
    Sinogram sub(gs, SinogramKind::spherical_means);
    for (int j = 0; j < 100; ++j)
        std::copy(means.row(2 * j), means.row(2 * j) + g.num_radial, sub.row(j));
    const ImageGrid sub_img = backproject(apply_filter(FilterKind::fbp_filter, sub), n);

    const double streak_sub = streak_energy(sub_img, 50);
    const double streak_tv = streak_energy(tv_img, 50);
    check.require(streak_sub > streak_tv, "subsample streak energy not larger");

    deadline.enforce(check);
    std::ostringstream ss;
    ss << "tv sino rel_l2 = " << sino_rel << "; image rel_l2 full/tv/l1 = " << full_err << "/"
       << tv_err << "/" << l1_err << "; streak sub/tv = " << streak_sub << "/" << streak_tv;
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 6. Noise averaging: rescaled variance sigma^2 / |J_i|
// ---------------------------------------------------------------------------
Outcome criterion6() {
    Outcome out;
    Check check{out};
    const MeasurementMatrix A = sample_matrix(200, 100, 10, 3);
    DetectorGeometry g = full_geometry(200, 2);
    CompressedData clean;
    clean.matrix = A;
    clean.geometry = g;
    clean.kind = SinogramKind::spherical_means;
    clean.values.assign(static_cast<std::size_t>(A.m) * g.num_radial, 0.0);

    const int trials = 100000;
    const double sigma = 1.0;
    std::vector<double> sum(A.m, 0.0), sum_sq(A.m, 0.0);
    for (int t = 0; t < trials; ++t) {
        const CompressedData noisy = add_noise(clean, sigma, 70000 + t);
        for (int i = 0; i < A.m; ++i) {
            const double rescaled = noisy.at(i, 0) / A.row_degree(i);
            sum[i] += rescaled;
            sum_sq[i] += rescaled * rescaled;
        }
    }
    double worst = 0.0;
    for (int i = 0; i < A.m; ++i) {
        const double mean = sum[i] / trials;
        const double variance = sum_sq[i] / trials - mean * mean;
        const double expected = sigma * sigma / A.row_degree(i);
        worst = std::max(worst, std::abs(variance / expected - 1.0));
    }
    check.require(worst <= 0.05, "worst variance deviation " + std::to_string(worst));
    std::ostringstream ss;
    ss << trials << " trials, worst relative deviation of var * |J_i| / sigma^2 = " << worst;
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 7. Completion cost scaling
// ---------------------------------------------------------------------------
Outcome criterion7() {
    Outcome out;
    Check check{out};
    BenchConfig cfg;
    cfg.sizes = {{240, 240}, {480, 240}, {240, 480}};
    cfg.iterations = 60;
    cfg.repetitions = 5;
    cfg.lambda = 3.0;
    cfg.seed = 1;
    const auto table = benchmark_complexity(cfg);
    const double ratio_n = table[1].seconds / table[0].seconds;
    const double ratio_m = table[2].seconds / table[0].seconds;
    check.require(ratio_n >= 3.0 && ratio_n <= 6.0,
                  "N-doubling ratio " + std::to_string(ratio_n));
    check.require(ratio_m >= 1.5 && ratio_m <= 3.0,
                  "m-doubling ratio " + std::to_string(ratio_m));
    std::ostringstream ss;
    ss << "N x2 ratio = " << ratio_n << " (band [3,6]); m x2 ratio = " << ratio_m
       << " (band [1.5,3]) at fixed 60 iterations";
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 8. Full-data reconstruction accuracy and convergence in N
// ---------------------------------------------------------------------------
Outcome criterion8() {
    Outcome out;
    Check check{out};
    const Phantom phantom = fig_disc();
    const ImageGrid reference = rasterize(phantom, 256);
    std::ostringstream ss;
    double previous = 1e9, at200 = 0.0;
    for (int N : {50, 100, 200, 400}) {
        const Sinogram filtered =
            apply_filter(FilterKind::fbp_filter, forward_sinogram(phantom, full_geometry(N, 512)));
        const double err = compare(backproject(filtered, 256), reference).rel_l2;
        check.require(err <= previous * 1.05,
                      "error grew at N=" + std::to_string(N) + " (" + std::to_string(err) + ")");
        previous = err;
        if (N == 200) at200 = err;
        ss << "N=" << N << ": " << err << "  ";
    }
    check.require(at200 < 0.1, "rel_l2 at N=200 is " + std::to_string(at200));
    out.detail = ss.str();
    return out;
}

// ---------------------------------------------------------------------------
// 9. Determinism of the CLI pipeline
// ---------------------------------------------------------------------------
std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion9() {
    Outcome out;
    Check check{out};
    const fs::path base = fs::temp_directory_path() / "cspat_acceptance_c9";
    fs::remove_all(base);
    fs::create_directories(base);

    auto config_for = [&](const std::string& dir) {
        std::ostringstream ss;
        ss << R"({
  "phantom": {"detector_radius": 1.0,
              "discs": [{"center": [0.2, 0.0], "radius": 0.25, "amplitude": 1.0}]},
  "geometry": {"num_detectors": 64, "num_radial": 65},
  "matrix": {"m": 32, "d": 6, "seed": 5},
  "method": "cs_tv",
  "solver": {"lambda": 1.0, "max_iter": 50},
  "noise": {"sigma": 0.01, "seed": 9},
  "image_size": 64,
  "output_dir": ")" << dir << R"("
})";
        return ss.str();
    };

    const fs::path cfg_a = base / "run_a.json", cfg_b = base / "run_b.json";
    std::ofstream(cfg_a) << config_for((base / "out_a").string());
    std::ofstream(cfg_b) << config_for((base / "out_b").string());

    const std::string cli = CSPAT_CLI_PATH;
    const int code_a = std::system((cli + " run " + cfg_a.string() + " > /dev/null").c_str());
    const int code_b = std::system((cli + " run " + cfg_b.string() + " > /dev/null").c_str());
    check.require(WEXITSTATUS(code_a) == 0 && WEXITSTATUS(code_b) == 0, "cli run failed");

    int files = 0;
    for (const auto& entry : fs::directory_iterator(base / "out_a")) {
        const std::string name = entry.path().filename().string();
        if (name.find(".csv") == std::string::npos && name.find(".pgm") == std::string::npos)
            continue;
        check.require(read_bytes(entry.path()) == read_bytes(base / "out_b" / name),
                      "artifact differs: " + name);
        ++files;
    }
    check.require(files >= 8, "too few artifacts compared");

    // exit-code contract of the interface
    const int bad = std::system((cli + " run /nonexistent.json 2> /dev/null").c_str());
    check.require(WEXITSTATUS(bad) == 2, "config error must exit 2");

    std::ostringstream ss;
    ss << files << " artifacts byte-identical across two runs; config-error exit code 2";
    out.detail = ss.str();
    fs::remove_all(base);
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> criteria = {
        {1, "forward-model oracle equivalence", criterion1},
        {2, "expander certification vs naive recomputation", criterion2},
        {3, "exact sparse recovery on certified expanders", criterion3},
        {4, "tv prox oracle equivalence", criterion4},
        {5, "desk-scale N=200/m=100 disc reproduction", criterion5},
        {6, "noise-averaging variance", criterion6},
        {7, "completion complexity scaling", criterion7},
        {8, "full-data backprojection accuracy", criterion8},
        {9, "pipeline determinism", criterion9},
    };

    int failures = 0;
    for (const Entry& entry : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = entry.fn();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%.1fs) -- %s\n", outcome.pass ? "PASS" : "FAIL",
                    entry.id, entry.name, seconds, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures;
}
