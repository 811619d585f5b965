#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cspat/expander.hpp"
#include "cspat/geometry.hpp"
#include "cspat/transforms.hpp"

namespace cspat {

/// Compressed measurements: one radial trace per measurement row, together
/// with the matrix that produced them and the geometry of the underlying
/// full sinogram.
struct CompressedData {
    MeasurementMatrix matrix;
    DetectorGeometry geometry;
    SinogramKind kind = SinogramKind::spherical_means;
    std::vector<double> values;  // m rows x num_radial columns
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;

    double& at(int i, int k) { return values[static_cast<std::size_t>(i) * geometry.num_radial + k]; }
    double at(int i, int k) const { return values[static_cast<std::size_t>(i) * geometry.num_radial + k]; }
};

/// Row sums of the sinogram over each measurement's detector set (CS2).
CompressedData measure(const MeasurementMatrix& A, const Sinogram& sino);

/// Adds i.i.d. Gaussian noise to every detector trace and propagates the
/// sums into the measurements, so measurement i picks up noise of variance
/// |J_i| sigma^2 per sample. Deterministic for a given seed.
CompressedData add_noise(const CompressedData& y, double sigma, std::uint64_t seed);

/// Radial filter applied to every measurement row (the temporal transform
/// commutes with the measurement matrix).
void transform_measurements(CompressedData& y, FilterKind kind);

struct BasisPursuitProblem {
    const MeasurementMatrix* A = nullptr;
    std::vector<double> b;
    double eta = 0.0;  // l1 residual budget
};

struct TVProblem {
    const MeasurementMatrix* A = nullptr;
    std::vector<double> b;
    double lambda = 0.0;
    bool periodic = true;
};

struct SolverOptions {
    int max_iter = 5000;
    double tol = 1e-8;
    bool fixed_iters = false;    // run exactly max_iter iterations (benchmarking)
    double lipschitz = 0.0;      // known bound on ||A||_2^2; 0 = estimate internally
    bool force_splitting = false;  // skip the exact LP path (testing)
};

struct SolverReport {
    int iterations = 0;
    double objective = 0.0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  // best objective after each iteration
};

/// minimize ||q||_1  s.t.  ||A q - b||_1 <= eta.
/// Solved exactly as a linear program for small N (eta = 0 additionally
/// reduces the constraint to a row-reduced equality system); larger
/// problems run a linearized ADMM splitting.
std::pair<std::vector<double>, SolverReport> basis_pursuit(const BasisPursuitProblem& problem,
                                                           const SolverOptions& opts = {});

/// Exact minimizer of 1/2 ||q - v||^2 + weight * sum |q_{j+1} - q_j|,
/// with a wrap-around difference iff periodic. Non-periodic case is the
/// O(N) taut string; the periodic case maximizes the concave dual of the
/// wrap edge by golden section, solving a taut string per evaluation.
std::vector<double> tv_prox(const std::vector<double>& v, double weight, bool periodic);

/// FISTA on ||A q - b||_2^2 + lambda * (2 pi / N) * sum |q_{j+1} - q_j|
/// with tv_prox as the proximal step and an objective-restart safeguard.
/// Returns the best iterate seen.
std::pair<std::vector<double>, SolverReport> fista_tv(const TVProblem& problem,
                                                      const SolverOptions& opts = {});

/// Power-iteration estimate of ||A||_2^2 (largest eigenvalue of A^T A).
double operator_norm_sq(const MeasurementMatrix& A, int iters = 50);

enum class CompletionMethod { l1_sparsified, tv_filtered };

struct CompletionReport {
    std::vector<int> failed_columns;
    int converged_columns = 0;
    long total_iterations = 0;
};

/// Complete the transformed measurements one radial sample at a time:
/// basis pursuit on sparsified data (output kind sparsified, still needs
/// radial integration) or TV-regularized least squares on filtered data
/// (output kind filtered, backprojection-ready).
Sinogram complete_sinogram(const MeasurementMatrix& A, const CompressedData& y,
                           CompletionMethod method, const SolverOptions& opts,
                           double lambda = 0.0, double eta = 0.0,
                           CompletionReport* report = nullptr);

/// Cumulative trapezoidal integration of each row from r = 0; inverse of
/// radial_derivative up to discretization error.
Sinogram radial_integrate(const Sinogram& sino);

/// 16-point logarithmic lambda sweep selecting the minimum completed-data
/// residual ||A q - b||_2 summed over radial samples.
double sweep_lambda(const MeasurementMatrix& A, const CompressedData& y,
                    const SolverOptions& opts, int points = 16);

}  // namespace cspat
