#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cspat/phantom.hpp"
#include "cspat/recon.hpp"
#include "cspat/solvers.hpp"

namespace cspat {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A pipeline stage could not produce usable output (per-sample solver
/// failures abort the run with the offending column indices).
struct solver_failure : std::runtime_error {
    std::string stage;
    std::vector<int> columns;
    solver_failure(const std::string& stage_name, std::vector<int> cols, const std::string& what)
        : std::runtime_error(what), stage(stage_name), columns(std::move(cols)) {}
};

enum class Method { full_data, standard_subsample, cs_l1, cs_tv };

std::string to_string(Method m);

struct ExperimentConfig {
    Phantom phantom;
    DetectorGeometry geometry;
    Method method = Method::full_data;

    // matrix section (cs_* methods; standard_subsample uses only m)
    int m = 0;
    int d = 0;
    std::uint64_t matrix_seed = 0;

    // solver section
    double lambda = 0.0;       // 0 with sweep disabled means "tv route must sweep"
    bool lambda_sweep = false;
    double eta = -1.0;         // < 0: noiseless 0, noisy from the mean row degree
    int max_iter = 0;          // 0: per-method default (100 tv, 5000 l1)
    double tol = 1e-8;

    // noise section
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;

    int image_size = 0;
    std::string output_dir;

    std::string config_text;  // raw JSON, hashed into the manifest
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct RunManifest {
    std::string config_hash;
    Method method = Method::full_data;
    std::vector<StageTiming> stages;
    bool has_metrics = false;
    Metrics metrics;
    CompletionReport completion;
    double lambda_used = 0.0;
    double eta_used = 0.0;
    std::vector<std::string> files;  // every artifact written, relative to output_dir
};

/// Execute the experiment described by the config and write all artifacts
/// into config.output_dir (guarded by a lock file). Returns the manifest,
/// which is also written as manifest.json.
RunManifest run_experiment(const ExperimentConfig& config);

std::string metrics_json(const Metrics& m);

struct BenchConfig {
    std::vector<std::pair<int, int>> sizes;  // (N, m); the radial count is set to N
    int iterations = 50;
    int repetitions = 3;
    double lambda = 0.05;
    std::uint64_t seed = 1;
};

BenchConfig parse_bench_config(const std::string& json_text);
BenchConfig load_bench_file(const std::string& path);

struct BenchPoint {
    int N = 0;
    int m = 0;
    int iterations = 0;
    double seconds = 0.0;
};

/// Wall-clock of the TV completion per (N, m), minimum over repetitions,
/// with a fixed iteration count.
std::vector<BenchPoint> benchmark_complexity(const BenchConfig& config);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace cspat
