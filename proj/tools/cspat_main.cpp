#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "cspat/io.hpp"
#include "cspat/pipeline.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    const cspat::ExperimentConfig config = cspat::load_config_file(config_path);
    const cspat::RunManifest manifest = cspat::run_experiment(config);
    if (manifest.has_metrics)
        std::printf("%s\n", cspat::metrics_json(manifest.metrics).c_str());
    else
        std::printf("{}\n");
    return 0;
}

int cmd_certify(const std::string& matrix_path, int s_max) {
    const cspat::MeasurementMatrix A = cspat::load_matrix_file(matrix_path);
    const cspat::ExpansionReport report = cspat::expansion_constants(A, s_max);
    std::printf("# m=%d N=%d d=%d seed=%llu\n", A.m, A.N, A.d,
                static_cast<unsigned long long>(A.seed));
    for (int s = 1; s <= report.s_max; ++s)
        std::printf("%d %.17g\n", s, report.theta[s - 1]);
    return 0;
}

int cmd_bench(const std::string& sweep_path) {
    const cspat::BenchConfig config = cspat::load_bench_file(sweep_path);
    const auto table = cspat::benchmark_complexity(config);
    std::printf("%8s %8s %8s %12s\n", "N", "m", "iters", "seconds");
    for (const cspat::BenchPoint& row : table)
        std::printf("%8d %8d %8d %12.6f\n", row.N, row.m, row.iterations, row.seconds);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed-sensing photoacoustic tomography pipeline"};
    app.require_subcommand(1);

    std::string config_path, matrix_path, sweep_path;
    int s_max = 2;

    CLI::App* run = app.add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();

    CLI::App* certify = app.add_subcommand("certify", "Compute expansion constants of a matrix");
    certify->add_option("matrix", matrix_path, "matrix text file")->required();
    certify->add_option("--smax", s_max, "largest subset size to certify")->default_val(2);

    CLI::App* bench = app.add_subcommand("bench", "Time the completion over a size sweep");
    bench->add_option("sweep", sweep_path, "sweep config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (certify->parsed()) return cmd_certify(matrix_path, s_max);
        if (bench->parsed()) return cmd_bench(sweep_path);
    } catch (const cspat::solver_failure& e) {
        std::fprintf(stderr, "solver failure in stage '%s': %s\n", e.stage.c_str(), e.what());
        if (!e.columns.empty()) {
            std::fprintf(stderr, "columns:");
            for (int c : e.columns) std::fprintf(stderr, " %d", c);
            std::fprintf(stderr, "\n");
        }
        return 3;
    } catch (const cspat::config_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
