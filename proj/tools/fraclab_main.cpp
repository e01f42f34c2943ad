#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "fraclab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fraclab: fractional Calderon source-to-solution laboratory"};
    std::string subcommand, config_path, out_dir;
    long long seed = -1;
    int threads = -1;

    app.add_option("subcommand", subcommand,
                   "one of: specfun-test, eigs, reduce, runge, dtn, transfer, instability, all")
        ->required();
    app.add_option("--config", config_path, "path to a sectioned key=value config file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "RNG seed (overrides config)");
    app.add_option("--threads", threads, "OpenMP thread count (overrides config)");

    CLI11_PARSE(app, argc, argv);

    try {
        fraclab::ExperimentConfig cfg;
        if (config_path.empty()) {
            if (const char* env = std::getenv("FRACLAB_CONFIG")) config_path = env;
        }
        if (!config_path.empty()) cfg = fraclab::parse_config(config_path);
        fraclab::apply_env_overrides(cfg);
        if (!out_dir.empty()) cfg.out = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (threads >= 0) cfg.threads = threads;
#ifdef _OPENMP
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
        return fraclab::run_subcommand(subcommand, cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fraclab: %s\n", e.what());
        return 2;
    }
}
