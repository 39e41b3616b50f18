// Command-line front end: generate / run / sweep / bench.

#include "sesn/common.hpp"
#include "sesn/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> size;
    std::optional<std::size_t> instances;
    std::size_t threads = 0;
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts)
{
    cmd->add_option("--config", opts.config_path, "Experiment config file (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "Master seed override");
    cmd->add_option("--out", opts.out, "Output directory override");
    cmd->add_option("--size", opts.size, "Reservoir size override (neurons)");
    cmd->add_option("--instances", opts.instances, "Parallel reservoir instances override");
    cmd->add_option("--threads", opts.threads, "Worker threads for the optics kernels (0 = auto)");
}

sesn::ExperimentConfig make_config(const CommonOpts& opts)
{
    sesn::ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = sesn::load_config(opts.config_path);
    if (opts.seed) cfg.master_seed = *opts.seed;
    if (opts.out) cfg.out_dir = *opts.out;
    if (opts.size) cfg.reservoir.n_neurons = *opts.size;
    if (opts.instances) cfg.n_instances = *opts.instances;
    sesn::set_num_threads(opts.threads);
    cfg.validate();
    return cfg;
}

void print_report(const sesn::RunReport& r)
{
    std::printf("run %s: init %.3f s, %.3f s per 1000 iter, train R^2 %.6f, test R^2 %.6f\n", r.run_id.c_str(),
                r.init_time_s, r.iter_time_s_per_1000, r.train_score, r.test_score);
    std::printf("  report:      %s\n", r.report_path.c_str());
    std::printf("  predictions: %s\n", r.predictions_path.c_str());
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Binary echo-state network on a simulated scattering medium"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* generate = app.add_subcommand("generate", "Write the Mackey-Glass series as CSV (header t,u)");
    add_common_flags(generate, opts);

    auto* run = app.add_subcommand("run", "Run a single experiment and write its report");
    add_common_flags(run, opts);

    auto* sweep = app.add_subcommand("sweep", "Run a reservoir-size sweep and aggregate test scores");
    add_common_flags(sweep, opts);
    std::vector<std::size_t> sweep_sizes{256, 1024, 4096};
    std::size_t seeds_per_size = 1;
    sweep->add_option("--sizes", sweep_sizes, "Reservoir sizes to sweep")->delimiter(',');
    sweep->add_option("--seeds-per-size", seeds_per_size, "Independent seeds per size");

    auto* bench = app.add_subcommand("bench", "Measure init time and stepping throughput");
    add_common_flags(bench, opts);
    std::size_t bench_steps = 1000;
    bench->add_option("--steps", bench_steps, "Timed reservoir steps (>= 100)");

    CLI11_PARSE(app, argc, argv);

    try {
        const sesn::ExperimentConfig cfg = make_config(opts);

        if (generate->parsed()) {
            const auto series = sesn::generate_mackey_glass(cfg.mg, cfg.train_steps + cfg.test_steps + 1);
            std::filesystem::create_directories(cfg.out_dir);
            const auto path = (std::filesystem::path(cfg.out_dir) / "series.csv").string();
            sesn::write_series_csv(series, path);
            std::printf("wrote %zu samples to %s\n", series.values.size(), path.c_str());
        } else if (run->parsed()) {
            print_report(sesn::run_experiment(cfg));
        } else if (sweep->parsed()) {
            const auto entries = sesn::run_size_sweep(cfg, sweep_sizes, seeds_per_size);
            for (const auto& e : entries) {
                if (e.ok())
                    std::printf("size %zu seed %llu: test R^2 %.6f\n", e.size,
                                static_cast<unsigned long long>(e.seed), e.report->test_score);
                else
                    std::printf("size %zu seed %llu: FAILED (%s)\n", e.size,
                                static_cast<unsigned long long>(e.seed), e.error.c_str());
            }
            std::printf("aggregate: %s\n",
                        (std::filesystem::path(cfg.out_dir) / "sweep_aggregate.csv").string().c_str());
        } else if (bench->parsed()) {
            const auto record = sesn::bench_throughput(cfg, bench_steps);
            std::printf("ESN size %zu: init time %.3f s, time per 1000 iter %.3f s (%zu steps measured)\n",
                        record.n_neurons, record.init_time_s, record.iter_time_s_per_1000, record.n_steps);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
