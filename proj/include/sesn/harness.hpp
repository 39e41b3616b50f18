#pragma once

// End-to-end experiment orchestration: config parsing, pipeline wiring,
// timing, reporting, artifact persistence. //

#include "sesn/readout.hpp"
#include "sesn/reservoir.hpp"
#include "sesn/timeseries.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sesn {

struct ExperimentConfig {
    MgParams mg;
    std::size_t encoder_width = 1000;
    ReservoirConfig reservoir;
    RidgeConfig ridge;
    std::size_t train_steps = 2000;
    std::size_t test_steps = 500;
    std::size_t n_instances = 1;
    std::string out_dir = "runs";
    std::uint64_t master_seed = 42;

    void validate() const;
    /// Copy with the derived fields filled in: the reservoir inherits the
    /// encoder width and the master seed.
    ExperimentConfig resolved() const;
};

/// Everything a run leaves behind, mirroring the measurement columns of a
/// size/timing comparison table: init time, time per 1000 iterations, score.
struct RunReport {
    ExperimentConfig config;
    std::string run_id;
    std::string version;
    std::string timestamp;
    ThermometerEncoder encoder;
    std::optional<CameraModel> camera;  // with calibrated gain
    ReadoutModel readout;
    double init_time_s = 0.0;
    double iter_time_s_per_1000 = 0.0;
    double train_score = 0.0;
    double test_score = 0.0;
    double activation_mean = 0.0;
    double activation_min = 0.0;
    double activation_max = 0.0;
    std::string report_path;
    std::string predictions_path;
};

struct SweepEntry {
    std::size_t size = 0;
    std::uint64_t seed = 0;
    std::string error;  // empty on success
    std::optional<RunReport> report;

    bool ok() const { return report.has_value(); }
};

struct ThroughputRecord {
    std::size_t n_neurons = 0;
    std::size_t n_steps = 0;
    double init_time_s = 0.0;
    double iter_time_s_per_1000 = 0.0;
};

/// Strict parse: unknown keys are errors. Missing keys keep their defaults.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Generates the data, calibrates encoder and camera gain, builds the
/// transfer matrix (timed), runs the timed training pass, fits the readout,
/// evaluates a teacher-forced one-step-ahead test continuation, and writes
/// report.<run-id> plus predictions.<run-id>.csv under config.out_dir.
/// Any failure aborts with the failing stage named and partial outputs
/// removed.
RunReport run_experiment(const ExperimentConfig& config);

/// One experiment per (size, seed); failures are recorded and the sweep
/// continues. Writes sweep_aggregate.csv with per-size test-score means.
std::vector<SweepEntry> run_size_sweep(const ExperimentConfig& config, std::span<const std::size_t> sizes,
                                       std::size_t seeds_per_size);

/// Wall-clock cost of reservoir stepping, training excluded; 10 untimed
/// warmup steps, then n_steps (>= 100) timed and normalized per 1000.
ThroughputRecord bench_throughput(const ExperimentConfig& config, std::size_t n_steps);

/// CSV with header t,u and 12 significant digits, as emitted by `generate`.
void write_series_csv(const MgSeries& series, const std::string& path);

}  // namespace sesn
