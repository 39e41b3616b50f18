#include "sesn/harness.hpp"

#include "sesn/common.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifndef SESN_VERSION
#define SESN_VERSION "0.0.0-dev"
#endif

namespace fs = std::filesystem;

namespace sesn {

namespace {

using nlohmann::json;

std::string fmt12(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known, const std::string& section)
{
    for (const auto& item : obj.items()) {
        bool found = false;
        for (const char* k : known)
            if (item.key() == k) { found = true; break; }
        if (!found) throw std::invalid_argument("config: unknown key '" + item.key() + "' in " + section);
    }
}

void parse_mg(const json& obj, MgParams& mg)
{
    reject_unknown_keys(obj, {"beta", "gamma", "tau", "n_exp", "h", "init_value", "transient_steps"}, "mg");
    mg.beta = obj.value("beta", mg.beta);
    mg.gamma = obj.value("gamma", mg.gamma);
    mg.tau = obj.value("tau", mg.tau);
    mg.n_exp = obj.value("n_exp", mg.n_exp);
    mg.h = obj.value("h", mg.h);
    mg.init_value = obj.value("init_value", mg.init_value);
    mg.transient_steps = obj.value("transient_steps", mg.transient_steps);
}

void parse_threshold(const json& obj, ThresholdConfig& threshold)
{
    reject_unknown_keys(obj, {"mode", "fixed_dn", "quantile"}, "reservoir.threshold");
    if (obj.contains("mode")) {
        const std::string mode = obj.at("mode").get<std::string>();
        if (mode == "fixed_dn")
            threshold.mode = ThresholdConfig::Mode::fixed_dn;
        else if (mode == "quantile")
            threshold.mode = ThresholdConfig::Mode::quantile;
        else
            throw std::invalid_argument("config: threshold mode must be 'fixed_dn' or 'quantile', got '" + mode + "'");
    }
    threshold.fixed_dn = obj.value("fixed_dn", threshold.fixed_dn);
    threshold.quantile = obj.value("quantile", threshold.quantile);
}

void parse_reservoir(const json& obj, ReservoirConfig& reservoir)
{
    reject_unknown_keys(obj, {"n_neurons", "washout", "batch_size", "threshold", "camera"}, "reservoir");
    reservoir.n_neurons = obj.value("n_neurons", reservoir.n_neurons);
    reservoir.washout = obj.value("washout", reservoir.washout);
    reservoir.batch_size = obj.value("batch_size", reservoir.batch_size);
    if (obj.contains("threshold")) parse_threshold(obj.at("threshold"), reservoir.threshold);
    if (obj.contains("camera")) {
        if (obj.at("camera").is_null()) {
            reservoir.camera.reset();
        } else {
            CameraModel camera = reservoir.camera.value_or(CameraModel{});
            reject_unknown_keys(obj.at("camera"), {"target_mean_dn"}, "reservoir.camera");
            camera.target_mean_dn = obj.at("camera").value("target_mean_dn", camera.target_mean_dn);
            reservoir.camera = camera;
        }
    }
}

}  // namespace

void ExperimentConfig::validate() const
{
    mg.validate();
    if (encoder_width < 1) throw std::invalid_argument("ExperimentConfig: encoder_width must be >= 1");
    ReservoirConfig res = reservoir;
    res.input_width = encoder_width;
    res.validate();
    ridge.validate();
    if (train_steps <= reservoir.washout)
        throw std::invalid_argument("ExperimentConfig: train_steps must exceed the washout");
    if (test_steps < 1) throw std::invalid_argument("ExperimentConfig: test_steps must be >= 1");
    if (n_instances < 1) throw std::invalid_argument("ExperimentConfig: n_instances must be >= 1");
    if (out_dir.empty()) throw std::invalid_argument("ExperimentConfig: out_dir must be non-empty");
}

ExperimentConfig ExperimentConfig::resolved() const
{
    ExperimentConfig cfg = *this;
    cfg.reservoir.input_width = cfg.encoder_width;
    cfg.reservoir.seed = cfg.master_seed;
    return cfg;
}

ExperimentConfig parse_config_json(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
    reject_unknown_keys(root,
                        {"mg", "encoder_width", "reservoir", "ridge", "train_steps", "test_steps", "n_instances",
                         "out_dir", "seed"},
                        "top level");

    ExperimentConfig cfg;
    if (root.contains("mg")) parse_mg(root.at("mg"), cfg.mg);
    cfg.encoder_width = root.value("encoder_width", cfg.encoder_width);
    if (root.contains("reservoir")) parse_reservoir(root.at("reservoir"), cfg.reservoir);
    if (root.contains("ridge")) {
        reject_unknown_keys(root.at("ridge"), {"alpha"}, "ridge");
        cfg.ridge.alpha = root.at("ridge").value("alpha", cfg.ridge.alpha);
    }
    cfg.train_steps = root.value("train_steps", cfg.train_steps);
    cfg.test_steps = root.value("test_steps", cfg.test_steps);
    cfg.n_instances = root.value("n_instances", cfg.n_instances);
    cfg.out_dir = root.value("out_dir", cfg.out_dir);
    cfg.master_seed = root.value("seed", cfg.master_seed);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str());
}

namespace {

void write_file_atomic(const fs::path& path, const std::string& content)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, path);
}

std::string make_run_id(const ExperimentConfig& cfg)
{
    std::string id = "n" + std::to_string(cfg.reservoir.n_neurons);
    if (cfg.n_instances > 1) id += "_k" + std::to_string(cfg.n_instances);
    id += "_s" + std::to_string(cfg.master_seed);
    return id;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("run_experiment failed at stage '") + name + "': " + e.what());
    }
}

std::string format_report(const RunReport& r)
{
    const ExperimentConfig& c = r.config;
    std::ostringstream out;
    auto line = [&out](const std::string& key, const std::string& value) { out << key << " = " << value << "\n"; };
    line("run_id", r.run_id);
    line("version", r.version);
    line("timestamp", r.timestamp);
    line("master_seed", std::to_string(c.master_seed));
    line("n_neurons", std::to_string(c.reservoir.n_neurons));
    line("input_width", std::to_string(c.encoder_width));
    line("n_instances", std::to_string(c.n_instances));
    line("train_steps", std::to_string(c.train_steps));
    line("test_steps", std::to_string(c.test_steps));
    line("washout", std::to_string(c.reservoir.washout));
    line("batch_size", std::to_string(c.reservoir.batch_size));
    line("threshold_mode", c.reservoir.threshold.mode == ThresholdConfig::Mode::fixed_dn ? "fixed_dn" : "quantile");
    line("threshold_fixed_dn", std::to_string(c.reservoir.threshold.fixed_dn));
    line("threshold_quantile", fmt12(c.reservoir.threshold.quantile));
    line("camera_present", r.camera ? "true" : "false");
    if (r.camera) {
        line("camera_gain", fmt12(r.camera->gain));
        line("camera_target_mean_dn", fmt12(r.camera->target_mean_dn));
    }
    line("ridge_alpha", fmt12(c.ridge.alpha));
    line("mg_beta", fmt12(c.mg.beta));
    line("mg_gamma", fmt12(c.mg.gamma));
    line("mg_tau", fmt12(c.mg.tau));
    line("mg_n_exp", fmt12(c.mg.n_exp));
    line("mg_h", fmt12(c.mg.h));
    line("mg_init_value", fmt12(c.mg.init_value));
    line("mg_transient_steps", std::to_string(c.mg.transient_steps));
    line("encoder_lo", fmt12(r.encoder.lo));
    line("encoder_hi", fmt12(r.encoder.hi));
    line("init_time_s", fmt12(r.init_time_s));
    line("iter_time_s_per_1000", fmt12(r.iter_time_s_per_1000));
    line("train_score", fmt12(r.train_score));
    line("test_score", fmt12(r.test_score));
    line("activation_mean", fmt12(r.activation_mean));
    line("activation_min", fmt12(r.activation_min));
    line("activation_max", fmt12(r.activation_max));
    // Trained readout export: width, penalty, then the weight vector itself.
    line("readout_width", std::to_string(r.readout.feature_width));
    line("readout_alpha", fmt12(r.readout.alpha));
    out << "readout_weights =";
    for (Eigen::Index i = 0; i < r.readout.weights.size(); ++i) out << " " << fmt12(r.readout.weights[i]);
    out << "\n";
    return out.str();
}

/// 32 encoded inputs strided across the training segment, all paired with
/// the instance-0 initial state; representative frames for gain calibration.
std::vector<DmdFrame> warmup_frames(const ReservoirConfig& rescfg, const ThermometerEncoder& encoder,
                                    std::span<const double> train_inputs)
{
    const ReservoirState state = init_state(rescfg);
    const std::size_t count = std::min<std::size_t>(32, train_inputs.size());
    std::vector<DmdFrame> frames;
    frames.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t idx = k * train_inputs.size() / count;
        frames.push_back(assemble_frame(encode(encoder, train_inputs[idx]), state.bits));
    }
    return frames;
}

}  // namespace

void write_series_csv(const MgSeries& series, const std::string& path)
{
    std::ostringstream out;
    out << "t,u\n";
    for (std::size_t t = 0; t < series.values.size(); ++t) out << t << "," << fmt12(series.values[t]) << "\n";
    write_file_atomic(path, out.str());
}

RunReport run_experiment(const ExperimentConfig& raw_config)
{
    raw_config.validate();
    const ExperimentConfig cfg = raw_config.resolved();

    RunReport report;
    report.config = cfg;
    report.run_id = make_run_id(cfg);
    report.version = SESN_VERSION;
    report.timestamp = utc_timestamp();

    // Data.
    const SupervisedSeries supervised = stage("timeseries", [&] {
        const MgSeries series = generate_mackey_glass(cfg.mg, cfg.train_steps + cfg.test_steps + 1);
        return make_supervised(series);
    });
    const std::span<const double> train_inputs(supervised.inputs.data(), cfg.train_steps);
    const std::span<const double> train_targets(supervised.targets.data(), cfg.train_steps);
    const std::span<const double> test_inputs(supervised.inputs.data() + cfg.train_steps, cfg.test_steps);
    const std::span<const double> test_targets(supervised.targets.data() + cfg.train_steps, cfg.test_steps);

    // Encoder calibration on the training inputs.
    const ThermometerEncoder encoder =
        stage("encoder-calibration", [&] { return calibrate(cfg.encoder_width, train_inputs); });
    report.encoder = encoder;

    // Transfer matrix; its construction time is the reported init time.
    const auto init_start = std::chrono::steady_clock::now();
    const TransferMatrix tm = stage("transfer-matrix", [&] {
        return build_transfer_matrix(cfg.reservoir.n_neurons, cfg.encoder_width + cfg.reservoir.n_neurons,
                                     cfg.master_seed);
    });
    report.init_time_s = seconds_since(init_start);

    // Camera gain calibration on a warmup batch.
    ReservoirConfig rescfg = cfg.reservoir;
    if (rescfg.camera) {
        rescfg.camera = stage("gain-calibration", [&] {
            const auto frames = warmup_frames(rescfg, encoder, train_inputs);
            const auto speckles = compute_speckle_batch(tm, frames);
            return calibrate_gain(*rescfg.camera, speckles);
        });
    }
    report.camera = rescfg.camera;

    // Timed training pass.
    std::vector<ReservoirState> states;
    for (std::size_t k = 0; k < cfg.n_instances; ++k) {
        ReservoirConfig inst = rescfg;
        inst.seed = instance_seed(rescfg.seed, k);
        states.push_back(init_state(inst));
    }
    const auto train_start = std::chrono::steady_clock::now();
    const StateHistory train_history = stage("train-pass", [&] {
        return run_parallel_from(rescfg, tm, encoder, states, train_inputs, train_targets, rescfg.washout);
    });
    report.iter_time_s_per_1000 = seconds_since(train_start) / static_cast<double>(cfg.train_steps) * 1000.0;

    // Readout.
    const ReadoutModel model = stage("readout-fit", [&] { return fit(cfg.ridge, train_history); });
    report.readout = model;
    report.train_score = stage("train-score", [&] { return score(predict(model, train_history), train_history.targets); });

    // Teacher-forced one-step-ahead continuation.
    const StateHistory test_history = stage("test-pass", [&] {
        return run_parallel_from(rescfg, tm, encoder, states, test_inputs, test_targets, 0);
    });
    const Eigen::VectorXd predictions = stage("predict", [&] { return predict(model, test_history); });
    report.test_score = stage("test-score", [&] { return score(predictions, test_history.targets); });

    // Activation summary over every driven step of both passes.
    {
        std::vector<double> fractions = train_history.activation_fractions;
        fractions.insert(fractions.end(), test_history.activation_fractions.begin(),
                         test_history.activation_fractions.end());
        report.activation_mean =
            std::accumulate(fractions.begin(), fractions.end(), 0.0) / static_cast<double>(fractions.size());
        const auto [mn, mx] = std::minmax_element(fractions.begin(), fractions.end());
        report.activation_min = *mn;
        report.activation_max = *mx;
    }

    // Artifacts; remove partial output if the second write fails.
    const fs::path dir(cfg.out_dir);
    const fs::path report_path = dir / ("report." + report.run_id);
    const fs::path predictions_path = dir / ("predictions." + report.run_id + ".csv");
    stage("write-artifacts", [&] {
        fs::create_directories(dir);
        write_file_atomic(report_path, format_report(report));
        try {
            std::ostringstream csv;
            csv << "t,target,prediction\n";
            for (Eigen::Index i = 0; i < predictions.size(); ++i)
                csv << cfg.train_steps + static_cast<std::size_t>(i) << "," << fmt12(test_history.targets[i]) << ","
                    << fmt12(predictions[i]) << "\n";
            write_file_atomic(predictions_path, csv.str());
        } catch (...) {
            std::error_code ec;
            fs::remove(report_path, ec);
            throw;
        }
        return 0;
    });
    report.report_path = report_path.string();
    report.predictions_path = predictions_path.string();
    return report;
}

std::vector<SweepEntry> run_size_sweep(const ExperimentConfig& config, std::span<const std::size_t> sizes,
                                       std::size_t seeds_per_size)
{
    if (sizes.empty()) throw std::invalid_argument("run_size_sweep: sizes must be non-empty");
    if (seeds_per_size < 1) throw std::invalid_argument("run_size_sweep: seeds_per_size must be >= 1");

    std::vector<SweepEntry> entries;
    entries.reserve(sizes.size() * seeds_per_size);
    for (std::size_t size : sizes) {
        for (std::size_t s = 0; s < seeds_per_size; ++s) {
            SweepEntry entry;
            entry.size = size;
            entry.seed = config.master_seed + s;
            ExperimentConfig run_cfg = config;
            run_cfg.reservoir.n_neurons = size;
            run_cfg.master_seed = entry.seed;
            try {
                entry.report = run_experiment(run_cfg);
            } catch (const std::exception& e) {
                entry.error = e.what();
            }
            entries.push_back(std::move(entry));
        }
    }

    // Aggregate over successful runs, one row per size.
    std::ostringstream csv;
    csv << "size,seed_count,mean_test_score,std_test_score,mean_iter_time_s_per_1000\n";
    for (std::size_t size : sizes) {
        std::vector<double> scores;
        std::vector<double> times;
        for (const SweepEntry& e : entries) {
            if (e.size != size || !e.ok()) continue;
            scores.push_back(e.report->test_score);
            times.push_back(e.report->iter_time_s_per_1000);
        }
        if (scores.empty()) continue;
        const double n = static_cast<double>(scores.size());
        const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) / n;
        double var = 0.0;
        for (double v : scores) var += (v - mean) * (v - mean);
        const double sd = scores.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
        const double mean_time = std::accumulate(times.begin(), times.end(), 0.0) / n;
        csv << size << "," << scores.size() << "," << fmt12(mean) << "," << fmt12(sd) << "," << fmt12(mean_time)
            << "\n";
    }
    fs::create_directories(config.out_dir);
    write_file_atomic(fs::path(config.out_dir) / "sweep_aggregate.csv", csv.str());
    return entries;
}

ThroughputRecord bench_throughput(const ExperimentConfig& raw_config, std::size_t n_steps)
{
    if (n_steps < 100) throw std::invalid_argument("bench_throughput: n_steps must be >= 100");
    raw_config.validate();
    const ExperimentConfig cfg = raw_config.resolved();

    constexpr std::size_t kWarmupSteps = 10;
    const MgSeries series = generate_mackey_glass(cfg.mg, n_steps + kWarmupSteps);
    const std::span<const double> inputs(series.values);
    const ThermometerEncoder encoder = calibrate(cfg.encoder_width, inputs);

    ThroughputRecord record;
    record.n_neurons = cfg.reservoir.n_neurons;
    record.n_steps = n_steps;

    const auto init_start = std::chrono::steady_clock::now();
    const TransferMatrix tm = build_transfer_matrix(cfg.reservoir.n_neurons,
                                                    cfg.encoder_width + cfg.reservoir.n_neurons, cfg.master_seed);
    record.init_time_s = seconds_since(init_start);

    ReservoirConfig rescfg = cfg.reservoir;
    if (rescfg.camera) {
        const auto frames = warmup_frames(rescfg, encoder, inputs);
        rescfg.camera = calibrate_gain(*rescfg.camera, compute_speckle_batch(tm, frames));
    }

    ReservoirState state = init_state(rescfg);
    for (std::size_t t = 0; t < kWarmupSteps; ++t) state = step(rescfg, tm, encoder, state, inputs[t]);

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t t = 0; t < n_steps; ++t) state = step(rescfg, tm, encoder, state, inputs[kWarmupSteps + t]);
    record.iter_time_s_per_1000 = seconds_since(start) / static_cast<double>(n_steps) * 1000.0;
    return record;
}

}  // namespace sesn
