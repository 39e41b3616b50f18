#include "sesn/reservoir.hpp"

#include "sesn/common.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace sesn {

void ReservoirConfig::validate() const
{
    if (n_neurons < 1) throw std::invalid_argument("ReservoirConfig: n_neurons must be >= 1");
    if (input_width < 1) throw std::invalid_argument("ReservoirConfig: input_width must be >= 1");
    if (batch_size < 1 || batch_size > 3000)
        throw std::invalid_argument("ReservoirConfig: batch_size must lie in [1, 3000]");
    threshold.validate();
    if (camera) camera->validate();
    if (threshold.mode == ThresholdConfig::Mode::fixed_dn && !camera)
        throw std::invalid_argument("ReservoirConfig: fixed_dn threshold requires a camera model");
}

std::uint64_t instance_seed(std::uint64_t base, std::size_t index)
{
    return index == 0 ? base : mix_seed(base + static_cast<std::uint64_t>(index));
}

ReservoirState init_state(const ReservoirConfig& cfg)
{
    cfg.validate();
    ReservoirState state;
    state.bits.resize(cfg.n_neurons);
    std::mt19937_64 rng(mix_seed(cfg.seed ^ seed_domain::reservoir_init));
    for (auto& bit : state.bits) bit = static_cast<std::uint8_t>(rng() & 1u);
    return state;
}

namespace {

Bits threshold_frame(const ReservoirConfig& cfg, const SpeckleFrame& speckle)
{
    if (cfg.camera) return activate(cfg.threshold, quantize(*cfg.camera, speckle));
    return activate(cfg.threshold, speckle);
}

double popcount_fraction(const Bits& bits)
{
    std::size_t ones = 0;
    for (auto b : bits) ones += b;
    return static_cast<double>(ones) / static_cast<double>(bits.size());
}

void check_run_args(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                    std::span<const double> inputs, std::span<const double> targets, std::size_t washout)
{
    cfg.validate();
    encoder.validate();
    if (encoder.width != cfg.input_width)
        throw std::invalid_argument("run: encoder width " + std::to_string(encoder.width)
                                    + " does not match configured input_width " + std::to_string(cfg.input_width));
    if (tm.cols() != cfg.input_width + cfg.n_neurons)
        throw std::invalid_argument("run: transfer matrix has " + std::to_string(tm.cols())
                                    + " columns, expected input_width + n_neurons = "
                                    + std::to_string(cfg.input_width + cfg.n_neurons));
    if (tm.rows() != cfg.n_neurons)
        throw std::invalid_argument("run: transfer matrix has " + std::to_string(tm.rows())
                                    + " rows, expected n_neurons = " + std::to_string(cfg.n_neurons));
    if (inputs.size() != targets.size())
        throw std::invalid_argument("run: inputs (" + std::to_string(inputs.size()) + ") and targets ("
                                    + std::to_string(targets.size()) + ") must have equal length");
    if (inputs.size() < washout + 1)
        throw std::invalid_argument("run: need at least washout + 1 = " + std::to_string(washout + 1)
                                    + " steps, got " + std::to_string(inputs.size()));
}

}  // namespace

ReservoirState step(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                    const ReservoirState& state, double input)
{
    cfg.validate();
    if (state.bits.size() != cfg.n_neurons)
        throw std::invalid_argument("step: state has " + std::to_string(state.bits.size()) + " bits, expected "
                                    + std::to_string(cfg.n_neurons));
    const DmdFrame frame = assemble_frame(encode(encoder, input), state.bits);
    const SpeckleFrame speckle = compute_speckle(tm, frame);
    ReservoirState next;
    next.bits = threshold_frame(cfg, speckle);
    next.step = state.step + 1;
    return next;
}

StateHistory run_from(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                      ReservoirState& state, std::span<const double> inputs, std::span<const double> targets,
                      std::size_t washout)
{
    check_run_args(cfg, tm, encoder, inputs, targets, washout);
    if (state.bits.size() != cfg.n_neurons)
        throw std::invalid_argument("run: starting state has " + std::to_string(state.bits.size())
                                    + " bits, expected " + std::to_string(cfg.n_neurons));

    const std::size_t steps = inputs.size();
    const std::size_t rows = steps - washout;
    const std::size_t width = cfg.n_neurons + 1;

    StateHistory history;
    history.state_width = cfg.n_neurons;
    history.n_instances = 1;
    history.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
    history.targets.resize(static_cast<Eigen::Index>(rows));
    history.activation_fractions.reserve(steps);

    for (std::size_t t = 0; t < steps; ++t) {
        state = step(cfg, tm, encoder, state, inputs[t]);
        history.activation_fractions.push_back(popcount_fraction(state.bits));
        if (t < washout) continue;
        const auto row = static_cast<Eigen::Index>(t - washout);
        for (std::size_t i = 0; i < cfg.n_neurons; ++i)
            history.features(row, static_cast<Eigen::Index>(i)) = state.bits[i] ? 1.0 : -1.0;
        history.features(row, static_cast<Eigen::Index>(cfg.n_neurons)) = 1.0;
        history.targets[row] = targets[t];
    }
    return history;
}

StateHistory run(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                 std::span<const double> inputs, std::span<const double> targets)
{
    ReservoirState state = init_state(cfg);
    return run_from(cfg, tm, encoder, state, inputs, targets, cfg.washout);
}

StateHistory run_parallel_from(const ReservoirConfig& cfg, const TransferMatrix& tm,
                               const ThermometerEncoder& encoder, std::vector<ReservoirState>& states,
                               std::span<const double> inputs, std::span<const double> targets, std::size_t washout)
{
    check_run_args(cfg, tm, encoder, inputs, targets, washout);
    const std::size_t n_instances = states.size();
    if (n_instances < 1) throw std::invalid_argument("run_parallel: n_instances must be >= 1");
    for (const auto& s : states)
        if (s.bits.size() != cfg.n_neurons)
            throw std::invalid_argument("run_parallel: instance state size mismatch");

    const std::size_t steps = inputs.size();
    const std::size_t rows = steps - washout;
    if (n_instances > (std::numeric_limits<std::size_t>::max() - 1) / cfg.n_neurons)
        throw std::invalid_argument("run_parallel: instance count overflows the feature width");
    const std::size_t width = n_instances * cfg.n_neurons + 1;
    const std::size_t budget = memory_budget_bytes();
    if (width > budget / sizeof(double) / rows)
        throw std::invalid_argument("run_parallel: history of " + std::to_string(rows) + "x" + std::to_string(width)
                                    + " exceeds the configured memory budget of " + std::to_string(budget) + " bytes");

    StateHistory history;
    history.state_width = cfg.n_neurons;
    history.n_instances = n_instances;
    history.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
    history.targets.resize(static_cast<Eigen::Index>(rows));
    history.activation_fractions.reserve(steps);

    std::vector<DmdFrame> frames(n_instances);
    for (std::size_t t = 0; t < steps; ++t) {
        const Bits encoded = encode(encoder, inputs[t]);
        for (std::size_t k = 0; k < n_instances; ++k) frames[k] = assemble_frame(encoded, states[k].bits);

        // One batched optics call per step, chunked to the configured batch size.
        for (std::size_t begin = 0; begin < n_instances; begin += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n_instances - begin);
            const auto speckles =
                compute_speckle_batch(tm, std::span<const DmdFrame>(frames.data() + begin, count));
            for (std::size_t k = 0; k < count; ++k) {
                auto& state = states[begin + k];
                state.bits = threshold_frame(cfg, speckles[k]);
                state.step += 1;
            }
        }

        double active = 0.0;
        for (const auto& s : states) active += popcount_fraction(s.bits);
        history.activation_fractions.push_back(active / static_cast<double>(n_instances));

        if (t < washout) continue;
        const auto row = static_cast<Eigen::Index>(t - washout);
        for (std::size_t k = 0; k < n_instances; ++k) {
            const Eigen::Index base = static_cast<Eigen::Index>(k * cfg.n_neurons);
            for (std::size_t i = 0; i < cfg.n_neurons; ++i)
                history.features(row, base + static_cast<Eigen::Index>(i)) = states[k].bits[i] ? 1.0 : -1.0;
        }
        history.features(row, static_cast<Eigen::Index>(width - 1)) = 1.0;
        history.targets[row] = targets[t];
    }
    return history;
}

StateHistory run_parallel(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                          std::span<const double> inputs, std::span<const double> targets, std::size_t n_instances)
{
    if (n_instances < 1) throw std::invalid_argument("run_parallel: n_instances must be >= 1");
    std::vector<ReservoirState> states;
    states.reserve(n_instances);
    for (std::size_t k = 0; k < n_instances; ++k) {
        ReservoirConfig inst = cfg;
        inst.seed = instance_seed(cfg.seed, k);
        states.push_back(init_state(inst));
    }
    return run_parallel_from(cfg, tm, encoder, states, inputs, targets, cfg.washout);
}

}  // namespace sesn
