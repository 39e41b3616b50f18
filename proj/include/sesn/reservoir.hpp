#pragma once

// Binary ESN loop: frame assembly, optics, activation, state collection. //

#include "sesn/encoding.hpp"
#include "sesn/optics.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sesn {

struct ReservoirConfig {
    std::size_t n_neurons = 4096;
    std::size_t input_width = 1000;
    std::size_t washout = 100;
    std::uint64_t seed = 0;
    ThresholdConfig threshold;
    /// Absent camera means the threshold operates on raw intensities
    /// (quantile mode); fixed_dn requires a camera.
    std::optional<CameraModel> camera = CameraModel{};
    std::size_t batch_size = 300;

    void validate() const;
};

struct ReservoirState {
    Bits bits;
    std::size_t step = 0;
};

/// Collected post-washout reservoir trajectory, ready for the readout.
/// Rows are timesteps; columns are n_instances state blocks mapped from
/// {0,1} to {-1,+1}, then one trailing bias column of 1.
struct StateHistory {
    Eigen::MatrixXd features;
    Eigen::VectorXd targets;
    /// Fraction of active neurons at each driven step, washout included.
    std::vector<double> activation_fractions;
    std::size_t state_width = 0;
    std::size_t n_instances = 1;
};

/// Seed of parallel instance `index`; instance 0 keeps the base seed so a
/// one-instance parallel run reproduces `run` exactly.
std::uint64_t instance_seed(std::uint64_t base, std::size_t index);

/// Bits i.i.d. Bernoulli(1/2) from the config seed, domain-separated from
/// the transfer-matrix stream.
ReservoirState init_state(const ReservoirConfig& cfg);

/// One iteration: encode input, concatenate with the state, pass through the
/// optics, threshold. Equals the manual composition of those stages.
ReservoirState step(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                    const ReservoirState& state, double input);

/// Drives a fresh reservoir through the inputs, discarding cfg.washout
/// initial states. inputs and targets must have equal length > washout.
StateHistory run(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                 std::span<const double> inputs, std::span<const double> targets);

/// Continuation variant: starts from `state` (updated in place) and discards
/// `washout` initial rows.
StateHistory run_from(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                      ReservoirState& state, std::span<const double> inputs, std::span<const double> targets,
                      std::size_t washout);

/// Advances n_instances independent reservoirs (distinct init seeds, same
/// transfer matrix, same input series), one batched optics call per step,
/// and concatenates their state blocks per row.
StateHistory run_parallel(const ReservoirConfig& cfg, const TransferMatrix& tm, const ThermometerEncoder& encoder,
                          std::span<const double> inputs, std::span<const double> targets, std::size_t n_instances);

/// run_parallel from caller-owned states (updated in place).
StateHistory run_parallel_from(const ReservoirConfig& cfg, const TransferMatrix& tm,
                               const ThermometerEncoder& encoder, std::vector<ReservoirState>& states,
                               std::span<const double> inputs, std::span<const double> targets, std::size_t washout);

}  // namespace sesn
