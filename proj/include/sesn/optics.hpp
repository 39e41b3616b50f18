#pragma once

// Scattering-medium and camera simulation: complex Gaussian transfer matrix,
// intensity formation |Hd|^2, 8-bit quantization, threshold activation. //

#include "sesn/encoding.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sesn {

/// Fixed random map from DMD pixels to camera pixels. Entries are i.i.d.
/// circular complex Gaussian with per-component standard deviation
/// 1/sqrt(2M), so E|h|^2 = 1/M and a frame with k active mirrors produces
/// mean intensity k/M.
struct TransferMatrix {
    Eigen::MatrixXcd entries;  // N x M, column-major
    std::uint64_t seed = 0;

    std::size_t rows() const { return static_cast<std::size_t>(entries.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(entries.cols()); }
};

/// Camera image: raw intensities, plus the 8-bit readout once quantized.
struct SpeckleFrame {
    Eigen::VectorXd intensities;
    std::optional<std::vector<std::uint8_t>> quantized;
};

struct CameraModel {
    double gain = 1.0;
    int saturation_dn = 255;
    double target_mean_dn = 48.0;

    void validate() const;
};

/// Neuron activation rule. fixed_dn thresholds the 8-bit camera value
/// (strict >); quantile thresholds raw intensities at a per-frame empirical
/// quantile, which makes the dynamics independent of the overall intensity
/// scale.
struct ThresholdConfig {
    enum class Mode { fixed_dn, quantile };

    Mode mode = Mode::fixed_dn;
    int fixed_dn = 24;
    double quantile = 0.5;

    void validate() const;
};

/// Deterministic in (n, m, seed); regeneration is bit-identical.
TransferMatrix build_transfer_matrix(std::size_t n, std::size_t m, std::uint64_t seed);

/// s_i = |sum_j H_ij d_j|^2, the field summed over active columns in
/// ascending j. The summation order per output element is fixed, so results
/// do not depend on the worker count.
SpeckleFrame compute_speckle(const TransferMatrix& tm, const DmdFrame& frame);

/// Elementwise identical to mapping compute_speckle over the batch; a
/// mismatched frame aborts the whole batch naming its index.
std::vector<SpeckleFrame> compute_speckle_batch(const TransferMatrix& tm, std::span<const DmdFrame> frames);

/// quantized_i = min(saturation, floor(gain * s_i)); raw intensities kept.
SpeckleFrame quantize(const CameraModel& camera, const SpeckleFrame& frame);

/// gain = target_mean_dn / mean intensity over the calibration frames.
CameraModel calibrate_gain(const CameraModel& camera_template, std::span<const SpeckleFrame> calibration);

/// Next binary state; ties at the threshold resolve to 0 in both modes.
Bits activate(const ThresholdConfig& cfg, const SpeckleFrame& frame);

}  // namespace sesn
