#include "sesn/optics.hpp"

#include "sesn/common.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>
#include <string>

namespace sesn {

void CameraModel::validate() const
{
    if (!(gain > 0.0) || !std::isfinite(gain)) throw std::invalid_argument("CameraModel: gain must be positive");
    if (saturation_dn < 0 || saturation_dn > 255)
        throw std::invalid_argument("CameraModel: saturation_dn must lie in [0, 255]");
    if (!(target_mean_dn > 0.0)) throw std::invalid_argument("CameraModel: target_mean_dn must be positive");
}

void ThresholdConfig::validate() const
{
    if (fixed_dn < 0 || fixed_dn > 255) throw std::invalid_argument("ThresholdConfig: fixed_dn must lie in [0, 255]");
    if (!(quantile > 0.0 && quantile < 1.0))
        throw std::invalid_argument("ThresholdConfig: quantile must lie in (0, 1)");
}

TransferMatrix build_transfer_matrix(std::size_t n, std::size_t m, std::uint64_t seed)
{
    if (n < 1 || m < 1) throw std::invalid_argument("build_transfer_matrix: dimensions must be >= 1");
    const std::size_t budget = memory_budget_bytes();
    constexpr std::size_t entry_bytes = sizeof(std::complex<double>);
    // Division-form check so an overflowing n*m cannot slip past the budget.
    if (m > budget / entry_bytes || n > budget / entry_bytes / m)
        throw std::invalid_argument("build_transfer_matrix: " + std::to_string(n) + "x" + std::to_string(m)
                                    + " entries exceed the configured memory budget of " + std::to_string(budget)
                                    + " bytes");

    TransferMatrix tm;
    tm.seed = seed;
    tm.entries.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));

    std::mt19937_64 rng(mix_seed(seed ^ seed_domain::transfer_matrix));
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0 * static_cast<double>(m)));
    // Column-major fill order is part of the determinism contract.
    std::complex<double>* data = tm.entries.data();
    const std::size_t count = n * m;
    for (std::size_t i = 0; i < count; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        data[i] = {re, im};
    }
    return tm;
}

namespace {

/// Accumulates the field for rows [r0, r1) of every frame in the batch.
/// Columns are visited in ascending j, so each output element sees the same
/// addition order no matter how rows are partitioned across workers.
void accumulate_rows(const Eigen::MatrixXcd& h, std::span<const DmdFrame> frames, Eigen::MatrixXcd& field,
                     Eigen::Index r0, Eigen::Index r1)
{
    const Eigen::Index len = r1 - r0;
    const Eigen::Index m = h.cols();
    const auto batch = static_cast<Eigen::Index>(frames.size());
    for (Eigen::Index j = 0; j < m; ++j) {
        const auto col = h.col(j).segment(r0, len);
        for (Eigen::Index b = 0; b < batch; ++b) {
            if (frames[static_cast<std::size_t>(b)].bits[static_cast<std::size_t>(j)])
                field.col(b).segment(r0, len) += col;
        }
    }
}

Eigen::MatrixXcd compute_field(const TransferMatrix& tm, std::span<const DmdFrame> frames)
{
    const auto n = static_cast<Eigen::Index>(tm.rows());
    Eigen::MatrixXcd field = Eigen::MatrixXcd::Zero(n, static_cast<Eigen::Index>(frames.size()));

    const auto workers = static_cast<Eigen::Index>(std::clamp<std::size_t>(num_threads(), 1, tm.rows()));
    if (workers == 1) {
        accumulate_rows(tm.entries, frames, field, 0, n);
        return field;
    }
    std::vector<std::future<void>> tasks;
    tasks.reserve(static_cast<std::size_t>(workers));
    for (Eigen::Index w = 0; w < workers; ++w) {
        const Eigen::Index r0 = n * w / workers;
        const Eigen::Index r1 = n * (w + 1) / workers;
        if (r0 == r1) continue;
        tasks.push_back(std::async(std::launch::async,
                                   [&, r0, r1] { accumulate_rows(tm.entries, frames, field, r0, r1); }));
    }
    for (auto& t : tasks) t.get();
    return field;
}

}  // namespace

SpeckleFrame compute_speckle(const TransferMatrix& tm, const DmdFrame& frame)
{
    if (frame.size() != tm.cols())
        throw std::invalid_argument("compute_speckle: frame has " + std::to_string(frame.size())
                                    + " pixels but the transfer matrix has " + std::to_string(tm.cols()) + " columns");
    const Eigen::MatrixXcd field = compute_field(tm, std::span<const DmdFrame>(&frame, 1));
    SpeckleFrame out;
    out.intensities = field.col(0).cwiseAbs2();
    return out;
}

std::vector<SpeckleFrame> compute_speckle_batch(const TransferMatrix& tm, std::span<const DmdFrame> frames)
{
    for (std::size_t b = 0; b < frames.size(); ++b) {
        if (frames[b].size() != tm.cols())
            throw std::invalid_argument("compute_speckle_batch: frame " + std::to_string(b) + " has "
                                        + std::to_string(frames[b].size()) + " pixels but the transfer matrix has "
                                        + std::to_string(tm.cols()) + " columns");
    }
    std::vector<SpeckleFrame> out(frames.size());
    if (frames.empty()) return out;
    const Eigen::MatrixXcd field = compute_field(tm, frames);
    for (std::size_t b = 0; b < frames.size(); ++b)
        out[b].intensities = field.col(static_cast<Eigen::Index>(b)).cwiseAbs2();
    return out;
}

SpeckleFrame quantize(const CameraModel& camera, const SpeckleFrame& frame)
{
    camera.validate();
    SpeckleFrame out;
    out.intensities = frame.intensities;
    std::vector<std::uint8_t> dn(static_cast<std::size_t>(frame.intensities.size()));
    const double cap = static_cast<double>(camera.saturation_dn);
    for (Eigen::Index i = 0; i < frame.intensities.size(); ++i) {
        const double level = std::floor(camera.gain * frame.intensities[i]);
        dn[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::clamp(level, 0.0, cap));
    }
    out.quantized = std::move(dn);
    return out;
}

CameraModel calibrate_gain(const CameraModel& camera_template, std::span<const SpeckleFrame> calibration)
{
    if (calibration.empty()) throw std::invalid_argument("calibrate_gain: empty calibration set");
    double sum = 0.0;
    std::size_t count = 0;
    for (const SpeckleFrame& frame : calibration) {
        sum += frame.intensities.sum();
        count += static_cast<std::size_t>(frame.intensities.size());
    }
    if (count == 0 || !(sum > 0.0))
        throw std::invalid_argument("calibrate_gain: calibration set has zero mean intensity");
    CameraModel camera = camera_template;
    camera.gain = camera.target_mean_dn / (sum / static_cast<double>(count));
    camera.validate();
    return camera;
}

Bits activate(const ThresholdConfig& cfg, const SpeckleFrame& frame)
{
    cfg.validate();
    const auto n = static_cast<std::size_t>(frame.intensities.size());
    Bits state(n);
    if (cfg.mode == ThresholdConfig::Mode::fixed_dn) {
        if (!frame.quantized)
            throw std::invalid_argument("activate: fixed_dn mode requires a quantized frame");
        const auto& dn = *frame.quantized;
        if (dn.size() != n) throw std::invalid_argument("activate: quantized and intensity sizes differ");
        for (std::size_t i = 0; i < n; ++i) state[i] = dn[i] > cfg.fixed_dn ? 1 : 0;
        return state;
    }
    // Empirical quantile as an order statistic of this frame, so that scaling
    // all intensities by c > 0 leaves the activations unchanged.
    if (n == 0) return state;
    std::vector<double> sorted(frame.intensities.data(), frame.intensities.data() + n);
    const auto rank = static_cast<std::size_t>(std::ceil(cfg.quantile * static_cast<double>(n)));
    const std::size_t idx = std::min(n - 1, rank == 0 ? 0 : rank - 1);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
    const double threshold = sorted[idx];
    for (std::size_t i = 0; i < n; ++i) state[i] = frame.intensities[i] > threshold ? 1 : 0;
    return state;
}

}  // namespace sesn
