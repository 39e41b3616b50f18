#pragma once

// Thermometer encoding of scalar inputs and DMD frame assembly. //

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sesn {

/// Binary vector as displayed on the simulated DMD; one byte per mirror.
using Bits = std::vector<std::uint8_t>;

/// Unary prefix code: a scalar maps to k leading ones out of `width` bits,
/// with k proportional to its position inside [lo, hi].
struct ThermometerEncoder {
    std::size_t width = 1000;
    double lo = 0.0;
    double hi = 1.0;

    void validate() const;
};

/// Concatenated DMD image: encoded input block followed by the state block.
struct DmdFrame {
    Bits bits;
    std::size_t input_width = 0;
    std::size_t state_width = 0;

    std::size_t size() const { return bits.size(); }
};

/// Fits calibration bounds around the observed samples with a 5% margin on
/// each side. A degenerate sample set (max == min) falls back to a unit span:
/// lo = min - 0.05, hi = lo + 1.
ThermometerEncoder calibrate(std::size_t width, std::span<const double> samples);

/// k = round(width * clamp((u - lo)/(hi - lo), 0, 1)) leading ones.
Bits encode(const ThermometerEncoder& enc, double u);

DmdFrame assemble_frame(const Bits& encoded_input, const Bits& state);

}  // namespace sesn
