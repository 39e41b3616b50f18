#include "sesn/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sesn {

void ThermometerEncoder::validate() const
{
    if (width < 1) throw std::invalid_argument("ThermometerEncoder: width must be >= 1");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("ThermometerEncoder: requires finite lo < hi");
}

ThermometerEncoder calibrate(std::size_t width, std::span<const double> samples)
{
    if (samples.empty()) throw std::invalid_argument("calibrate: empty sample set");
    double mn = samples[0];
    double mx = samples[0];
    for (double s : samples) {
        if (!std::isfinite(s)) throw std::invalid_argument("calibrate: non-finite sample");
        mn = std::min(mn, s);
        mx = std::max(mx, s);
    }
    ThermometerEncoder enc;
    enc.width = width;
    if (mx == mn) {
        enc.lo = mn - 0.05;
        enc.hi = enc.lo + 1.0;
    } else {
        const double margin = 0.05 * (mx - mn);
        enc.lo = mn - margin;
        enc.hi = mx + margin;
    }
    enc.validate();
    return enc;
}

Bits encode(const ThermometerEncoder& enc, double u)
{
    enc.validate();
    if (!std::isfinite(u)) throw std::invalid_argument("encode: non-finite input");
    const double frac = std::clamp((u - enc.lo) / (enc.hi - enc.lo), 0.0, 1.0);
    const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(enc.width) * frac));
    Bits bits(enc.width, 0);
    std::fill_n(bits.begin(), k, std::uint8_t{1});
    return bits;
}

DmdFrame assemble_frame(const Bits& encoded_input, const Bits& state)
{
    if (encoded_input.empty() || state.empty())
        throw std::invalid_argument("assemble_frame: input and state blocks must both be non-empty");
    DmdFrame frame;
    frame.input_width = encoded_input.size();
    frame.state_width = state.size();
    frame.bits.reserve(encoded_input.size() + state.size());
    frame.bits.insert(frame.bits.end(), encoded_input.begin(), encoded_input.end());
    frame.bits.insert(frame.bits.end(), state.begin(), state.end());
    return frame;
}

}  // namespace sesn
