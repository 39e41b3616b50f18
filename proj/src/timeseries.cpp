#include "sesn/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sesn {

std::size_t MgParams::delay_steps() const
{
    if (h <= 0.0 || !std::isfinite(h)) throw std::invalid_argument("MgParams: h must be positive and finite");
    if (tau <= 0.0 || !std::isfinite(tau)) throw std::invalid_argument("MgParams: tau must be positive and finite");
    const double ratio = tau / h;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("MgParams: tau/h must be a positive integer, got " + std::to_string(ratio));
    return static_cast<std::size_t>(rounded);
}

void MgParams::validate() const
{
    delay_steps();
    // beta == 0 is admitted: it removes the delayed drive and leaves a pure
    // exponential decay, which the tests use as an analytic reference.
    if (beta < 0.0 || !std::isfinite(beta)) throw std::invalid_argument("MgParams: beta must be >= 0 and finite");
    if (gamma <= 0.0 || !std::isfinite(gamma)) throw std::invalid_argument("MgParams: gamma must be positive and finite");
    if (n_exp < 1.0 || !std::isfinite(n_exp)) throw std::invalid_argument("MgParams: n_exp must be >= 1 and finite");
    if (!std::isfinite(init_value)) throw std::invalid_argument("MgParams: init_value must be finite");
}

MgSeries generate_mackey_glass(const MgParams& params, std::size_t length)
{
    params.validate();
    if (length == 0) throw std::invalid_argument("generate_mackey_glass: length must be positive");

    const std::size_t delay = params.delay_steps();
    const std::size_t total = params.transient_steps + length;

    // raw[t] = u(t*h); raw[0] is the end of the constant history.
    std::vector<double> raw(total);
    raw[0] = params.init_value;
    for (std::size_t t = 0; t + 1 < total; ++t) {
        const double u = raw[t];
        const double u_tau = t >= delay ? raw[t - delay] : params.init_value;
        const double drive = params.beta * u_tau / (1.0 + std::pow(u_tau, params.n_exp));
        const double next = u + params.h * (drive - params.gamma * u);
        if (!std::isfinite(next))
            throw std::runtime_error("generate_mackey_glass: integration diverged at step " + std::to_string(t + 1)
                                     + "; parameters appear unstable under Euler integration");
        raw[t + 1] = next;
    }

    MgSeries out;
    out.params = params;
    out.values.assign(raw.begin() + static_cast<std::ptrdiff_t>(params.transient_steps), raw.end());
    return out;
}

SupervisedSeries make_supervised(const MgSeries& series)
{
    const std::size_t n = series.values.size();
    if (n < 2) throw std::invalid_argument("make_supervised: series must have at least 2 samples");
    SupervisedSeries out;
    out.inputs.assign(series.values.begin(), series.values.end() - 1);
    out.targets.assign(series.values.begin() + 1, series.values.end());
    return out;
}

}  // namespace sesn
