#pragma once

// Mackey-Glass generator and one-step-ahead dataset packaging. //

#include <cstddef>
#include <vector>

namespace sesn {

/// Parameters of the Mackey-Glass delay differential equation
///   du/dt = beta * u(t - tau) / (1 + u(t - tau)^n) - gamma * u(t)
/// integrated by explicit Euler with step h. The history is the constant
/// init_value for t <= 0 and the first transient_steps samples are dropped.
struct MgParams {
    double beta = 0.2;
    double gamma = 0.1;
    double tau = 17.0;
    double n_exp = 10.0;
    double h = 1.0;
    double init_value = 1.2;
    std::size_t transient_steps = 1000;

    /// tau expressed in whole Euler steps (tau/h must be a positive integer).
    std::size_t delay_steps() const;
    void validate() const;
};

struct MgSeries {
    std::vector<double> values;
    MgParams params;
};

/// Inputs i(t) = u(t) paired with targets o(t) = u(t+1), length T-1.
struct SupervisedSeries {
    std::vector<double> inputs;
    std::vector<double> targets;
};

/// Returns `length` post-transient samples. Deterministic: the same params
/// always produce the same values. Sample 0 of the raw (pre-discard) stream
/// is u(0) = init_value; every further sample is one Euler step.
MgSeries generate_mackey_glass(const MgParams& params, std::size_t length);

SupervisedSeries make_supervised(const MgSeries& series);

}  // namespace sesn
