#pragma once

// Ridge-regression readout and coefficient-of-determination scoring. //

#include "sesn/reservoir.hpp"

#include <Eigen/Dense>
#include <cstddef>

namespace sesn {

struct RidgeConfig {
    double alpha = 30.0;

    void validate() const;
};

/// Trained linear readout. The weight vector spans the full feature width,
/// bias position included; the bias coordinate is penalized like every other
/// coordinate.
struct ReadoutModel {
    Eigen::VectorXd weights;
    double alpha = 0.0;
    std::size_t feature_width = 0;
};

/// Solves (X^T X + alpha I) w = X^T y through a symmetric positive-definite
/// factorization of the normal equations, with a dense SVD fallback if the
/// factorization fails with alpha > 0. A singular system at alpha = 0 is
/// reported as an error.
ReadoutModel fit(const RidgeConfig& cfg, const StateHistory& history);

Eigen::VectorXd predict(const ReadoutModel& model, const StateHistory& history);

/// R^2 = 1 - sum (y - yhat)^2 / sum (y - mean y)^2. Requires non-constant
/// targets; 1 means a perfect prediction.
double score(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

}  // namespace sesn
