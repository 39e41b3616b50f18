#include "sesn/readout.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sesn {

void RidgeConfig::validate() const
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("RidgeConfig: alpha must be finite and >= 0");
}

ReadoutModel fit(const RidgeConfig& cfg, const StateHistory& history)
{
    cfg.validate();
    const Eigen::MatrixXd& x = history.features;
    const Eigen::VectorXd& y = history.targets;
    if (x.rows() < 1) throw std::invalid_argument("fit: history has no rows");
    if (x.rows() != y.size()) throw std::invalid_argument("fit: feature rows and target length differ");
    if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("fit: non-finite entries in history");

    const Eigen::Index width = x.cols();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(width, width);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    gram.diagonal().array() += cfg.alpha;
    const Eigen::VectorXd rhs = x.transpose() * y;

    ReadoutModel model;
    model.alpha = cfg.alpha;
    model.feature_width = static_cast<std::size_t>(width);

    Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(gram);
    bool factorized = llt.info() == Eigen::Success;
    if (factorized && cfg.alpha == 0.0) {
        // Rank deficiency can slip through the factorization: an exactly
        // cancelled pivot computes as sqrt(O(eps)) of the column scale.
        const Eigen::VectorXd pivots = llt.matrixLLT().diagonal();
        const double floor = pivots.maxCoeff()
                             * std::sqrt(static_cast<double>(width) * std::numeric_limits<double>::epsilon());
        factorized = pivots.minCoeff() > floor;
    }
    if (factorized) {
        model.weights = llt.solve(rhs);
        if (model.weights.allFinite()) return model;
    }
    if (cfg.alpha == 0.0)
        throw std::runtime_error("fit: normal equations are singular with alpha = 0; use alpha > 0");

    // SVD fallback for an ill-conditioned but regularized system.
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    model.weights = svd.solve(rhs);
    if (!model.weights.allFinite()) throw std::runtime_error("fit: readout solve failed to produce finite weights");
    return model;
}

Eigen::VectorXd predict(const ReadoutModel& model, const StateHistory& history)
{
    if (static_cast<std::size_t>(history.features.cols()) != model.feature_width)
        throw std::invalid_argument("predict: history width " + std::to_string(history.features.cols())
                                    + " does not match model width " + std::to_string(model.feature_width));
    return history.features * model.weights;
}

double score(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets)
{
    if (predictions.size() == 0 || predictions.size() != targets.size())
        throw std::invalid_argument("score: predictions and targets must have equal nonzero length");
    const double mean = targets.mean();
    const double ss_total = (targets.array() - mean).square().sum();
    if (ss_total == 0.0) throw std::invalid_argument("score: targets have zero variance");
    const double ss_residual = (targets - predictions).squaredNorm();
    return 1.0 - ss_residual / ss_total;
}

}  // namespace sesn
