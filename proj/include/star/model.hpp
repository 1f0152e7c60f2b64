#pragma once

#include <Eigen/Dense>

#include "star/dataset.hpp"
#include "star/estimator.hpp"
#include "star/spline.hpp"

namespace star {

/// A fitted model together with the featurization needed to score raw covariates.
struct StarModel {
    Shape shape;
    SplineBasis basis;
    EntryScaler scaler;
    FitResult fit;
};

/// Featurizes `data` (scaler fitted on it) and runs the estimator.
StarModel train(const RawData& data, const BasisConfig& basis, const FitConfig& config);

/// Wraps an existing fit on a featurized training set.
StarModel make_model(const FeaturizedDataset& training, FitResult fit);

/// Entry pos * d + h holds [B_h]_pos.
Eigen::VectorXd stacked_coefficients(const StarModel& model);

/// Contribution of one position at raw value `value`: sum_h [B_h]_pos (psi_h(scaled) - mean).
double position_effect(const StarModel& model, const Eigen::VectorXd& coefs, std::size_t position,
                       double value);

/// intercept + sum_h < B_h, F_h(X) >, with F_h built through the stored scaler.
double predict(const StarModel& model, const DenseTensor& x);
Eigen::VectorXd predict(const StarModel& model, const RawData& data);

} // namespace star
