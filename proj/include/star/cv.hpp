#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "star/dataset.hpp"
#include "star/estimator.hpp"
#include "star/spline.hpp"

namespace star {

/// Mean squared difference; throws std::invalid_argument on empty or unequal inputs.
double mse(std::span<const double> predictions, std::span<const double> targets);
double mse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

/**
 * Seeded random fold labels in [0, folds): a shuffled permutation dealt
 * round-robin, so fold sizes differ by at most one.
 */
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

/// `points` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> log_grid(double lambda_max, std::size_t points, double ratio);

struct CvConfig {
    BasisConfig basis;
    /// rank and lambda are taken from the grid; everything else is used as is.
    FitConfig fit;
    /// Shared penalty grid. Empty: per rank, log_grid over the full-data lambda_max.
    std::vector<double> lambdas;
    std::vector<std::size_t> ranks = {1, 2, 3};
    std::size_t folds = 5;
    std::uint64_t seed = 1;
    std::size_t lambda_points = 10;
    double lambda_ratio = 1e-3;
    std::size_t workers = 1;
    /// Called once per fold with the scaler fitted on that fold's training split.
    std::function<void(std::size_t fold, const EntryScaler&)> scaler_observer;
};

struct CvCell {
    double lambda = 0.0;
    std::size_t rank = 0;
    std::vector<double> fold_mse;
    /// 1 if every fit for that fold converged.
    std::vector<int> fold_converged;
    double mean_mse = 0.0;
    bool converged = true;
};

struct CvReport {
    /// Rank-major: all penalties of ranks[0], then ranks[1], ...
    std::vector<CvCell> cells;
    std::size_t selected = 0;
    std::vector<std::size_t> fold_of;
    std::uint64_t seed = 0;
    bool all_converged = true;

    const CvCell& best() const { return cells.at(selected); }
};

/// Penalty grid for one rank under `config` (explicit grid or the default).
std::vector<double> lambda_grid(const RawData& data, const CvConfig& config, std::size_t rank);

/**
 * K-fold cross-validation over (lambda, R). The scaler and featurization are
 * fitted on each training split only. The selected cell has the smallest mean
 * validation MSE; ties go to the larger lambda, then the smaller rank.
 */
CvReport cross_validate(const RawData& data, const CvConfig& config);

/// Runs `count` independent tasks on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

} // namespace star
