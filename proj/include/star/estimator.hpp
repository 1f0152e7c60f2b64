#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "star/cp.hpp"
#include "star/spline.hpp"

namespace star {

/**
 * Per-way design F^k: n rows, p_k * R * d columns in the CpFactorBundle
 * layout, entry (i, (j, r, h)) = < prod_{u != k} beta_{uhr}, [F_h(X_i)] sliced at way k = j >.
 * Predictions (without intercept) equal matrix * factors[k].
 */
struct DesignMatrix {
    std::size_t way = 0;
    std::size_t group_size = 1;
    Eigen::MatrixXd matrix;
};

DesignMatrix build_design(const FeaturizedDataset& data, const CpFactorBundle& bundle,
                          std::size_t k);

/// sum_h < B_h, F_h(X_i) > for every sample (no intercept).
Eigen::VectorXd fitted_values(const FeaturizedDataset& data, const CpFactorBundle& bundle);

/// sum_k lambda_k sum_j ||group (k, j)||_2.
double group_penalty(const CpFactorBundle& bundle, std::span<const double> way_lambdas);

/// (1/n) ||y - intercept - fitted||^2 + lambda * sum_k sum_j ||group (k, j)||_2.
double objective(const FeaturizedDataset& data, const CpFactorBundle& bundle, double lambda);
double objective(const FeaturizedDataset& data, const CpFactorBundle& bundle,
                 std::span<const double> way_lambdas);

/// (2/n) F^k^T (F^k b_k - (y - intercept)).
Eigen::VectorXd grad_block(const FeaturizedDataset& data, const CpFactorBundle& bundle,
                           std::size_t k);

/// Groupwise soft-thresholding of consecutive groups of `group_size` entries.
Eigen::VectorXd group_prox(const Eigen::VectorXd& v, double tau, std::size_t group_size);

/**
 * The block subproblem min_b (1/n)||ytilde - F b||^2 + penalty in Gram form:
 * b' gram b - 2 linear' b + constant.
 */
struct BlockProblem {
    Eigen::MatrixXd gram;   // F'F / n
    Eigen::VectorXd linear; // F' ytilde / n
    double constant = 0.0;  // ||ytilde||^2 / n
    std::size_t group_size = 1;
    /// Groups whose design columns are identically zero.
    std::vector<bool> degenerate;

    static BlockProblem from_design(const DesignMatrix& design, const Eigen::VectorXd& ytilde);

    std::size_t groups() const noexcept { return degenerate.size(); }
    double loss(const Eigen::VectorXd& b) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& b) const;
    /// max_g ||(2/n) F_g' ytilde||: smallest lambda with zero as the block solution.
    double lambda_max() const;
};

/**
 * Max over non-degenerate groups of the optimality violation:
 * ||grad_g + lambda b_g / ||b_g|||| for active groups, (||grad_g|| - lambda)_+ for zero groups.
 */
double kkt_residual(const BlockProblem& problem, const Eigen::VectorXd& b, double lambda);

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 10000;
};

struct BlockSolution {
    Eigen::VectorXd b;
    int iterations = 0;
    bool converged = false;
    double kkt = 0.0;
};

/**
 * Accelerated proximal gradient for the group-lasso block problem, step 1/L with
 * L = 2 sigma_max(F'F / n) from power iteration, adaptive restart, and a
 * monotone acceptance rule. Stops when kkt_residual <= tol; otherwise the best
 * iterate is returned with converged = false.
 */
BlockSolution solve_block(const BlockProblem& problem, double lambda, const Eigen::VectorXd& warm,
                          const SolverOptions& options = {});
BlockSolution solve_block(const DesignMatrix& design, const Eigen::VectorXd& ytilde,
                          double lambda, const Eigen::VectorXd& warm,
                          const SolverOptions& options = {});

/// Ridge block solution (gram + mu I) b = linear; degenerate groups stay zero.
Eigen::VectorXd solve_ridge(const BlockProblem& problem, double mu);

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration(const Eigen::MatrixXd& sym, int max_iter = 500, double rel_tol = 1e-10);

enum class SweepOrder { gauss_seidel, jacobi };

/// Start point for each penalty of a path: previous solution, initialization, or whichever ends lower.
enum class PathStart { warm, cold, best };

struct FitConfig {
    std::size_t rank = 2;
    double lambda = 0.0;
    /// Optional per-way penalties; overrides `lambda` when non-empty.
    std::vector<double> way_lambdas;
    int max_sweeps = 200;
    double tol = 1e-5;
    double inner_tol = 1e-8;
    int inner_max_iter = 10000;
    /// Ridge penalty used during initialization, relative to mean(diag(F'F / n)).
    double ridge_strength = 1e-2;
    int ridge_sweeps = 3;
    std::uint64_t seed = 1;
    bool rebalance = false;
    SweepOrder order = SweepOrder::gauss_seidel;
    PathStart path_start = PathStart::cold;

    void validate(std::size_t ways) const;
    std::vector<double> lambdas(std::size_t ways) const;
};

struct FitResult {
    CpFactorBundle bundle;
    double intercept = 0.0;
    std::vector<std::vector<std::size_t>> active_sets;
    /// Objective at the start point followed by one value per sweep.
    std::vector<double> objective_trace;
    int sweeps = 0;
    bool converged = false;
    bool inner_converged = true;
    /// Response was constant; the zero bundle is returned.
    bool degenerate = false;
    double lambda = 0.0;
    std::size_t rank = 0;
    /// max over ways of BlockProblem::lambda_max at the start point.
    double lambda_max_at_start = 0.0;
};

/**
 * Seeded standard-normal factors with unit group norms, followed by
 * `ridge_sweeps` alternating ridge sweeps and per-(h, r) rebalancing.
 */
CpFactorBundle initialize(const FeaturizedDataset& data, const FitConfig& config);

/// max over ways of the block lambda_max with designs built from `bundle`.
double lambda_max(const FeaturizedDataset& data, const CpFactorBundle& bundle);

/// Penalized alternating minimization from the ridge initialization.
FitResult fit(const FeaturizedDataset& data, const FitConfig& config);
/// Penalized alternating minimization from a given start point.
FitResult fit(const FeaturizedDataset& data, const FitConfig& config, const CpFactorBundle& start);

/**
 * Fits a sequence of penalties sharing one initialization, visited in
 * decreasing order. `config.path_start` picks the start point per penalty;
 * `best` fits from both the previous non-zero solution and the
 * initialization and keeps the lower final objective. Results follow the
 * input order.
 */
std::vector<FitResult> fit_path(const FeaturizedDataset& data, const FitConfig& config,
                                std::span<const double> lambdas);

/**
 * Sum over ways of ||b_k - b_k*||^2 after resolving CP ambiguity: ranks are
 * matched greedily by |cosine| of their way-1 blocks, then every (h, r) term of
 * both bundles is rebalanced to equal per-way norms with signs fixed so the
 * largest-magnitude entry of ways 1..m-1 is positive.
 */
double estimation_error(const CpFactorBundle& estimate, const CpFactorBundle& truth);

/// The canonical form used by estimation_error (no rank permutation).
CpFactorBundle canonical_form(const CpFactorBundle& bundle);

} // namespace star
