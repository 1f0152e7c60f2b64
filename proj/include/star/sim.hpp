#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "star/dataset.hpp"

namespace star {

/// `linear` is a sanity design: y = sum of the 10 x 4 important entries.
enum class Design { low_rank, general, three_way_case1, three_way_case2, linear };

std::string to_string(Design design);
Design parse_design(const std::string& name);

struct SimSpec {
    Design design = Design::general;
    std::size_t n = 400;
    std::size_t p1 = 20;
    /// 0 selects the design default (8 for two-way designs, 10 for three-way).
    std::size_t p2 = 0;
    /// Three-way designs only; 0 selects the default of 2.
    std::size_t p3 = 0;
    double sigma = 0.1;
    std::uint64_t seed = 1;
    /// Covariate entries (and low-rank factor entries) are U(low, high).
    double low = 0.0;
    double high = 1.0;

    Shape shape() const;
    void validate() const;
};

struct SimOutput {
    RawData data;
    Eigen::VectorXd noiseless;
    /// 0-based important indices per way.
    std::vector<std::vector<std::size_t>> active_sets;
    /// Low-rank design only: X_i = factor1.row(i) o factor2.row(i).
    RowMatrix factor1;
    RowMatrix factor2;
};

/// Normal density with mean `mean` and standard deviation `sd`.
double normal_pdf(double x, double mean, double sd);

/**
 * T*_{jk} of the general design, indices 1-based:
 * j odd, k odd: -sin(1.5x); j even, k odd: x^3 + 1.5(x - 0.5)^2;
 * j odd, k even: -phi(x; 0.5, 0.8^2); j even, k even: sin(exp(-0.5x)).
 */
std::function<double(double)> component_functions(std::size_t j, std::size_t k);

/// Low-rank design factor functions (1-based): first way by parity of j, second by parity of k.
double first_way_function(std::size_t j, double x);
double second_way_function(std::size_t k, double x);

SimOutput simulate(const SimSpec& spec);

/**
 * Noiseless regression function. Not defined for the low-rank design, whose
 * response depends on the rank-1 factors rather than on X alone; use
 * low_rank_function there.
 */
double true_function(const SimSpec& spec, const DenseTensor& x);
double low_rank_function(std::span<const double> factor1, std::span<const double> factor2);

/// Number of important features per way for a design (10, 4 and 2).
std::vector<std::size_t> important_counts(Design design);

} // namespace star
