#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "star/tensor.hpp"

namespace star {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Raised for malformed or inconsistent input data.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/**
 * n samples of an m-way covariate with a scalar response. Row i of `x` holds
 * X_i flattened in row-major order (last index fastest).
 */
struct RawData {
    Shape shape;
    RowMatrix x;
    Eigen::VectorXd y;

    std::size_t n() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t positions() const noexcept { return static_cast<std::size_t>(x.cols()); }

    DenseTensor sample(std::size_t i) const;
    RawData subset(std::span<const std::size_t> rows) const;

    /// Throws DataError if dimensions disagree or values are not finite.
    void validate() const;
};

} // namespace star
