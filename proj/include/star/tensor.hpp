#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace star {

using Shape = std::vector<std::size_t>;

/// Number of elements of a tensor with the given shape.
std::size_t shape_size(const Shape& shape);

/// Row-major strides (last index fastest).
std::vector<std::size_t> row_major_strides(const Shape& shape);

/// Inverse of the row-major linear index; throws std::out_of_range past the end.
std::vector<std::size_t> multi_index(const Shape& shape, std::size_t linear);

/**
 * Dense m-way array of doubles stored contiguously in row-major order.
 *
 * Indices are 0-based. For 1-based index (j_1..j_m) the linear position is
 * sum_k (j_k - 1) * prod_{u>k} p_u.
 */
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape, double fill = 0.0);
    DenseTensor(Shape shape, std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t ways() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    std::size_t linear_index(std::span<const std::size_t> index) const;
    std::vector<std::size_t> multi_index(std::size_t linear) const;

    double at(std::span<const std::size_t> index) const { return data_[linear_index(index)]; }
    double& at(std::span<const std::size_t> index) { return data_[linear_index(index)]; }
    double at(std::initializer_list<std::size_t> index) const;
    double& at(std::initializer_list<std::size_t> index);

    double operator[](std::size_t linear) const { return data_[linear]; }
    double& operator[](std::size_t linear) { return data_[linear]; }

    bool operator==(const DenseTensor&) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Sum of elementwise products. Throws std::invalid_argument on shape mismatch.
double inner_product(const DenseTensor& a, const DenseTensor& b);

/// Outer product a_1 o a_2 o ... o a_m.
DenseTensor outer_product(std::span<const std::vector<double>> vectors);

/**
 * The (m-1)-way tensor obtained by fixing way `k` at index `j` (both 0-based).
 * Slicing a 1-way tensor yields a shape-{1} tensor holding one value.
 */
DenseTensor mode_slice(const DenseTensor& t, std::size_t k, std::size_t j);

} // namespace star
