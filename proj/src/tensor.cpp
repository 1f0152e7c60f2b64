#include "star/tensor.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace star {

std::size_t shape_size(const Shape& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> row_major_strides(const Shape& shape)
{
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t k = shape.size(); k-- > 1;) {
        strides[k - 1] = strides[k] * shape[k];
    }
    return strides;
}

std::vector<std::size_t> multi_index(const Shape& shape, std::size_t linear)
{
    if (linear >= shape_size(shape)) throw std::out_of_range("multi_index: linear index out of bounds");
    std::vector<std::size_t> index(shape.size());
    for (std::size_t k = shape.size(); k-- > 0;) {
        index[k] = linear % shape[k];
        linear /= shape[k];
    }
    return index;
}

DenseTensor::DenseTensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill)
{
    for (auto p : shape_) {
        if (p == 0) throw std::invalid_argument("DenseTensor: shape entries must be positive");
    }
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data))
{
    for (auto p : shape_) {
        if (p == 0) throw std::invalid_argument("DenseTensor: shape entries must be positive");
    }
    if (data_.size() != shape_size(shape_)) {
        throw std::invalid_argument("DenseTensor: data length " + std::to_string(data_.size()) +
                                    " does not match shape size " +
                                    std::to_string(shape_size(shape_)));
    }
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const
{
    if (index.size() != shape_.size()) {
        throw std::out_of_range("DenseTensor: index arity does not match tensor ways");
    }
    std::size_t linear = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        if (index[k] >= shape_[k]) throw std::out_of_range("DenseTensor: index out of bounds");
        linear = linear * shape_[k] + index[k];
    }
    return linear;
}

std::vector<std::size_t> DenseTensor::multi_index(std::size_t linear) const
{
    return star::multi_index(shape_, linear);
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const
{
    return at(std::span<const std::size_t>(index.begin(), index.size()));
}

double& DenseTensor::at(std::initializer_list<std::size_t> index)
{
    return at(std::span<const std::size_t>(index.begin(), index.size()));
}

double inner_product(const DenseTensor& a, const DenseTensor& b)
{
    if (a.shape() != b.shape()) throw std::invalid_argument("inner_product: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

DenseTensor outer_product(std::span<const std::vector<double>> vectors)
{
    if (vectors.empty()) throw std::invalid_argument("outer_product: no vectors");
    Shape shape;
    for (const auto& v : vectors) shape.push_back(v.size());
    DenseTensor out(shape, 1.0);
    for (std::size_t pos = 0; pos < out.size(); ++pos) {
        std::size_t rest = pos;
        double value = 1.0;
        for (std::size_t k = vectors.size(); k-- > 0;) {
            value *= vectors[k][rest % shape[k]];
            rest /= shape[k];
        }
        out[pos] = value;
    }
    return out;
}

DenseTensor mode_slice(const DenseTensor& t, std::size_t k, std::size_t j)
{
    const auto& shape = t.shape();
    if (k >= shape.size()) throw std::out_of_range("mode_slice: way out of range");
    if (j >= shape[k]) throw std::out_of_range("mode_slice: index out of range");

    Shape sub;
    for (std::size_t u = 0; u < shape.size(); ++u) {
        if (u != k) sub.push_back(shape[u]);
    }
    // Positions factor as (outer, j, inner) with inner = prod_{u>k} p_u.
    std::size_t inner = 1;
    for (std::size_t u = k + 1; u < shape.size(); ++u) inner *= shape[u];
    std::size_t outer = t.size() / (inner * shape[k]);

    std::vector<double> values;
    values.reserve(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        const std::size_t base = (o * shape[k] + j) * inner;
        for (std::size_t i = 0; i < inner; ++i) values.push_back(t[base + i]);
    }
    if (sub.empty()) {
        // 0-way result: represent as a single-element tensor of shape {1}.
        return DenseTensor(Shape{1}, std::move(values));
    }
    return DenseTensor(std::move(sub), std::move(values));
}

} // namespace star
