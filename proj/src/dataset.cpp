#include "star/dataset.hpp"

namespace star {

DenseTensor RawData::sample(std::size_t i) const
{
    if (i >= n()) throw std::out_of_range("RawData: sample index out of range");
    std::vector<double> values(x.row(static_cast<Eigen::Index>(i)).begin(),
                               x.row(static_cast<Eigen::Index>(i)).end());
    return DenseTensor(shape, std::move(values));
}

RawData RawData::subset(std::span<const std::size_t> rows) const
{
    RawData out;
    out.shape = shape;
    out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = static_cast<Eigen::Index>(rows[i]);
        if (rows[i] >= n()) throw std::out_of_range("RawData: subset row out of range");
        out.x.row(static_cast<Eigen::Index>(i)) = x.row(src);
        out.y[static_cast<Eigen::Index>(i)] = y[src];
    }
    return out;
}

void RawData::validate() const
{
    if (shape.empty()) throw DataError("dataset has no tensor ways");
    for (auto p : shape) {
        if (p == 0) throw DataError("dataset shape entries must be positive");
    }
    if (static_cast<std::size_t>(x.cols()) != shape_size(shape)) {
        throw DataError("covariate width " + std::to_string(x.cols()) +
                        " does not match shape size " + std::to_string(shape_size(shape)));
    }
    if (x.rows() != y.size()) throw DataError("covariate rows and responses differ in count");
    if (!x.allFinite() || !y.allFinite()) throw DataError("dataset contains non-finite values");
}

} // namespace star
