#pragma once

#include <random>

#include "star/cp.hpp"
#include "star/spline.hpp"

namespace star::testing {

/// Featurized dataset with i.i.d. N(0, 1) features and responses (no basis semantics).
inline FeaturizedDataset random_featurized(const Shape& shape, std::size_t d, std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    FeaturizedDataset data;
    data.shape = shape;
    data.basis_count = d;
    const auto P = static_cast<Eigen::Index>(shape_size(shape) * d);
    data.features.resize(static_cast<Eigen::Index>(n), P);
    for (Eigen::Index i = 0; i < data.features.size(); ++i) data.features.data()[i] = normal(rng);
    data.y.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < data.y.size(); ++i) data.y[i] = normal(rng);
    data.intercept = data.y.mean();
    return data;
}

inline CpFactorBundle random_bundle(const Shape& shape, std::size_t rank, std::size_t d, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    CpFactorBundle b(shape, rank, d);
    for (std::size_t k = 0; k < shape.size(); ++k) {
        for (Eigen::Index e = 0; e < b.factor(k).size(); ++e) b.factor(k)[e] = normal(rng);
    }
    return b;
}

/// sum_h < cp_compose(bundle, h), F_h(X_i) > by explicit full-tensor contraction.
inline double brute_force_fit(const FeaturizedDataset& data, const CpFactorBundle& bundle, std::size_t i)
{
    double total = 0.0;
    for (std::size_t h = 0; h < bundle.basis_count(); ++h) {
        total += inner_product(cp_compose(bundle, h), data.feature_tensor(i, h));
    }
    return total;
}

} // namespace star::testing
