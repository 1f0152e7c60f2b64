#pragma once

#include "star/model.hpp"

namespace star {

/// Tensor linear regression: the identity-basis (d = 1) case of the estimator.
struct TlrConfig {
    FitConfig fit;
};

BasisConfig tlr_basis();

/// Min-max scales and centers raw entries, then runs the same alternating fit.
StarModel fit_tlr(const RawData& data, const TlrConfig& config);

} // namespace star
