#include "star/baselines.hpp"

namespace star {

BasisConfig tlr_basis()
{
    BasisConfig config;
    config.kind = BasisKind::identity;
    config.order = 1;
    config.n_internal = 0;
    config.drop_constant = false;
    return config;
}

StarModel fit_tlr(const RawData& data, const TlrConfig& config)
{
    return train(data, tlr_basis(), config.fit);
}

} // namespace star
