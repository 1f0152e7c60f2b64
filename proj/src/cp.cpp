#include "star/cp.hpp"

#include <cmath>
#include <stdexcept>

namespace star {

CpFactorBundle::CpFactorBundle(Shape dims, std::size_t rank, std::size_t basis_count)
    : dims_(std::move(dims)), rank_(rank), basis_count_(basis_count)
{
    if (dims_.empty()) throw std::invalid_argument("CpFactorBundle: need at least one way");
    if (rank_ == 0 || basis_count_ == 0) {
        throw std::invalid_argument("CpFactorBundle: rank and basis count must be positive");
    }
    for (auto p : dims_) {
        if (p == 0) throw std::invalid_argument("CpFactorBundle: dimensions must be positive");
        factors_.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p * group_size())));
    }
}

void CpFactorBundle::set_factor(std::size_t k, Eigen::VectorXd values)
{
    if (k >= ways()) throw std::out_of_range("CpFactorBundle: way out of range");
    if (static_cast<std::size_t>(values.size()) != dims_[k] * group_size()) {
        throw std::invalid_argument("CpFactorBundle: factor length mismatch");
    }
    factors_[k] = std::move(values);
}

std::vector<double> CpFactorBundle::component(std::size_t k, std::size_t h, std::size_t r) const
{
    std::vector<double> out(dims_.at(k));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = coef(k, h, r, j);
    return out;
}

GroupIndex CpFactorBundle::group(std::size_t k, std::size_t j) const
{
    if (k >= ways() || j >= dims_[k]) throw std::out_of_range("CpFactorBundle: group out of range");
    return {k, j, j * group_size(), group_size()};
}

double CpFactorBundle::group_norm(std::size_t k, std::size_t j) const
{
    const auto g = group(k, j);
    return factors_[k]
        .segment(static_cast<Eigen::Index>(g.offset), static_cast<Eigen::Index>(g.length))
        .norm();
}

std::vector<std::size_t> CpFactorBundle::active_set(std::size_t k) const
{
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < dims_.at(k); ++j) {
        if (group_norm(k, j) > 0.0) active.push_back(j);
    }
    return active;
}

bool CpFactorBundle::is_zero() const
{
    for (const auto& f : factors_) {
        if ((f.array() != 0.0).any()) return false;
    }
    return true;
}

bool CpFactorBundle::all_finite() const
{
    for (const auto& f : factors_) {
        if (!f.allFinite()) return false;
    }
    return true;
}

bool CpFactorBundle::compatible(const CpFactorBundle& other) const
{
    return dims_ == other.dims_ && rank_ == other.rank_ && basis_count_ == other.basis_count_;
}

bool CpFactorBundle::operator==(const CpFactorBundle& other) const
{
    if (!compatible(other)) return false;
    for (std::size_t k = 0; k < ways(); ++k) {
        if (factors_[k] != other.factors_[k]) return false;
    }
    return true;
}

DenseTensor cp_compose(const CpFactorBundle& bundle, std::size_t h)
{
    if (h >= bundle.basis_count()) throw std::out_of_range("cp_compose: basis index out of range");
    DenseTensor out(bundle.dims(), 0.0);
    std::vector<std::vector<double>> comps(bundle.ways());
    for (std::size_t r = 0; r < bundle.rank(); ++r) {
        for (std::size_t k = 0; k < bundle.ways(); ++k) comps[k] = bundle.component(k, h, r);
        const auto term = outer_product(comps);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += term[i];
    }
    return out;
}

CpFactorBundle random_unit_groups(Shape dims, std::size_t rank, std::size_t basis_count,
                                  std::mt19937_64& rng)
{
    CpFactorBundle bundle(std::move(dims), rank, basis_count);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < bundle.ways(); ++k) {
        auto& f = bundle.factor(k);
        for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = normal(rng);
        for (std::size_t j = 0; j < bundle.dims()[k]; ++j) {
            const auto g = bundle.group(k, j);
            auto seg = f.segment(static_cast<Eigen::Index>(g.offset),
                                 static_cast<Eigen::Index>(g.length));
            const double norm = seg.norm();
            if (norm > 0.0) seg /= norm;
        }
    }
    return bundle;
}

namespace {

template <class NormFn, class ScaleFn>
void equalize(std::size_t ways, NormFn norm_of, ScaleFn scale)
{
    std::vector<double> norms(ways);
    double log_sum = 0.0;
    bool any_zero = false;
    for (std::size_t k = 0; k < ways; ++k) {
        norms[k] = norm_of(k);
        if (norms[k] == 0.0) any_zero = true;
        else log_sum += std::log(norms[k]);
    }
    if (any_zero) {
        for (std::size_t k = 0; k < ways; ++k) scale(k, 0.0);
        return;
    }
    const double target = std::exp(log_sum / static_cast<double>(ways));
    for (std::size_t k = 0; k < ways; ++k) scale(k, target / norms[k]);
}

} // namespace

void rebalance(CpFactorBundle& bundle)
{
    for (std::size_t h = 0; h < bundle.basis_count(); ++h) {
        for (std::size_t r = 0; r < bundle.rank(); ++r) {
            equalize(
                bundle.ways(),
                [&](std::size_t k) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < bundle.dims()[k]; ++j) {
                        s += bundle.coef(k, h, r, j) * bundle.coef(k, h, r, j);
                    }
                    return std::sqrt(s);
                },
                [&](std::size_t k, double c) {
                    for (std::size_t j = 0; j < bundle.dims()[k]; ++j) bundle.coef(k, h, r, j) *= c;
                });
        }
    }
}

void rebalance_ranks(CpFactorBundle& bundle)
{
    for (std::size_t r = 0; r < bundle.rank(); ++r) {
        equalize(
            bundle.ways(),
            [&](std::size_t k) {
                double s = 0.0;
                for (std::size_t j = 0; j < bundle.dims()[k]; ++j) {
                    for (std::size_t h = 0; h < bundle.basis_count(); ++h) {
                        s += bundle.coef(k, h, r, j) * bundle.coef(k, h, r, j);
                    }
                }
                return std::sqrt(s);
            },
            [&](std::size_t k, double c) {
                for (std::size_t j = 0; j < bundle.dims()[k]; ++j) {
                    for (std::size_t h = 0; h < bundle.basis_count(); ++h) {
                        bundle.coef(k, h, r, j) *= c;
                    }
                }
            });
    }
}

} // namespace star
