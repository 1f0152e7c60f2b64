#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "star/tensor.hpp"

namespace star {

/// Contiguous slice of factors[k] holding all (r, h) coefficients of entry j.
struct GroupIndex {
    std::size_t way;
    std::size_t entry;
    std::size_t offset;
    std::size_t length;
};

/**
 * Coefficients beta_{khrj} of the CP expansion
 *
 *     B_h = sum_r beta_{1hr} o ... o beta_{mhr},   h = 1..d
 *
 * factors[k] has length p_k * R * d with h innermost, then r, then j:
 * beta_{khrj} lives at (j * R + r) * d + h (0-based).
 */
class CpFactorBundle {
public:
    CpFactorBundle() = default;
    CpFactorBundle(Shape dims, std::size_t rank, std::size_t basis_count);

    std::size_t ways() const noexcept { return dims_.size(); }
    std::size_t rank() const noexcept { return rank_; }
    std::size_t basis_count() const noexcept { return basis_count_; }
    const Shape& dims() const noexcept { return dims_; }
    std::size_t group_size() const noexcept { return rank_ * basis_count_; }

    std::size_t position(std::size_t j, std::size_t r, std::size_t h) const
    {
        return (j * rank_ + r) * basis_count_ + h;
    }

    double coef(std::size_t k, std::size_t h, std::size_t r, std::size_t j) const
    {
        return factors_[k][static_cast<Eigen::Index>(position(j, r, h))];
    }
    double& coef(std::size_t k, std::size_t h, std::size_t r, std::size_t j)
    {
        return factors_[k][static_cast<Eigen::Index>(position(j, r, h))];
    }

    const Eigen::VectorXd& factor(std::size_t k) const { return factors_.at(k); }
    Eigen::VectorXd& factor(std::size_t k) { return factors_.at(k); }
    /// Replaces factors[k]; throws if the length is wrong.
    void set_factor(std::size_t k, Eigen::VectorXd values);

    /// beta_{khr} as a vector of length p_k.
    std::vector<double> component(std::size_t k, std::size_t h, std::size_t r) const;

    GroupIndex group(std::size_t k, std::size_t j) const;
    double group_norm(std::size_t k, std::size_t j) const;
    /// Indices j with non-zero group norm along way k.
    std::vector<std::size_t> active_set(std::size_t k) const;

    bool is_zero() const;
    bool all_finite() const;
    bool compatible(const CpFactorBundle& other) const;

    bool operator==(const CpFactorBundle& other) const;

private:
    Shape dims_;
    std::size_t rank_ = 0;
    std::size_t basis_count_ = 0;
    std::vector<Eigen::VectorXd> factors_;
};

/// B_h (0-based h) as a dense tensor of shape (p_1, ..., p_m).
DenseTensor cp_compose(const CpFactorBundle& bundle, std::size_t h);

/// Standard-normal factors with every group rescaled to unit Euclidean norm.
CpFactorBundle random_unit_groups(Shape dims, std::size_t rank, std::size_t basis_count,
                                  std::mt19937_64& rng);

/**
 * Rescales, for every (h, r), the components beta_{khr} so that all ways share
 * the geometric mean of their norms. The composed tensors are unchanged. If any
 * way's component is zero, the whole (h, r) term is set to zero.
 */
void rebalance(CpFactorBundle& bundle);

/**
 * Per-rank rebalancing: for each r, the way-k block {beta_{khrj}}_{h,j} is scaled
 * so that all ways share the geometric mean of the block norms.
 */
void rebalance_ranks(CpFactorBundle& bundle);

} // namespace star
