#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "star/dataset.hpp"
#include "star/tensor.hpp"

namespace star {

enum class BasisKind { bspline, natural, identity };
enum class KnotPlacement { uniform, quantile };

std::string to_string(BasisKind kind);
BasisKind parse_basis_kind(const std::string& name);

struct BasisConfig {
    BasisKind kind = BasisKind::natural;
    int order = 4;
    int n_internal = 4;
    /// Natural bases only: remove the constant direction (d = n_internal + 1).
    bool drop_constant = true;
    KnotPlacement knots = KnotPlacement::uniform;
};

/**
 * Univariate basis {psi_h}_{h < d} on [0, 1].
 *
 * - bspline: order-q B-splines on internal knots plus q-fold boundary knots,
 *   d = #internal + q.
 * - natural: cubic B-splines restricted to zero second derivative at 0 and 1,
 *   d = #internal + 2 (one fewer with drop_constant). The restriction is an
 *   orthonormal null-space map, so |psi_h| <= 1 still holds.
 * - identity: psi(x) = x, d = 1.
 */
class SplineBasis {
public:
    static SplineBasis bspline(int order, std::vector<double> internal_knots);
    static SplineBasis natural(std::vector<double> internal_knots, bool drop_constant);
    static SplineBasis identity();

    BasisKind kind() const noexcept { return kind_; }
    int order() const noexcept { return order_; }
    bool drop_constant() const noexcept { return drop_constant_; }
    const std::vector<double>& internal_knots() const noexcept { return internal_; }
    /// Knot vector with boundary knots repeated `order` times.
    const std::vector<double>& knots() const noexcept { return knots_; }
    std::size_t size() const noexcept { return size_; }

    /// Writes the d basis values at x (clamped to [0, 1]) into `out`.
    void eval(double x, std::span<double> out) const;
    std::vector<double> eval(double x) const;

private:
    BasisKind kind_ = BasisKind::identity;
    int order_ = 1;
    bool drop_constant_ = false;
    std::vector<double> internal_;
    std::vector<double> knots_;
    std::size_t size_ = 1;
    // natural: maps the retained raw B-spline values to the constrained basis.
    Eigen::MatrixXd transform_;
};

/// Uniform internal knots at i / (n_internal + 1).
SplineBasis build_basis(int order, int n_internal, bool natural, bool drop_constant = false);

/**
 * Builds from a config. For quantile knots, `scaled_values` are the pooled
 * min-max-scaled training values; if the quantiles are not strictly increasing
 * uniform knots are used instead.
 */
SplineBasis build_basis(const BasisConfig& config, std::span<const double> scaled_values = {});

/// Cox-de Boor values of all order-q B-splines on `knots` at x (0/0 taken as 0).
std::vector<double> bspline_values(std::span<const double> knots, int order, double x);

/// `deriv`-th derivative of all order-q B-splines at x.
std::vector<double> bspline_derivatives(std::span<const double> knots, int order, double x,
                                        int deriv);

std::vector<double> eval_basis(const SplineBasis& basis, double x);

/**
 * Per-position min-max map to [0, 1] plus per-position, per-basis-function
 * training means used for centering.
 */
struct EntryScaler {
    Eigen::VectorXd min;
    Eigen::VectorXd max;
    /// Row = position, column = basis function.
    RowMatrix means;

    std::size_t positions() const noexcept { return static_cast<std::size_t>(min.size()); }
    /// Clamp to [min, max] and map to [0, 1]; constant entries map to 0.5.
    double scale(std::size_t position, double value) const;
};

EntryScaler fit_scaler(const RawData& data, const SplineBasis& basis);

/// Pooled scaled training values of all positions (for quantile knots).
std::vector<double> pooled_scaled_values(const RawData& data, const EntryScaler& scaler);

/**
 * Feature tensors F_h(X_i) for all samples. Row i of `features` stores the
 * features of sample i at column position * d + h.
 */
struct FeaturizedDataset {
    Shape shape;
    std::size_t basis_count = 0;
    RowMatrix features;
    Eigen::VectorXd y;
    double intercept = 0.0;
    SplineBasis basis;
    EntryScaler scaler;

    std::size_t n() const noexcept { return static_cast<std::size_t>(features.rows()); }
    std::size_t positions() const noexcept { return shape_size(shape); }
    double feature(std::size_t i, std::size_t position, std::size_t h) const
    {
        return features(static_cast<Eigen::Index>(i),
                        static_cast<Eigen::Index>(position * basis_count + h));
    }
    /// F_h(X_i) as a dense tensor.
    DenseTensor feature_tensor(std::size_t i, std::size_t h) const;
    /// y - intercept.
    Eigen::VectorXd centered_response() const;
};

enum class Centering { on, off };

/**
 * Clamps, scales, evaluates the basis and (by default) subtracts the scaler's
 * training means. The intercept is the mean of `data.y`.
 */
FeaturizedDataset featurize(const RawData& data, const SplineBasis& basis,
                            const EntryScaler& scaler, Centering centering = Centering::on);

/// Fits the scaler (and quantile knots if requested) on `data` and featurizes it.
FeaturizedDataset featurize_training(const RawData& data, const BasisConfig& config);

} // namespace star
