#include "star/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace star {

std::string to_string(BasisKind kind)
{
    switch (kind) {
    case BasisKind::bspline: return "bspline";
    case BasisKind::natural: return "natural";
    case BasisKind::identity: return "identity";
    }
    return "unknown";
}

BasisKind parse_basis_kind(const std::string& name)
{
    if (name == "bspline") return BasisKind::bspline;
    if (name == "natural") return BasisKind::natural;
    if (name == "identity") return BasisKind::identity;
    throw std::invalid_argument("unknown basis kind '" + name + "'");
}

namespace {

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

std::vector<double> full_knots(const std::vector<double>& internal, int order)
{
    std::vector<double> knots(static_cast<std::size_t>(order), 0.0);
    knots.insert(knots.end(), internal.begin(), internal.end());
    knots.insert(knots.end(), static_cast<std::size_t>(order), 1.0);
    return knots;
}

void check_internal(const std::vector<double>& internal)
{
    for (std::size_t i = 0; i < internal.size(); ++i) {
        if (!(internal[i] > 0.0 && internal[i] < 1.0)) {
            throw std::invalid_argument("internal knots must lie in (0, 1)");
        }
        if (i > 0 && !(internal[i] > internal[i - 1])) {
            throw std::invalid_argument("internal knots must be strictly increasing");
        }
    }
}

} // namespace

std::vector<double> bspline_values(std::span<const double> knots, int order, double x)
{
    if (order < 1) throw std::invalid_argument("B-spline order must be >= 1");
    const std::size_t nk = knots.size();
    if (nk < static_cast<std::size_t>(order) + 1) throw std::invalid_argument("too few knots");

    // Order-1 indicators on [t_l, t_{l+1}); the last non-empty interval is closed
    // on the right so that x = t_max is covered.
    std::vector<double> v(nk - 1, 0.0);
    std::size_t last = nk - 1;
    while (last > 0 && knots[last - 1] == knots[nk - 1]) --last;
    // `last` is the first index holding the maximal knot; interval last-1 ends there.
    for (std::size_t l = 0; l + 1 < nk; ++l) {
        const bool inside = knots[l] <= x && x < knots[l + 1];
        const bool right_end = (l + 1 == last) && x == knots[nk - 1];
        v[l] = (inside || right_end) ? 1.0 : 0.0;
    }
    for (int q = 2; q <= order; ++q) {
        const std::size_t count = nk - static_cast<std::size_t>(q);
        std::vector<double> next(count, 0.0);
        for (std::size_t l = 0; l < count; ++l) {
            const double left = safe_ratio(x - knots[l], knots[l + q - 1] - knots[l]) * v[l];
            const double right =
                safe_ratio(knots[l + q] - x, knots[l + q] - knots[l + 1]) * v[l + 1];
            next[l] = left + right;
        }
        v = std::move(next);
    }
    return v;
}

std::vector<double> bspline_derivatives(std::span<const double> knots, int order, double x,
                                        int deriv)
{
    if (deriv < 0) throw std::invalid_argument("derivative order must be >= 0");
    if (deriv >= order) {
        return std::vector<double>(knots.size() - static_cast<std::size_t>(order), 0.0);
    }
    auto v = bspline_values(knots, order - deriv, x);
    for (int q = order - deriv + 1; q <= order; ++q) {
        const std::size_t count = knots.size() - static_cast<std::size_t>(q);
        std::vector<double> next(count, 0.0);
        for (std::size_t l = 0; l < count; ++l) {
            next[l] = (q - 1) * (safe_ratio(v[l], knots[l + q - 1] - knots[l]) -
                                 safe_ratio(v[l + 1], knots[l + q] - knots[l + 1]));
        }
        v = std::move(next);
    }
    return v;
}

SplineBasis SplineBasis::bspline(int order, std::vector<double> internal_knots)
{
    if (order < 1) throw std::invalid_argument("B-spline order must be >= 1");
    check_internal(internal_knots);
    SplineBasis b;
    b.kind_ = BasisKind::bspline;
    b.order_ = order;
    b.internal_ = std::move(internal_knots);
    b.knots_ = full_knots(b.internal_, order);
    b.size_ = b.internal_.size() + static_cast<std::size_t>(order);
    return b;
}

SplineBasis SplineBasis::natural(std::vector<double> internal_knots, bool drop_constant)
{
    check_internal(internal_knots);
    SplineBasis b;
    b.kind_ = BasisKind::natural;
    b.order_ = 4;
    b.drop_constant_ = drop_constant;
    b.internal_ = std::move(internal_knots);
    b.knots_ = full_knots(b.internal_, 4);

    const std::size_t raw = b.internal_.size() + 4;
    const std::size_t first = drop_constant ? 1 : 0;
    const auto kept = static_cast<Eigen::Index>(raw - first);

    // Rows: second derivatives at the two boundaries of the retained B-splines.
    Eigen::MatrixXd constraint(kept, 2);
    const auto d0 = bspline_derivatives(b.knots_, 4, 0.0, 2);
    const auto d1 = bspline_derivatives(b.knots_, 4, 1.0, 2);
    for (Eigen::Index l = 0; l < kept; ++l) {
        constraint(l, 0) = d0[first + static_cast<std::size_t>(l)];
        constraint(l, 1) = d1[first + static_cast<std::size_t>(l)];
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(constraint);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(kept, kept);
    b.transform_ = q.rightCols(kept - 2);
    b.size_ = static_cast<std::size_t>(kept - 2);
    return b;
}

SplineBasis SplineBasis::identity()
{
    SplineBasis b;
    b.kind_ = BasisKind::identity;
    b.order_ = 1;
    b.size_ = 1;
    return b;
}

void SplineBasis::eval(double x, std::span<double> out) const
{
    if (out.size() != size_) throw std::invalid_argument("SplineBasis::eval: output size mismatch");
    x = std::clamp(x, 0.0, 1.0);
    switch (kind_) {
    case BasisKind::identity:
        out[0] = x;
        return;
    case BasisKind::bspline: {
        const auto v = bspline_values(knots_, order_, x);
        std::copy(v.begin(), v.end(), out.begin());
        return;
    }
    case BasisKind::natural: {
        const auto v = bspline_values(knots_, order_, x);
        const std::size_t first = drop_constant_ ? 1 : 0;
        for (std::size_t h = 0; h < size_; ++h) {
            double s = 0.0;
            for (Eigen::Index l = 0; l < transform_.rows(); ++l) {
                s += v[first + static_cast<std::size_t>(l)] *
                     transform_(l, static_cast<Eigen::Index>(h));
            }
            out[h] = s;
        }
        return;
    }
    }
}

std::vector<double> SplineBasis::eval(double x) const
{
    std::vector<double> out(size_);
    eval(x, out);
    return out;
}

std::vector<double> eval_basis(const SplineBasis& basis, double x) { return basis.eval(x); }

SplineBasis build_basis(int order, int n_internal, bool natural, bool drop_constant)
{
    if (n_internal < 0) throw std::invalid_argument("n_internal must be >= 0");
    std::vector<double> internal;
    for (int i = 1; i <= n_internal; ++i) internal.push_back(double(i) / double(n_internal + 1));
    if (natural) {
        if (order != 4) throw std::invalid_argument("natural splines are cubic (order 4)");
        return SplineBasis::natural(std::move(internal), drop_constant);
    }
    return SplineBasis::bspline(order, std::move(internal));
}

SplineBasis build_basis(const BasisConfig& config, std::span<const double> scaled_values)
{
    if (config.kind == BasisKind::identity) return SplineBasis::identity();
    const bool natural = config.kind == BasisKind::natural;
    if (config.knots == KnotPlacement::uniform || scaled_values.empty() || config.n_internal == 0) {
        return build_basis(config.order, config.n_internal, natural, config.drop_constant);
    }
    std::vector<double> sorted(scaled_values.begin(), scaled_values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> internal;
    for (int i = 1; i <= config.n_internal; ++i) {
        const double pos = double(i) / double(config.n_internal + 1) * double(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, sorted.size() - 1);
        internal.push_back(sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]));
    }
    bool valid = true;
    for (std::size_t i = 0; i < internal.size(); ++i) {
        if (!(internal[i] > 0.0 && internal[i] < 1.0)) valid = false;
        if (i > 0 && !(internal[i] > internal[i - 1])) valid = false;
    }
    if (!valid) return build_basis(config.order, config.n_internal, natural, config.drop_constant);
    if (natural) return SplineBasis::natural(std::move(internal), config.drop_constant);
    return SplineBasis::bspline(config.order, std::move(internal));
}

double EntryScaler::scale(std::size_t position, double value) const
{
    const auto p = static_cast<Eigen::Index>(position);
    const double lo = min[p];
    const double hi = max[p];
    if (!(hi > lo)) return 0.5;
    return (std::clamp(value, lo, hi) - lo) / (hi - lo);
}

EntryScaler fit_scaler(const RawData& data, const SplineBasis& basis)
{
    data.validate();
    if (data.n() < 2) throw DataError("fit_scaler needs at least two samples");
    const auto n = data.x.rows();
    const auto positions = data.x.cols();
    const auto d = static_cast<Eigen::Index>(basis.size());

    EntryScaler scaler;
    scaler.min = data.x.colwise().minCoeff().transpose();
    scaler.max = data.x.colwise().maxCoeff().transpose();
    scaler.means = RowMatrix::Zero(positions, d);

    std::vector<double> values(basis.size());
    for (Eigen::Index pos = 0; pos < positions; ++pos) {
        for (Eigen::Index i = 0; i < n; ++i) {
            basis.eval(scaler.scale(static_cast<std::size_t>(pos), data.x(i, pos)), values);
            for (Eigen::Index h = 0; h < d; ++h) {
                scaler.means(pos, h) += values[static_cast<std::size_t>(h)];
            }
        }
    }
    scaler.means /= static_cast<double>(n);
    return scaler;
}

std::vector<double> pooled_scaled_values(const RawData& data, const EntryScaler& scaler)
{
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(data.x.size()));
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        for (Eigen::Index pos = 0; pos < data.x.cols(); ++pos) {
            out.push_back(scaler.scale(static_cast<std::size_t>(pos), data.x(i, pos)));
        }
    }
    return out;
}

DenseTensor FeaturizedDataset::feature_tensor(std::size_t i, std::size_t h) const
{
    DenseTensor t(shape, 0.0);
    for (std::size_t pos = 0; pos < t.size(); ++pos) t[pos] = feature(i, pos, h);
    return t;
}

Eigen::VectorXd FeaturizedDataset::centered_response() const
{
    return y.array() - intercept;
}

FeaturizedDataset featurize(const RawData& data, const SplineBasis& basis,
                            const EntryScaler& scaler, Centering centering)
{
    data.validate();
    if (scaler.positions() != data.positions() ||
        static_cast<std::size_t>(scaler.means.cols()) != basis.size()) {
        throw DataError("featurize: scaler is not compatible with the data shape or basis");
    }
    const auto n = data.x.rows();
    const auto positions = data.x.cols();
    const std::size_t d = basis.size();

    FeaturizedDataset out;
    out.shape = data.shape;
    out.basis_count = d;
    out.features.resize(n, positions * static_cast<Eigen::Index>(d));
    out.y = data.y;
    out.intercept = n > 0 ? data.y.mean() : 0.0;
    out.basis = basis;
    out.scaler = scaler;

    for (Eigen::Index i = 0; i < n; ++i) {
        double* row = out.features.row(i).data();
        for (Eigen::Index pos = 0; pos < positions; ++pos) {
            std::span<double> slot(row + pos * static_cast<Eigen::Index>(d), d);
            basis.eval(scaler.scale(static_cast<std::size_t>(pos), data.x(i, pos)), slot);
            if (centering == Centering::on) {
                for (std::size_t h = 0; h < d; ++h) {
                    slot[h] -= scaler.means(pos, static_cast<Eigen::Index>(h));
                }
            }
        }
    }
    return out;
}

FeaturizedDataset featurize_training(const RawData& data, const BasisConfig& config)
{
    SplineBasis basis = build_basis(config);
    if (config.knots == KnotPlacement::quantile && config.kind != BasisKind::identity) {
        const auto range = fit_scaler(data, SplineBasis::identity());
        basis = build_basis(config, pooled_scaled_values(data, range));
    }
    return featurize(data, basis, fit_scaler(data, basis));
}

} // namespace star
