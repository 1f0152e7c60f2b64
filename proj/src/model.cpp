#include "star/model.hpp"

#include <stdexcept>

namespace star {

StarModel train(const RawData& data, const BasisConfig& basis, const FitConfig& config)
{
    const auto featurized = featurize_training(data, basis);
    return make_model(featurized, fit(featurized, config));
}

StarModel make_model(const FeaturizedDataset& training, FitResult fit)
{
    return {training.shape, training.basis, training.scaler, std::move(fit)};
}

Eigen::VectorXd stacked_coefficients(const StarModel& model)
{
    const auto& bundle = model.fit.bundle;
    const std::size_t d = bundle.basis_count();
    const std::size_t P = shape_size(model.shape);
    Eigen::VectorXd coefs(static_cast<Eigen::Index>(P * d));
    for (std::size_t h = 0; h < d; ++h) {
        const auto B = cp_compose(bundle, h);
        for (std::size_t pos = 0; pos < P; ++pos) coefs[static_cast<Eigen::Index>(pos * d + h)] = B[pos];
    }
    return coefs;
}

double position_effect(const StarModel& model, const Eigen::VectorXd& coefs, std::size_t position,
                       double value)
{
    const std::size_t d = model.basis.size();
    double psi_buf[64];
    std::vector<double> psi_vec;
    std::span<double> psi(psi_buf, d);
    if (d > 64) {
        psi_vec.resize(d);
        psi = psi_vec;
    }
    model.basis.eval(model.scaler.scale(position, value), psi);
    double total = 0.0;
    for (std::size_t h = 0; h < d; ++h) {
        total += coefs[static_cast<Eigen::Index>(position * d + h)] *
                 (psi[h] - model.scaler.means(static_cast<Eigen::Index>(position), static_cast<Eigen::Index>(h)));
    }
    return total;
}

namespace {

double score_row(const StarModel& model, const Eigen::VectorXd& coefs, const double* row)
{
    const std::size_t P = shape_size(model.shape);
    double total = model.fit.intercept;
    for (std::size_t pos = 0; pos < P; ++pos) total += position_effect(model, coefs, pos, row[pos]);
    return total;
}

} // namespace

double predict(const StarModel& model, const DenseTensor& x)
{
    if (x.shape() != model.shape) throw DataError("predict: covariate shape does not match model");
    return score_row(model, stacked_coefficients(model), x.data().data());
}

Eigen::VectorXd predict(const StarModel& model, const RawData& data)
{
    if (data.shape != model.shape) throw DataError("predict: covariate shape does not match model");
    data.validate();
    const auto coefs = stacked_coefficients(model);
    Eigen::VectorXd out(data.x.rows());
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        out[i] = score_row(model, coefs, data.x.row(i).data());
    }
    return out;
}

} // namespace star
