#include "star/sensitivity.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "star/io.hpp"

namespace star {

SensitivityReport sensitivity(const StarModel& model, const RawData& test, const SensitivityConfig& config)
{
    if (config.delta == 0.0) throw std::invalid_argument("sensitivity: delta must be non-zero");
    if (test.shape != model.shape) throw DataError("sensitivity: test shape does not match model");
    test.validate();
    if (test.n() == 0) throw DataError("sensitivity: empty test set");

    SensitivityReport report;
    report.delta = config.delta;
    if (config.group_by.empty()) {
        for (std::size_t k = 0; k < model.shape.size(); ++k) report.ways.push_back(k);
    } else {
        report.ways = config.group_by;
        if (!std::is_sorted(report.ways.begin(), report.ways.end()) ||
            std::adjacent_find(report.ways.begin(), report.ways.end()) != report.ways.end() ||
            report.ways.back() >= model.shape.size()) {
            throw std::invalid_argument("sensitivity: group_by must list distinct ways in increasing order");
        }
    }
    for (auto k : report.ways) report.grid_shape.push_back(model.shape[k]);
    report.values.assign(shape_size(report.grid_shape), 0.0);

    const std::size_t P = shape_size(model.shape);
    const auto strides = row_major_strides(report.grid_shape);
    std::vector<std::size_t> cell_of(P);
    for (std::size_t pos = 0; pos < P; ++pos) {
        const auto idx = multi_index(model.shape, pos);
        std::size_t c = 0;
        for (std::size_t g = 0; g < report.ways.size(); ++g) c += idx[report.ways[g]] * strides[g];
        cell_of[pos] = c;
    }

    // The predictor is additive over positions, so a cell's change is the
    // sum of its positions' changes.
    const auto coefs = stacked_coefficients(model);
    for (std::size_t i = 0; i < test.n(); ++i) {
        const double* row = test.x.row(static_cast<Eigen::Index>(i)).data();
        for (std::size_t pos = 0; pos < P; ++pos) {
            const double change = position_effect(model, coefs, pos, row[pos] + config.delta) -
                                  position_effect(model, coefs, pos, row[pos]);
            report.values[cell_of[pos]] += change;
        }
    }
    for (auto& v : report.values) v /= static_cast<double>(test.n());
    return report;
}

void write_sensitivity_csv(std::ostream& out, const SensitivityReport& report)
{
    for (auto k : report.ways) out << "way" << (k + 1) << ',';
    out << "value\n";
    for (std::size_t c = 0; c < report.values.size(); ++c) {
        const auto idx = multi_index(report.grid_shape, c);
        for (auto j : idx) out << (j + 1) << ',';
        out << format_double(report.values[c]) << '\n';
    }
}

} // namespace star
