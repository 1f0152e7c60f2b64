#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "star/dataset.hpp"
#include "star/model.hpp"

namespace star {

struct SensitivityConfig {
    /// Raw-unit increment; must be non-zero.
    double delta = 1.0;
    /**
     * Ways indexing the output grid, in increasing order. Empty means all
     * ways (one cell per position). Otherwise a cell fixes the indices of
     * these ways and increments every position of that slice.
     */
    std::vector<std::size_t> group_by;
};

struct SensitivityReport {
    std::vector<std::size_t> ways;
    Shape grid_shape;
    /// Row-major over grid_shape.
    std::vector<double> values;
    double delta = 0.0;
};

/// Mean over test samples of predict(X + delta on the cell) - predict(X), per cell.
SensitivityReport sensitivity(const StarModel& model, const RawData& test, const SensitivityConfig& config);

/// Long form: one column per grouped way (`way<k>`, 1-based index values), then `value`.
void write_sensitivity_csv(std::ostream& out, const SensitivityReport& report);

} // namespace star
