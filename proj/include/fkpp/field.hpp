#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fkpp {

struct Grid {
    double x_left = 0.0;  // lab position of the first point before any shift
    double dx = 0.05;
    std::size_t n = 0;
    std::int64_t shift_cells = 0;

    double frame_shift() const { return static_cast<double>(shift_cells) * dx; }
    double x(std::size_t i) const { return x_left + static_cast<double>(shift_cells + static_cast<std::int64_t>(i)) * dx; }
    double x_right() const { return x(n - 1); }
};

struct Field {
    double t = 0.0;
    Grid grid;
    std::vector<double> values;
    double left_plateau = 1.0;
    double right_value = 0.0;

    // linear interpolation in the lab frame; outside the window the far-field values
    double value_at(double x_lab) const;
    double sup() const;
    double inf() const;
};

}  // namespace fkpp
