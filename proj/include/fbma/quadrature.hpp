#pragma once

#include "fbma/field.hpp"

#include <span>
#include <vector>

namespace fbma {

/// Composite trapezoid weights with fourth-order Gregory end corrections
/// (3/8, 7/6, 23/24 at each end). Falls back to Simpson/trapezoid below 8 nodes.
std::vector<double> gregory_weights(int count, double h);

/// Integral over a non-periodic line of samples (Gregory-corrected trapezoid).
double integrate_line(std::span<const double> values, double h);

/// Integral over one period of equally spaced periodic samples (trapezoid).
double integrate_periodic(std::span<const double> values, double h);

/// Integral of a field over its chart, d(row) d(col); one period in the
/// columns when the chart wraps, closed interval otherwise.
double integrate_chart(const RealField& f);

}  // namespace fbma
