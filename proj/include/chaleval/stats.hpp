#pragma once

#include <span>
#include <vector>

namespace chaleval {

/// Quantile with linear interpolation between order statistics
/// (position (n-1)p). Empty input is an error.
double quantile(std::span<const double> values, double p);
double median(std::span<const double> values);

struct Quartiles {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

Quartiles quartiles(std::span<const double> values);

double mean(std::span<const double> values);

} // namespace chaleval
