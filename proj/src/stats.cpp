#include "chaleval/stats.hpp"

#include "chaleval/error.hpp"

#include <algorithm>
#include <cmath>

namespace chaleval {

namespace {

double sorted_quantile(const std::vector<double>& s, double p)
{
    const double h = (static_cast<double>(s.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, s.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0)
        return s[lo];
    return s[lo] + frac * (s[hi] - s[lo]);
}

std::vector<double> sorted_copy(std::span<const double> values)
{
    if (values.empty())
        throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

double quantile(std::span<const double> values, double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorCode::invalid_argument, "quantile level outside [0, 1]");
    return sorted_quantile(sorted_copy(values), p);
}

double median(std::span<const double> values)
{
    return quantile(values, 0.5);
}

Quartiles quartiles(std::span<const double> values)
{
    const auto s = sorted_copy(values);
    return {sorted_quantile(s, 0.25), sorted_quantile(s, 0.5), sorted_quantile(s, 0.75)};
}

double mean(std::span<const double> values)
{
    if (values.empty())
        throw Error(ErrorCode::invalid_argument, "mean of an empty sample");
    double s = 0.0;
    for (double v : values)
        s += v;
    return s / static_cast<double>(values.size());
}

} // namespace chaleval
