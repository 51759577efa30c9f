#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "simwt/errors.hpp"

namespace simwt {

// Percentile by linear interpolation between order statistics (Hyndman-Fan
// type 7, the default of most statistical software). p in [0, 100]. With the
// tiny samples this library deals in, the interpolation rule is visible in
// results, so it is fixed here rather than left to a library default.
inline double percentile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw ValueError("percentile_type7: empty input");
    if (!(p >= 0.0 && p <= 100.0)) throw ValueError("percentile_type7: p outside [0, 100]");
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values.front();
    const double h = static_cast<double>(values.size() - 1) * (p / 100.0);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline double mean_of(const std::vector<double>& values) {
    if (values.empty()) throw ValueError("mean_of: empty input");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

inline double median_of(std::vector<double> values) {
    return percentile_type7(std::move(values), 50.0);
}

}  // namespace simwt
