#pragma once

#include "cbx/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>

namespace cbx {

/// Equal-width bins over a closed range; bin k covers [k, k+1) widths,
/// except the last bin, which is closed at the top.
struct BinSpec {
    int count = 10;
    double lo = 0.0;
    double hi = 1.0;

    /// Throws InvalidArgument unless count >= 1 and lo <= hi.
    static BinSpec make(int count, double lo = 0.0, double hi = 1.0);

    int index_of(double value) const noexcept {
        if (hi <= lo) return 0;
        const double k = std::floor((value - lo) / (hi - lo) * count);
        return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(count - 1)));
    }
    double lower_edge(int k) const noexcept { return lo + (hi - lo) * k / count; }
    double upper_edge(int k) const noexcept { return k + 1 == count ? hi : lo + (hi - lo) * (k + 1) / count; }
    bool in_range(double value) const noexcept { return value >= lo && value <= hi; }
};

/// Observed [min, max] of a numeric feature over the whole dataset; nullopt
/// when no instance carries a numeric value for it.
std::optional<std::pair<double, double>> numeric_feature_range(const Dataset& dataset, const std::string& feature);

/// True when at least one instance carries a string value for the feature.
bool feature_has_strings(const Dataset& dataset, const std::string& feature);

} // namespace cbx
