#pragma once

#include "cbx/member_set.hpp"

#include <cstddef>
#include <vector>

namespace cbx {

/// Per-instance weights used by every weighted tally. Weights are
/// non-negative; a zero weight (an instance a bootstrap draw missed) drops the
/// instance from sums without removing it from selections.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::size_t size, double value = 1.0) : values_(size, value) {}
    /// Throws InvalidArgument on negative or non-finite entries.
    explicit WeightVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t index) const { return values_[index]; }
    const std::vector<double>& values() const noexcept { return values_; }

    bool operator==(const WeightVector&) const = default;

private:
    std::vector<double> values_;
};

/// Visits every index of [0, universe) that is in `scope` (all when null).
template <typename Fn>
void for_each_in_scope(std::size_t universe, const MemberSet* scope, Fn&& fn) {
    if (scope) {
        scope->for_each(fn);
    } else {
        for (std::size_t i = 0; i < universe; ++i) fn(static_cast<std::uint32_t>(i));
    }
}

inline double weight_at(const WeightVector* weights, std::size_t index) {
    return weights ? (*weights)[index] : 1.0;
}

} // namespace cbx
