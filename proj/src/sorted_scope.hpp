#pragma once

#include "cbx/dataset.hpp"
#include "cbx/member_set.hpp"
#include "cbx/trinary.hpp"
#include "cbx/weights.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace cbx::detail {

/// Scores of the scope sorted ascending with per-class weight prefix sums,
/// so the tallies of any (lower, upper) band cost two binary searches.
class SortedScope {
public:
    SortedScope(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope,
                const WeightVector* weights) {
        std::vector<std::pair<double, std::uint32_t>> order;
        order.reserve(scope ? scope->count() : dataset.size());
        const auto s = classifier.score_view();
        for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) { order.emplace_back(s[i], i); });
        std::sort(order.begin(), order.end());
        scores_.reserve(order.size());
        pos_.assign(order.size() + 1, 0.0);
        neg_.assign(order.size() + 1, 0.0);
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto i = order[k].second;
            const double w = weight_at(weights, i);
            scores_.push_back(order[k].first);
            const bool positive = dataset.label(i) == Label::Positive;
            pos_[k + 1] = pos_[k] + (positive ? w : 0.0);
            neg_[k + 1] = neg_[k] + (positive ? 0.0 : w);
        }
    }

    std::size_t size() const noexcept { return scores_.size(); }
    double total() const noexcept { return pos_.back() + neg_.back(); }

    TrinaryCounts counts(const OperatingPoint& op) const {
        const std::size_t lo = first_at_least(op.lower);
        const std::size_t up = std::max(lo, first_at_least(op.upper));
        const std::size_t n = scores_.size();
        TrinaryCounts c;
        c.tn = neg_[lo];
        c.fn = pos_[lo];
        c.tp = pos_[n] - pos_[up];
        c.fp = neg_[n] - neg_[up];
        c.rejected = (pos_[up] - pos_[lo]) + (neg_[up] - neg_[lo]);
        return c;
    }

private:
    std::size_t first_at_least(double t) const {
        return static_cast<std::size_t>(std::lower_bound(scores_.begin(), scores_.end(), t) - scores_.begin());
    }

    std::vector<double> scores_;
    std::vector<double> pos_;
    std::vector<double> neg_;
};

} // namespace cbx::detail
