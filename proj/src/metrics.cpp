#include "cbx/metrics.hpp"

#include "cbx/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace cbx {

std::string_view metric_name(Metric metric) {
    switch (metric) {
        case Metric::Accuracy: return "accuracy";
        case Metric::Precision: return "precision";
        case Metric::Recall: return "recall";
        case Metric::F1: return "f1";
        case Metric::MCC: return "mcc";
    }
    return "";
}

std::optional<Metric> parse_metric(std::string_view name) {
    for (auto m : {Metric::Accuracy, Metric::Precision, Metric::Recall, Metric::F1, Metric::MCC})
        if (metric_name(m) == name) return m;
    return std::nullopt;
}

std::string_view policy_name(RejectedPolicy policy) {
    switch (policy) {
        case RejectedPolicy::Exclude: return "exclude";
        case RejectedPolicy::AsCorrect: return "as-correct";
        case RejectedPolicy::AsIncorrect: return "as-incorrect";
    }
    return "";
}

std::optional<RejectedPolicy> parse_policy(std::string_view name) {
    for (auto p : {RejectedPolicy::Exclude, RejectedPolicy::AsCorrect, RejectedPolicy::AsIncorrect})
        if (policy_name(p) == name) return p;
    return std::nullopt;
}

WeightedConfusion confusion(const Dataset& dataset, const ClassifierResult& classifier, const OperatingPoint& op,
                            const MemberSet* scope, const WeightVector* weights) {
    return trinary_summary(dataset, classifier, op, scope, weights);
}

namespace {

MetricValue ratio(double num, double den) {
    if (den == 0.0) return {0.0, true};
    return {num / den, false};
}

} // namespace

MetricValue binary_metric(const WeightedConfusion& c, Metric metric, RejectedPolicy policy) {
    if (policy != RejectedPolicy::Exclude && metric != Metric::Accuracy)
        throw Error(ErrorCode::UnsupportedPolicy, "rejected policy '" + std::string(policy_name(policy)) +
                                                      "' is only defined for accuracy");
    switch (metric) {
        case Metric::Accuracy: {
            const double correct = c.tp + c.tn;
            const double accepted = c.tp + c.tn + c.fp + c.fn;
            switch (policy) {
                case RejectedPolicy::Exclude: return ratio(correct, accepted);
                case RejectedPolicy::AsCorrect: return ratio(correct + c.rejected, accepted + c.rejected);
                case RejectedPolicy::AsIncorrect: return ratio(correct, accepted + c.rejected);
            }
            break;
        }
        case Metric::Precision: return ratio(c.tp, c.tp + c.fp);
        case Metric::Recall: return ratio(c.tp, c.tp + c.fn);
        case Metric::F1: {
            const auto p = ratio(c.tp, c.tp + c.fp);
            const auto r = ratio(c.tp, c.tp + c.fn);
            if (p.undefined || r.undefined) return {0.0, true};
            return ratio(2.0 * p.value * r.value, p.value + r.value);
        }
        case Metric::MCC: {
            const double den = (c.tp + c.fp) * (c.tp + c.fn) * (c.tn + c.fp) * (c.tn + c.fn);
            if (den == 0.0) return {0.0, true};
            const double v = (c.tp * c.tn - c.fp * c.fn) / std::sqrt(den);
            return {std::clamp(v, -1.0, 1.0), false};
        }
    }
    return {0.0, true};
}

double auc(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope) {
    std::vector<std::pair<double, Label>> items;
    items.reserve(scope ? scope->count() : dataset.size());
    const auto scores = classifier.score_view();
    for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) { items.emplace_back(scores[i], dataset.label(i)); });

    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    // Twice the Mann-Whitney count: 2 per ordered pair, 1 per tie.
    std::uint64_t positives_above = 0;
    std::uint64_t doubled = 0;
    std::uint64_t negatives = 0;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        std::uint64_t p = 0;
        std::uint64_t n = 0;
        for (; j < items.size() && items[j].first == items[i].first; ++j)
            (items[j].second == Label::Positive ? p : n) += 1;
        doubled += n * (2 * positives_above + p);
        positives_above += p;
        negatives += n;
        i = j;
    }
    if (positives_above == 0 || negatives == 0)
        throw Error(ErrorCode::UndefinedMetric, "AUC needs at least one positive and one negative item");
    return static_cast<double>(doubled) / (2.0 * static_cast<double>(positives_above) * static_cast<double>(negatives));
}

double brier(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope,
             const WeightVector* weights) {
    double num = 0.0;
    double den = 0.0;
    const auto scores = classifier.score_view();
    for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) {
        const double y = dataset.label(i) == Label::Positive ? 1.0 : 0.0;
        const double w = weight_at(weights, i);
        const double d = scores[i] - y;
        num += w * d * d;
        den += w;
    });
    if (den == 0.0) throw Error(ErrorCode::UndefinedMetric, "Brier score needs a non-empty scope");
    return num / den;
}

WeightVector combine_weights(std::size_t universe, std::span<const WeightedSelection> selections) {
    std::vector<double> w(universe, 1.0);
    for (const auto& sel : selections) {
        if (!(sel.weight > 0.0) || !std::isfinite(sel.weight))
            throw Error(ErrorCode::InvalidArgument, "selection weights must be positive");
        if (!sel.members) continue;
        sel.members->for_each([&](std::uint32_t i) { w[i] *= sel.weight; });
    }
    return WeightVector(std::move(w));
}

} // namespace cbx
