#pragma once

#include "cbx/dataset.hpp"
#include "cbx/member_set.hpp"
#include "cbx/trinary.hpp"
#include "cbx/weights.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace cbx {

/// Weight-summed tp/fp/tn/fn plus the rejected mass.
using WeightedConfusion = TrinaryCounts;

enum class Metric { Accuracy, Precision, Recall, F1, MCC };

/// How rejected items enter accuracy: dropped, counted right, or counted wrong.
enum class RejectedPolicy { Exclude, AsCorrect, AsIncorrect };

std::string_view metric_name(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);
std::string_view policy_name(RejectedPolicy policy);
std::optional<RejectedPolicy> parse_policy(std::string_view name);

/// A metric value; zero-denominator cases yield {0, undefined = true}.
struct MetricValue {
    double value = 0.0;
    bool undefined = false;

    bool operator==(const MetricValue&) const = default;
};

WeightedConfusion confusion(const Dataset& dataset, const ClassifierResult& classifier, const OperatingPoint& op,
                            const MemberSet* scope = nullptr, const WeightVector* weights = nullptr);

/// accuracy, precision, recall, F1 and MCC over the accepted tallies.
/// AsCorrect / AsIncorrect are defined for accuracy only; any other metric
/// throws Error(UnsupportedPolicy).
MetricValue binary_metric(const WeightedConfusion& c, Metric metric, RejectedPolicy policy = RejectedPolicy::Exclude);

/// Unweighted ROC area with ties counted one half. Throws UndefinedMetric
/// unless the scope holds both classes.
double auc(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope = nullptr);

/// Weighted mean squared error between scores and 0/1 labels. Throws
/// UndefinedMetric on an empty (or zero-weight) scope.
double brier(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope = nullptr,
             const WeightVector* weights = nullptr);

struct WeightedSelection {
    const MemberSet* members = nullptr;
    double weight = 1.0;
};

/// Multiplies the weights of every selection an instance belongs to;
/// instances in no selection get 1. Selection weights must be > 0.
WeightVector combine_weights(std::size_t universe, std::span<const WeightedSelection> selections);

} // namespace cbx
