#include "cbx/trinary.hpp"

#include "cbx/error.hpp"

#include <algorithm>
#include <cmath>

namespace cbx {

OperatingPoint OperatingPoint::make(double lower, double upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || lower < 0.0 || upper > 1.0 || lower > upper)
        throw Error(ErrorCode::InvalidArgument, "operating point must satisfy 0 <= lower <= upper <= 1");
    return OperatingPoint{lower, upper};
}

OperatingPoint OperatingPoint::band(double center, double bandwidth) {
    if (!std::isfinite(center) || center < 0.0 || center > 1.0)
        throw Error(ErrorCode::InvalidArgument, "threshold must lie in [0, 1]");
    if (!std::isfinite(bandwidth) || bandwidth < 0.0)
        throw Error(ErrorCode::InvalidArgument, "bandwidth must be non-negative");
    return OperatingPoint{std::max(0.0, center - bandwidth), std::min(1.0, center + bandwidth)};
}

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
    for (double w : values_)
        if (!std::isfinite(w) || w < 0.0) throw Error(ErrorCode::InvalidArgument, "weights must be finite and >= 0");
}

std::string_view outcome_name(Outcome outcome) {
    switch (outcome) {
        case Outcome::TP: return "TP";
        case Outcome::FP: return "FP";
        case Outcome::TN: return "TN";
        case Outcome::FN: return "FN";
        case Outcome::Rejected: return "Rejected";
    }
    return "";
}

std::optional<Outcome> parse_outcome(std::string_view name) {
    for (auto o : kOutcomes)
        if (outcome_name(o) == name) return o;
    if (name == "rejected" || name == "REJECTED") return Outcome::Rejected;
    return std::nullopt;
}

double& TrinaryCounts::operator[](Outcome o) noexcept {
    switch (o) {
        case Outcome::TP: return tp;
        case Outcome::FP: return fp;
        case Outcome::TN: return tn;
        case Outcome::FN: return fn;
        case Outcome::Rejected: break;
    }
    return rejected;
}

double TrinaryCounts::operator[](Outcome o) const noexcept {
    return const_cast<TrinaryCounts&>(*this)[o];
}

TrinaryCounts trinary_summary(const Dataset& dataset, const ClassifierResult& classifier, const OperatingPoint& op,
                              const MemberSet* scope, const WeightVector* weights) {
    TrinaryCounts counts;
    const auto& labels = dataset.labels();
    const auto scores = classifier.score_view();
    for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) {
        counts[classify(scores[i], labels[i], op)] += weight_at(weights, i);
    });
    return counts;
}

ClassifierResult derive_classifier(const Dataset& dataset, const ClassifierResult& base, const OperatingPoint& op,
                                   std::string name) {
    if (name.empty()) throw Error(ErrorCode::InvalidArgument, "derived classifier needs a name");
    if (dataset.find_classifier(name))
        throw Error(ErrorCode::Conflict, "classifier name '" + name + "' is already in use", name);
    const auto checked = OperatingPoint::make(op.lower, op.upper);

    ClassifierResult derived;
    derived.name = std::move(name);
    derived.kind = ClassifierKind::Derived;
    derived.scores = base.scores;
    derived.normalization = base.normalization;
    derived.frozen_point = checked;
    derived.base = base.kind == ClassifierKind::Derived ? base.base : base.name;
    return derived;
}

OperatingPoint OperatingPointTable::point_for(const ClassifierResult& classifier) const {
    if (classifier.frozen_point) return *classifier.frozen_point;
    auto it = entries_.find(classifier.name);
    return it == entries_.end() ? OperatingPoint{} : it->second.point;
}

std::optional<OperatingPointTable::Entry> OperatingPointTable::entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t OperatingPointTable::version(const std::string& name) const {
    auto it = entries_.find(name);
    return it == entries_.end() ? 0 : it->second.version;
}

std::uint64_t OperatingPointTable::set(const std::string& name, const OperatingPoint& op) {
    const auto checked = OperatingPoint::make(op.lower, op.upper);
    auto& e = entries_[name];
    e.point = checked;
    ++e.version;
    ++epoch_;
    return e.version;
}

void OperatingPointTable::restore(const std::string& name, const Entry& entry) {
    entries_[name] = entry;
    ++epoch_;
}

} // namespace cbx
