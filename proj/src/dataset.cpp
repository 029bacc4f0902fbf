#include "cbx/dataset.hpp"

#include "cbx/error.hpp"

#include <algorithm>
#include <numeric>

namespace cbx {

double ClassifierResult::raw_score(std::size_t index) const {
    const double s = score(index);
    if (!normalization) return s;
    if (normalization->max == normalization->min) return normalization->min;
    return normalization->min + s * (normalization->max - normalization->min);
}

bool ClassifierResult::operator==(const ClassifierResult& other) const {
    const bool same_scores = (scores == other.scores) ||
                             (scores && other.scores && *scores == *other.scores);
    return name == other.name && kind == other.kind && same_scores &&
           normalization == other.normalization && frozen_point == other.frozen_point &&
           base == other.base;
}

Dataset::Dataset(ClassNames classes, std::vector<Instance> instances,
                 std::vector<ClassifierResult> classifiers, std::string provenance)
    : classes_(std::move(classes)), provenance_(std::move(provenance)) {
    std::vector<std::size_t> order(instances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return instances[a].id < instances[b].id;
    });

    instances_.reserve(instances.size());
    labels_.reserve(instances.size());
    for (auto i : order) {
        index_.emplace(instances[i].id, instances_.size());
        labels_.push_back(instances[i].label);
        for (const auto& [name, value] : instances[i].features) feature_names_.insert(name);
        instances_.push_back(std::move(instances[i]));
    }

    for (auto& c : classifiers) {
        if (!c.scores || c.scores->size() != order.size())
            throw Error(ErrorCode::InvalidArgument, "classifier '" + c.name + "' does not cover every instance");
        std::vector<double> permuted(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) permuted[k] = (*c.scores)[order[k]];
        c.scores = std::make_shared<const std::vector<double>>(std::move(permuted));
    }
    // Derived classifiers share their base's vector after permutation.
    for (auto& c : classifiers) {
        if (c.kind != ClassifierKind::Derived) continue;
        for (const auto& b : classifiers)
            if (b.name == c.base && b.kind == ClassifierKind::Loaded) c.scores = b.scores;
    }
    classifiers_ = std::move(classifiers);
}

std::optional<std::size_t> Dataset::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Dataset::require_index(const std::string& id) const {
    if (auto i = index_of(id)) return *i;
    throw Error(ErrorCode::UnknownInstance, "unknown instance id '" + id + "'", id);
}

const ClassifierResult* Dataset::find_classifier(const std::string& name) const {
    for (const auto& c : classifiers_)
        if (c.name == name) return &c;
    return nullptr;
}

const ClassifierResult& Dataset::classifier(const std::string& name) const {
    if (const auto* c = find_classifier(name)) return *c;
    throw Error(ErrorCode::UnknownClassifier, "unknown classifier '" + name + "'", name);
}

void Dataset::add_classifier(ClassifierResult classifier) {
    if (find_classifier(classifier.name))
        throw Error(ErrorCode::Conflict, "classifier name '" + classifier.name + "' is already in use",
                    classifier.name);
    if (!classifier.scores || classifier.scores->size() != size())
        throw Error(ErrorCode::InvalidArgument, "classifier '" + classifier.name + "' does not cover every instance");
    classifiers_.push_back(std::move(classifier));
}

const FeatureValue* Dataset::feature(std::size_t index, const std::string& name) const {
    const auto& features = instances_[index].features;
    auto it = features.find(name);
    return it == features.end() ? nullptr : &it->second;
}

std::size_t Dataset::positive_count() const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::Positive));
}

bool Dataset::operator==(const Dataset& other) const {
    return classes_ == other.classes_ && instances_ == other.instances_ &&
           classifiers_ == other.classifiers_ && provenance_ == other.provenance_;
}

} // namespace cbx
