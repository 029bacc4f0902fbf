#pragma once

#include "cbx/operating_point.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace cbx {

enum class Label : std::uint8_t { Negative = 0, Positive = 1 };

/// A present feature value. Absent values are simply missing from the map.
using FeatureValue = std::variant<double, std::string>;
using FeatureMap = std::map<std::string, FeatureValue>;

struct Instance {
    std::string id;
    Label label = Label::Negative;
    FeatureMap features;

    bool operator==(const Instance&) const = default;
};

enum class ClassifierKind { Loaded, Derived };

/// Min-max parameters applied at ingestion; raw = min + s * (max - min).
struct ScoreNormalization {
    double min = 0.0;
    double max = 1.0;

    bool operator==(const ScoreNormalization&) const = default;
};

struct ClassifierResult {
    std::string name;
    ClassifierKind kind = ClassifierKind::Loaded;
    /// One score per instance, aligned with Dataset::instances(). Derived
    /// classifiers share the vector of their base.
    std::shared_ptr<const std::vector<double>> scores;
    std::optional<ScoreNormalization> normalization;
    /// Set only for derived classifiers.
    std::optional<OperatingPoint> frozen_point;
    std::string base;

    double score(std::size_t index) const { return (*scores)[index]; }
    std::span<const double> score_view() const { return {scores->data(), scores->size()}; }
    double raw_score(std::size_t index) const;

    bool operator==(const ClassifierResult& other) const;
};

struct ClassNames {
    std::string negative;
    std::string positive;

    const std::string& name_of(Label label) const {
        return label == Label::Positive ? positive : negative;
    }
    bool operator==(const ClassNames&) const = default;
};

/// A testing set: instances sorted by id, their ground truth, features, and
/// the scores every classifier assigned to them. Build through load_dataset().
class Dataset {
public:
    Dataset() = default;
    /// Sorts instances by id and permutes every score vector to match.
    /// Callers are expected to have validated ids, labels and score coverage.
    Dataset(ClassNames classes, std::vector<Instance> instances,
            std::vector<ClassifierResult> classifiers, std::string provenance);

    std::size_t size() const noexcept { return instances_.size(); }
    const std::vector<Instance>& instances() const noexcept { return instances_; }
    const Instance& instance(std::size_t index) const { return instances_.at(index); }
    std::optional<std::size_t> index_of(const std::string& id) const;
    /// Throws UnknownInstance.
    std::size_t require_index(const std::string& id) const;

    const std::vector<Label>& labels() const noexcept { return labels_; }
    Label label(std::size_t index) const { return labels_[index]; }
    const ClassNames& classes() const noexcept { return classes_; }
    const std::string& provenance() const noexcept { return provenance_; }

    const std::vector<ClassifierResult>& classifiers() const noexcept { return classifiers_; }
    const ClassifierResult* find_classifier(const std::string& name) const;
    /// Throws UnknownClassifier.
    const ClassifierResult& classifier(const std::string& name) const;
    /// Throws Conflict when the name is taken.
    void add_classifier(ClassifierResult classifier);

    const std::set<std::string>& feature_names() const noexcept { return feature_names_; }
    bool has_feature(const std::string& name) const { return feature_names_.count(name) != 0; }
    const FeatureValue* feature(std::size_t index, const std::string& name) const;

    std::size_t positive_count() const noexcept;

    bool operator==(const Dataset& other) const;

private:
    ClassNames classes_;
    std::vector<Instance> instances_;
    std::vector<Label> labels_;
    std::vector<ClassifierResult> classifiers_;
    std::unordered_map<std::string, std::size_t> index_;
    std::set<std::string> feature_names_;
    std::string provenance_;
};

} // namespace cbx
