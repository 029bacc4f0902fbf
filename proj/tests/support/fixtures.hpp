#pragma once

// Dataset builders and from-scratch oracles shared by the unit and
// acceptance suites. Oracles recount from raw (score, label) pairs.

#include "cbx/dataset.hpp"
#include "cbx/error.hpp"
#include "cbx/ingest.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

using Scores = std::vector<std::pair<std::string, std::vector<double>>>;

inline std::string item_id(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "i%06zu", i);
    return buf;
}

/// Ingest JSON with ids i000000, i000001, ... so sorted id order equals
/// construction order. labels: 1 = positive.
inline nlohmann::json ingest_doc(const std::vector<int>& labels, const Scores& classifiers,
                                 const std::vector<cbx::FeatureMap>& features = {}) {
    nlohmann::json doc;
    doc["classes"] = {"neg", "pos"};
    auto& instances = doc["instances"] = nlohmann::json::array();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        nlohmann::json inst{{"id", item_id(i)}, {"label", labels[i] ? "pos" : "neg"}};
        nlohmann::json f = nlohmann::json::object();
        if (i < features.size())
            for (const auto& [k, v] : features[i]) std::visit([&](const auto& x) { f[k] = x; }, v);
        inst["features"] = f;
        instances.push_back(std::move(inst));
    }
    auto& clfs = doc["classifiers"] = nlohmann::json::array();
    for (const auto& [name, scores] : classifiers) {
        nlohmann::json s = nlohmann::json::object();
        for (std::size_t i = 0; i < scores.size(); ++i) s[item_id(i)] = scores[i];
        clfs.push_back({{"name", name}, {"scores", s}});
    }
    return doc;
}

inline cbx::Dataset make_dataset(const std::vector<int>& labels, const Scores& classifiers,
                                 const std::vector<cbx::FeatureMap>& features = {}) {
    auto result = cbx::load_dataset(ingest_doc(labels, classifiers, features).dump(), cbx::IngestFormat::Json);
    if (!result.report.ok()) throw std::runtime_error("fixture failed validation: " + result.report.errors[0].message);
    return std::move(*result.dataset);
}

/// The 4-item example used throughout: scores .9 .8 .3 .1, labels p n n p.
inline cbx::Dataset running_example() { return make_dataset({1, 0, 0, 1}, {{"LR", {0.9, 0.8, 0.3, 0.1}}}); }

/// Random small dataset. Scores are drawn from a coarse grid so ties and
/// exact boundary hits are common.
inline cbx::Dataset random_dataset(std::mt19937_64& gen, std::size_t max_items = 12, int classifiers = 1,
                                   bool with_features = false) {
    std::uniform_int_distribution<std::size_t> size(2, max_items);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> grid(0, 20);
    const auto n = size(gen);
    std::vector<int> labels(n);
    for (auto& l : labels) l = coin(gen);
    Scores scores;
    for (int c = 0; c < classifiers; ++c) {
        std::vector<double> s(n);
        for (auto& v : s) v = grid(gen) / 20.0;
        scores.emplace_back("C" + std::to_string(c), std::move(s));
    }
    std::vector<cbx::FeatureMap> features;
    if (with_features) {
        std::uniform_int_distribution<int> num(0, 9);
        const char* cats[] = {"red", "green", "blue"};
        for (std::size_t i = 0; i < n; ++i) {
            cbx::FeatureMap f;
            if (num(gen) != 0) f["x"] = static_cast<double>(num(gen));
            f["color"] = std::string(cats[num(gen) % 3]);
            features.push_back(std::move(f));
        }
    }
    return make_dataset(labels, scores, features);
}

// ------------------------------------------------------------ oracles

struct Tally {
    double tp = 0, fp = 0, tn = 0, fn = 0, rej = 0;
};

/// Recount by the decision rule, written out longhand.
inline Tally oracle_tally(const std::vector<double>& scores, const std::vector<int>& labels, double lower,
                          double upper, const std::vector<double>& weights = {}) {
    Tally t;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        const double s = scores[i];
        const bool pos = labels[i] == 1;
        if (s >= upper) (pos ? t.tp : t.fp) += w;
        else if (s < lower) (pos ? t.fn : t.tn) += w;
        else t.rej += w;
    }
    return t;
}

struct OracleValue {
    double value;
    bool undefined;
};

inline OracleValue ratio(double num, double den) { return den == 0 ? OracleValue{0, true} : OracleValue{num / den, false}; }

inline OracleValue oracle_accuracy(const Tally& t) { return ratio(t.tp + t.tn, t.tp + t.tn + t.fp + t.fn); }
inline OracleValue oracle_precision(const Tally& t) { return ratio(t.tp, t.tp + t.fp); }
inline OracleValue oracle_recall(const Tally& t) { return ratio(t.tp, t.tp + t.fn); }
inline OracleValue oracle_f1(const Tally& t) {
    const auto p = oracle_precision(t), r = oracle_recall(t);
    if (p.undefined || r.undefined || p.value + r.value == 0) return {0, true};
    return {2 * p.value * r.value / (p.value + r.value), false};
}
inline OracleValue oracle_mcc(const Tally& t) {
    const double den = (t.tp + t.fp) * (t.tp + t.fn) * (t.tn + t.fp) * (t.tn + t.fn);
    if (den == 0) return {0, true};
    return {(t.tp * t.tn - t.fp * t.fn) / std::sqrt(den), false};
}

/// Mann-Whitney by explicit pair enumeration, returned as (2 * wins + ties, 2 * P * N).
inline std::pair<long long, long long> oracle_auc_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
    long long num = 0, pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) num += 2;
            else if (scores[i] == scores[j]) num += 1;
        }
    }
    return {num, 2 * pairs};
}

inline std::vector<int> labels_of(const cbx::Dataset& ds) {
    std::vector<int> out;
    for (auto l : ds.labels()) out.push_back(l == cbx::Label::Positive ? 1 : 0);
    return out;
}

inline std::vector<double> scores_of(const cbx::Dataset& ds, const std::string& name) {
    const auto v = ds.classifier(name).score_view();
    return {v.begin(), v.end()};
}

} // namespace fixtures
