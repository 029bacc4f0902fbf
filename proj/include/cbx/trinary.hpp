#pragma once

#include "cbx/dataset.hpp"
#include "cbx/member_set.hpp"
#include "cbx/operating_point.hpp"
#include "cbx/weights.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cbx {

enum class Prediction { Negative, Rejected, Positive };

enum class Outcome { TP, FP, TN, FN, Rejected };

inline constexpr std::array<Outcome, 5> kOutcomes = {Outcome::TP, Outcome::FP, Outcome::TN, Outcome::FN,
                                                      Outcome::Rejected};

std::string_view outcome_name(Outcome outcome);
std::optional<Outcome> parse_outcome(std::string_view name);

inline Prediction predict(double score, const OperatingPoint& op) noexcept {
    if (score >= op.upper) return Prediction::Positive;
    if (score < op.lower) return Prediction::Negative;
    return Prediction::Rejected;
}

inline Outcome classify(double score, Label label, const OperatingPoint& op) noexcept {
    switch (predict(score, op)) {
        case Prediction::Positive: return label == Label::Positive ? Outcome::TP : Outcome::FP;
        case Prediction::Negative: return label == Label::Positive ? Outcome::FN : Outcome::TN;
        case Prediction::Rejected: break;
    }
    return Outcome::Rejected;
}

/// Weight-summed tallies of the five trinary outcomes.
struct TrinaryCounts {
    double tp = 0.0;
    double fp = 0.0;
    double tn = 0.0;
    double fn = 0.0;
    double rejected = 0.0;

    double total() const noexcept { return tp + fp + tn + fn + rejected; }
    double accepted() const noexcept { return tp + fp + tn + fn; }

    double& operator[](Outcome o) noexcept;
    double operator[](Outcome o) const noexcept;

    bool operator==(const TrinaryCounts&) const = default;
};

TrinaryCounts trinary_summary(const Dataset& dataset, const ClassifierResult& classifier, const OperatingPoint& op,
                              const MemberSet* scope = nullptr, const WeightVector* weights = nullptr);

/// Freezes `base` at `op` under a new name. The result shares the base's
/// scores; deriving from a derived classifier re-roots on its loaded base.
/// Throws Conflict when `name` is already used in `dataset`.
ClassifierResult derive_classifier(const Dataset& dataset, const ClassifierResult& base, const OperatingPoint& op,
                                   std::string name);

/// Live per-classifier operating points with version counters. Every change
/// also bumps a table-wide epoch that dependent caches key on.
class OperatingPointTable {
public:
    struct Entry {
        OperatingPoint point;
        std::uint64_t version = 0;
    };

    /// Point for a classifier: its frozen point when derived, else the live
    /// entry, else the default (0.5, 0.5).
    OperatingPoint point_for(const ClassifierResult& classifier) const;
    std::optional<Entry> entry(const std::string& name) const;
    std::uint64_t version(const std::string& name) const;

    /// Returns the new version of `name`.
    std::uint64_t set(const std::string& name, const OperatingPoint& op);
    /// Restores a recorded state verbatim (session import).
    void restore(const std::string& name, const Entry& entry);

    std::uint64_t epoch() const noexcept { return epoch_; }
    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, Entry> entries_;
    std::uint64_t epoch_ = 0;
};

} // namespace cbx
