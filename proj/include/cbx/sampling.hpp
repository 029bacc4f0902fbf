#pragma once

#include "cbx/dataset.hpp"
#include "cbx/member_set.hpp"
#include "cbx/metrics.hpp"
#include "cbx/weights.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbx {

// All sampling draws from std::mt19937_64 seeded with the caller's seed, so
// results replay bit-for-bit within one standard library implementation.

struct Stratification {
    enum class By { None, Class, Feature };
    By by = By::None;
    std::string feature; ///< By::Feature only
};

struct PartitionResult {
    std::uint64_t seed = 0;
    double fraction = 0.0;
    Stratification stratify;
    MemberSet a;
    MemberSet b;
    std::vector<std::string> warnings;
};

/// Splits the dataset into A (about fraction * N items) and its complement B.
/// Unstratified: |A| = round(fraction * N), drawn without replacement.
/// Stratified: floor(fraction * n_s) per stratum, then the remaining slots go
/// to the strata with the largest fractional remainders (ties by stratum
/// name). Throws InvalidArgument unless 0 < fraction < 1, EmptyPartition when
/// fraction * N < 1, UnknownFeature for a missing stratification feature.
PartitionResult partition(const Dataset& dataset, double fraction, const Stratification& stratify,
                          std::uint64_t seed);

struct BootstrapResult {
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> multiplicity; ///< per instance; sums to the draw count

    std::size_t draws() const noexcept;
    WeightVector weights() const;
};

/// `size` uniform draws with replacement (default: dataset size).
BootstrapResult bootstrap(const Dataset& dataset, std::uint64_t seed, std::optional<std::size_t> size = std::nullopt);

enum class ReplicateAnalysis { BestMccThreshold, MetricAtOp };

struct ReplicateOptions {
    ReplicateAnalysis analysis = ReplicateAnalysis::MetricAtOp;
    OperatingPoint op;              ///< MetricAtOp
    Metric metric = Metric::Accuracy; ///< MetricAtOp
    int resolution = 100;           ///< BestMccThreshold threshold grid
};

struct ReplicateValue {
    std::uint64_t seed = 0;
    double value = 0.0;
    bool undefined = false;
};

struct ReplicateSummary {
    std::vector<ReplicateValue> results; ///< in seed order
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::size_t defined = 0;
};

/// Runs the analysis on one bootstrap variant per seed. BestMccThreshold
/// reports the grid threshold maximizing MCC; when several tie, the median
/// of the tied thresholds.
ReplicateSummary replicate_sweep(const Dataset& dataset, const ClassifierResult& classifier,
                                 std::span<const std::uint64_t> seeds, const ReplicateOptions& options);

} // namespace cbx
