#pragma once

#include "cbx/binning.hpp"
#include "cbx/dataset.hpp"
#include "cbx/member_set.hpp"
#include "cbx/metrics.hpp"
#include "cbx/selection.hpp"
#include "cbx/trinary.hpp"
#include "cbx/weights.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbx {

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
    std::optional<double> param; ///< generating threshold or bandwidth
    bool undefined = false;

    bool operator==(const CurvePoint&) const = default;
};

struct CurveSeries {
    std::string label;
    std::vector<CurvePoint> points;
};

/// Trapezoidal area under a series, in point order.
double trapezoid_area(const CurveSeries& series);

/// (FPR, TPR, threshold) for the rule s >= threshold, one point per distinct
/// score plus the (0, 0) origin. Throws UndefinedCurve unless both classes
/// are in scope.
CurveSeries roc_curve(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope = nullptr);

/// (recall, precision, threshold), ordered by recall. The leading recall-0
/// point has no predicted positives; it is flagged undefined and carries the
/// precision of the highest threshold.
CurveSeries pr_curve(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope = nullptr);

enum class ReliabilityMode { FractionPositive, PercentCorrect };

struct ReliabilityBin {
    int bin = 0;
    double lo = 0.0;
    double hi = 0.0;
    double mean_score = 0.0;
    double value = 0.0;
    std::size_t count = 0;
    bool undefined = false;
};

/// Per score bin: mean score, and either the fraction of positive labels or
/// the fraction of accepted items predicted correctly at `op` (rejected items
/// excluded). Empty bins are flagged undefined. PercentCorrect without an
/// operating point throws InvalidArgument.
std::vector<ReliabilityBin> reliability_curve(const Dataset& dataset, const ClassifierResult& classifier,
                                              const BinSpec& bins, ReliabilityMode mode,
                                              const MemberSet* scope = nullptr,
                                              std::optional<OperatingPoint> op = std::nullopt);

struct PerfConfBin {
    int bin = 0;
    double lo = 0.0;
    double hi = 0.0;
    TrinaryCounts counts;
};

/// Stacked outcome counts per score bin.
std::vector<PerfConfBin> perf_conf_histogram(const Dataset& dataset, const ClassifierResult& classifier,
                                             const OperatingPoint& op, const BinSpec& bins,
                                             const MemberSet* scope = nullptr, const WeightVector* weights = nullptr);

/// Accuracy-rejection style curve: bandwidth b swept over `steps` values in
/// [0, max(t, 1 - t)], band (t - b, t + b) clamped to [0, 1]; x is the
/// rejected fraction and y the metric under `policy`. Ordered by x; for equal
/// x only the largest-b point is kept.
CurveSeries rejection_curve(const Dataset& dataset, const ClassifierResult& classifier, double threshold,
                            Metric metric, RejectedPolicy policy = RejectedPolicy::Exclude,
                            const MemberSet* scope = nullptr, int steps = 101, const WeightVector* weights = nullptr);

struct BandwidthMark {
    double bandwidth = 0.0;
    MetricValue upper; ///< rejected counted as correct
    MetricValue lower; ///< rejected counted as incorrect
};

struct BandwidthRow {
    double threshold = 0.0;
    MetricValue center; ///< plain threshold, b = 0
    std::vector<BandwidthMark> marks;
};

/// For t = i / resolution (i = 0..resolution) and each b: accuracy at t and
/// its as-correct / as-incorrect range at (t - b, t + b). Only accuracy has
/// those policies, so any other metric throws UnsupportedPolicy.
std::vector<BandwidthRow> bandwidth_series(const Dataset& dataset, const ClassifierResult& classifier,
                                           std::span<const double> bandwidths, Metric metric = Metric::Accuracy,
                                           int resolution = 20, const MemberSet* scope = nullptr,
                                           const WeightVector* weights = nullptr);

struct HeatmapCell {
    double lower = 0.0;
    double upper = 0.0;
    MetricValue value;
    double coverage = 0.0;
};

/// Metric (rejected excluded) and coverage for every lower <= upper on the
/// (resolution + 1)^2 lattice over [0, 1]; row-major in lower then upper.
std::vector<HeatmapCell> threshold_grid(const Dataset& dataset, const ClassifierResult& classifier, Metric metric,
                                        int resolution = 20, const MemberSet* scope = nullptr,
                                        const WeightVector* weights = nullptr);

/// Either a classifier's score or a numeric feature.
struct ScatterVariable {
    enum class Kind { Score, Feature };
    Kind kind = Kind::Score;
    std::string name;

    /// "score:<classifier>", "feature:<name>", or a bare name resolved as a
    /// classifier first, then a feature.
    static ScatterVariable parse(const Dataset& dataset, const std::string& text);
};

struct OverlayPoint {
    std::string selection;
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

struct ScatterOverlay {
    std::string selection;
    const MemberSet* members = nullptr;
};

struct ScatterGrid {
    int nx = 1;
    int ny = 1;
    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    std::vector<std::size_t> counts; ///< row-major, index = y_bin * nx + x_bin
    std::size_t total = 0;
    std::vector<OverlayPoint> overlay;
};

/// Density counts over the variables' observed ranges (whole dataset) for
/// scope members with both values present, plus exact coordinates of the
/// overlay selections' members within scope. String-valued features throw
/// TypeError.
ScatterGrid scatter_bins(const Dataset& dataset, const ScatterVariable& x, const ScatterVariable& y, int nx, int ny,
                         const MemberSet* scope = nullptr, std::span<const ScatterOverlay> overlays = {});

struct HistogramBar {
    std::string label;
    Predicate predicate;
    std::size_t count = 0;
    std::vector<std::size_t> overlap; ///< per overlay, members also in that selection
};

struct FeatureHistogram {
    std::string feature;
    bool categorical = false;
    std::vector<HistogramBar> bars;
};

/// Numeric features: `bins` equal-width bars over the observed range.
/// Otherwise one bar per category, most frequent first (ties by name).
FeatureHistogram feature_histogram(const Dataset& dataset, const std::string& feature, int bins = 10,
                                   const MemberSet* scope = nullptr, std::span<const ScatterOverlay> overlays = {});

} // namespace cbx
