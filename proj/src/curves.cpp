#include "cbx/curves.hpp"

#include "cbx/error.hpp"
#include "sorted_scope.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace cbx {

namespace {

struct ScoredItem {
    double score;
    Label label;
};

std::vector<ScoredItem> gather_descending(const Dataset& dataset, const ClassifierResult& classifier,
                                          const MemberSet* scope, std::size_t& positives, std::size_t& negatives) {
    std::vector<ScoredItem> items;
    items.reserve(scope ? scope->count() : dataset.size());
    const auto scores = classifier.score_view();
    positives = negatives = 0;
    for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) {
        items.push_back({scores[i], dataset.label(i)});
        (dataset.label(i) == Label::Positive ? positives : negatives) += 1;
    });
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.score > b.score; });
    return items;
}

double grid_value(int i, int resolution) { return static_cast<double>(i) / resolution; }

void require_resolution(int resolution) {
    if (resolution < 1) throw Error(ErrorCode::InvalidArgument, "resolution must be >= 1");
}

std::string format_number(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

} // namespace

double trapezoid_area(const CurveSeries& series) {
    double area = 0.0;
    for (std::size_t k = 1; k < series.points.size(); ++k) {
        const auto& a = series.points[k - 1];
        const auto& b = series.points[k];
        area += (b.x - a.x) * (a.y + b.y) / 2.0;
    }
    return area;
}

CurveSeries roc_curve(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope) {
    std::size_t p = 0;
    std::size_t n = 0;
    const auto items = gather_descending(dataset, classifier, scope, p, n);
    if (p == 0 || n == 0) throw Error(ErrorCode::UndefinedCurve, "ROC curve needs both classes in scope");

    CurveSeries out;
    out.label = classifier.name;
    out.points.push_back({0.0, 0.0, std::nullopt, false});
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < items.size();) {
        const double t = items[i].score;
        for (; i < items.size() && items[i].score == t; ++i) (items[i].label == Label::Positive ? tp : fp) += 1;
        out.points.push_back({static_cast<double>(fp) / static_cast<double>(n),
                              static_cast<double>(tp) / static_cast<double>(p), t, false});
    }
    return out;
}

CurveSeries pr_curve(const Dataset& dataset, const ClassifierResult& classifier, const MemberSet* scope) {
    std::size_t p = 0;
    std::size_t n = 0;
    const auto items = gather_descending(dataset, classifier, scope, p, n);
    if (p == 0 || n == 0) throw Error(ErrorCode::UndefinedCurve, "PR curve needs both classes in scope");

    CurveSeries out;
    out.label = classifier.name;
    out.points.push_back({0.0, 0.0, std::nullopt, true});
    std::size_t tp = 0;
    std::size_t fp = 0;
    for (std::size_t i = 0; i < items.size();) {
        const double t = items[i].score;
        for (; i < items.size() && items[i].score == t; ++i) (items[i].label == Label::Positive ? tp : fp) += 1;
        out.points.push_back({static_cast<double>(tp) / static_cast<double>(p),
                              static_cast<double>(tp) / static_cast<double>(tp + fp), t, false});
    }
    out.points.front().y = out.points[1].y;
    return out;
}

std::vector<ReliabilityBin> reliability_curve(const Dataset& dataset, const ClassifierResult& classifier,
                                              const BinSpec& bins, ReliabilityMode mode, const MemberSet* scope,
                                              std::optional<OperatingPoint> op) {
    if (mode == ReliabilityMode::PercentCorrect && !op)
        throw Error(ErrorCode::InvalidArgument, "percent-correct reliability needs an operating point");
    const auto spec = BinSpec::make(bins.count, bins.lo, bins.hi);

    std::vector<double> score_sum(spec.count, 0.0);
    std::vector<std::size_t> members(spec.count, 0);
    std::vector<std::size_t> hits(spec.count, 0);
    std::vector<std::size_t> denom(spec.count, 0);
    const auto scores = classifier.score_view();
    for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) {
        const int k = spec.index_of(scores[i]);
        score_sum[k] += scores[i];
        ++members[k];
        if (mode == ReliabilityMode::FractionPositive) {
            ++denom[k];
            if (dataset.label(i) == Label::Positive) ++hits[k];
        } else {
            const auto o = classify(scores[i], dataset.label(i), *op);
            if (o == Outcome::Rejected) return;
            ++denom[k];
            if (o == Outcome::TP || o == Outcome::TN) ++hits[k];
        }
    });

    std::vector<ReliabilityBin> out(spec.count);
    for (int k = 0; k < spec.count; ++k) {
        auto& b = out[k];
        b.bin = k;
        b.lo = spec.lower_edge(k);
        b.hi = spec.upper_edge(k);
        b.count = members[k];
        b.mean_score = members[k] ? score_sum[k] / static_cast<double>(members[k]) : 0.0;
        b.undefined = denom[k] == 0;
        b.value = b.undefined ? 0.0 : static_cast<double>(hits[k]) / static_cast<double>(denom[k]);
    }
    return out;
}

std::vector<PerfConfBin> perf_conf_histogram(const Dataset& dataset, const ClassifierResult& classifier,
                                             const OperatingPoint& op, const BinSpec& bins, const MemberSet* scope,
                                             const WeightVector* weights) {
    const auto spec = BinSpec::make(bins.count, bins.lo, bins.hi);
    std::vector<PerfConfBin> out(spec.count);
    for (int k = 0; k < spec.count; ++k) {
        out[k].bin = k;
        out[k].lo = spec.lower_edge(k);
        out[k].hi = spec.upper_edge(k);
    }
    const auto scores = classifier.score_view();
    for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) {
        out[spec.index_of(scores[i])].counts[classify(scores[i], dataset.label(i), op)] += weight_at(weights, i);
    });
    return out;
}

CurveSeries rejection_curve(const Dataset& dataset, const ClassifierResult& classifier, double threshold,
                            Metric metric, RejectedPolicy policy, const MemberSet* scope, int steps,
                            const WeightVector* weights) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "decision threshold must lie in [0, 1]");
    if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
    if (policy != RejectedPolicy::Exclude && metric != Metric::Accuracy)
        throw Error(ErrorCode::UnsupportedPolicy, "only accuracy supports counting rejected items");

    const detail::SortedScope sorted(dataset, classifier, scope, weights);
    CurveSeries out;
    out.label = classifier.name;
    const double total = sorted.total();
    if (total == 0.0) return out;

    const double max_b = std::max(threshold, 1.0 - threshold);
    for (int k = 0; k < steps; ++k) {
        const double b = steps == 1 ? 0.0 : max_b * k / (steps - 1);
        const auto counts = sorted.counts(OperatingPoint::band(threshold, b));
        const auto value = binary_metric(counts, metric, policy);
        const CurvePoint point{counts.rejected / total, value.value, b, value.undefined};
        // b ascending makes x non-decreasing; equal x keeps the widest band.
        if (!out.points.empty() && out.points.back().x == point.x) out.points.back() = point;
        else out.points.push_back(point);
    }
    return out;
}

std::vector<BandwidthRow> bandwidth_series(const Dataset& dataset, const ClassifierResult& classifier,
                                           std::span<const double> bandwidths, Metric metric, int resolution,
                                           const MemberSet* scope, const WeightVector* weights) {
    require_resolution(resolution);
    if (metric != Metric::Accuracy)
        throw Error(ErrorCode::UnsupportedPolicy,
                    "bandwidth ranges count rejected items as right or wrong, which only accuracy defines");
    for (double b : bandwidths)
        if (!(b >= 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "bandwidths must be >= 0");

    const detail::SortedScope sorted(dataset, classifier, scope, weights);
    std::vector<BandwidthRow> out;
    out.reserve(static_cast<std::size_t>(resolution) + 1);
    for (int i = 0; i <= resolution; ++i) {
        const double t = grid_value(i, resolution);
        BandwidthRow row;
        row.threshold = t;
        row.center = binary_metric(sorted.counts(OperatingPoint{t, t}), metric);
        for (double b : bandwidths) {
            const auto counts = sorted.counts(OperatingPoint::band(t, b));
            row.marks.push_back({b, binary_metric(counts, Metric::Accuracy, RejectedPolicy::AsCorrect),
                                 binary_metric(counts, Metric::Accuracy, RejectedPolicy::AsIncorrect)});
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<HeatmapCell> threshold_grid(const Dataset& dataset, const ClassifierResult& classifier, Metric metric,
                                        int resolution, const MemberSet* scope, const WeightVector* weights) {
    require_resolution(resolution);
    const detail::SortedScope sorted(dataset, classifier, scope, weights);
    const double total = sorted.total();
    std::vector<HeatmapCell> out;
    out.reserve(static_cast<std::size_t>(resolution + 1) * (resolution + 2) / 2);
    for (int i = 0; i <= resolution; ++i) {
        for (int j = i; j <= resolution; ++j) {
            HeatmapCell cell;
            cell.lower = grid_value(i, resolution);
            cell.upper = grid_value(j, resolution);
            const auto counts = sorted.counts(OperatingPoint{cell.lower, cell.upper});
            cell.value = binary_metric(counts, metric);
            cell.coverage = total == 0.0 ? 0.0 : counts.accepted() / total;
            if (total == 0.0) cell.value.undefined = true;
            out.push_back(cell);
        }
    }
    return out;
}

// ------------------------------------------------------------ scatter / histogram

ScatterVariable ScatterVariable::parse(const Dataset& dataset, const std::string& text) {
    if (text.rfind("score:", 0) == 0) {
        dataset.classifier(text.substr(6));
        return {Kind::Score, text.substr(6)};
    }
    if (text.rfind("feature:", 0) == 0) {
        const auto name = text.substr(8);
        if (!dataset.has_feature(name)) throw Error(ErrorCode::UnknownFeature, "unknown feature '" + name + "'", name);
        return {Kind::Feature, name};
    }
    if (dataset.find_classifier(text)) return {Kind::Score, text};
    if (dataset.has_feature(text)) return {Kind::Feature, text};
    throw Error(ErrorCode::UnknownFeature, "'" + text + "' is neither a classifier nor a feature", text);
}

namespace {

class NumericAccessor {
public:
    NumericAccessor(const Dataset& dataset, const ScatterVariable& var) : dataset_(dataset), var_(var) {
        if (var.kind == ScatterVariable::Kind::Score) {
            scores_ = dataset.classifier(var.name).score_view();
        } else {
            if (!dataset.has_feature(var.name))
                throw Error(ErrorCode::UnknownFeature, "unknown feature '" + var.name + "'", var.name);
            if (feature_has_strings(dataset, var.name))
                throw Error(ErrorCode::TypeError, "feature '" + var.name + "' is not numeric", var.name);
        }
    }

    std::optional<double> operator()(std::size_t i) const {
        if (var_.kind == ScatterVariable::Kind::Score) return scores_[i];
        const auto* v = dataset_.feature(i, var_.name);
        if (!v) return std::nullopt;
        return std::get<double>(*v);
    }

    std::pair<double, double> range() const {
        std::optional<std::pair<double, double>> r;
        for (std::size_t i = 0; i < dataset_.size(); ++i) {
            const auto v = (*this)(i);
            if (!v) continue;
            if (!r) r.emplace(*v, *v);
            r->first = std::min(r->first, *v);
            r->second = std::max(r->second, *v);
        }
        return r.value_or(std::pair<double, double>{0.0, 0.0});
    }

private:
    const Dataset& dataset_;
    ScatterVariable var_;
    std::span<const double> scores_;
};

} // namespace

ScatterGrid scatter_bins(const Dataset& dataset, const ScatterVariable& x, const ScatterVariable& y, int nx, int ny,
                         const MemberSet* scope, std::span<const ScatterOverlay> overlays) {
    if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "scatter resolution must be >= 1 in both axes");
    const NumericAccessor ax(dataset, x);
    const NumericAccessor ay(dataset, y);

    ScatterGrid grid;
    grid.nx = nx;
    grid.ny = ny;
    std::tie(grid.x_lo, grid.x_hi) = ax.range();
    std::tie(grid.y_lo, grid.y_hi) = ay.range();
    grid.counts.assign(static_cast<std::size_t>(nx) * ny, 0);
    const BinSpec bx{nx, grid.x_lo, grid.x_hi};
    const BinSpec by{ny, grid.y_lo, grid.y_hi};

    for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) {
        const auto vx = ax(i);
        const auto vy = ay(i);
        if (!vx || !vy) return;
        ++grid.counts[static_cast<std::size_t>(by.index_of(*vy)) * nx + bx.index_of(*vx)];
        ++grid.total;
    });

    for (const auto& overlay : overlays) {
        if (!overlay.members) continue;
        overlay.members->for_each([&](std::uint32_t i) {
            if (scope && !scope->contains(i)) return;
            const auto vx = ax(i);
            const auto vy = ay(i);
            if (!vx || !vy) return;
            grid.overlay.push_back({overlay.selection, dataset.instance(i).id, *vx, *vy});
        });
    }
    return grid;
}

FeatureHistogram feature_histogram(const Dataset& dataset, const std::string& feature, int bins,
                                   const MemberSet* scope, std::span<const ScatterOverlay> overlays) {
    if (!dataset.has_feature(feature))
        throw Error(ErrorCode::UnknownFeature, "unknown feature '" + feature + "'", feature);
    FeatureHistogram out;
    out.feature = feature;
    out.categorical = feature_has_strings(dataset, feature);

    auto tally = [&](auto&& bar_of) {
        for_each_in_scope(dataset.size(), scope, [&](std::uint32_t i) {
            const auto* v = dataset.feature(i, feature);
            if (!v) return;
            const auto k = bar_of(*v);
            auto& bar = out.bars[k];
            ++bar.count;
            for (std::size_t o = 0; o < overlays.size(); ++o)
                if (overlays[o].members && overlays[o].members->contains(i)) ++bar.overlap[o];
        });
    };

    if (!out.categorical) {
        const auto range = numeric_feature_range(dataset, feature).value_or(std::pair<double, double>{0.0, 0.0});
        const auto spec = BinSpec::make(bins, range.first, range.second);
        for (int k = 0; k < spec.count; ++k) {
            HistogramBar bar;
            const double lo = spec.lower_edge(k);
            const double hi = spec.upper_edge(k);
            bar.label = "[" + format_number(lo) + ", " + format_number(hi) + (k + 1 == spec.count ? "]" : ")");
            bar.predicate = FeatureRangePredicate{feature, lo, hi, k, spec.count};
            bar.overlap.assign(overlays.size(), 0);
            out.bars.push_back(std::move(bar));
        }
        tally([&](const FeatureValue& v) { return static_cast<std::size_t>(spec.index_of(std::get<double>(v))); });
        return out;
    }

    auto key_of = [](const FeatureValue& v) {
        if (const auto* s = std::get_if<std::string>(&v)) return *s;
        return format_number(std::get<double>(v));
    };
    std::map<std::string, std::pair<std::size_t, FeatureValue>> categories;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto* v = dataset.feature(i, feature);
        if (!v) continue;
        auto [it, inserted] = categories.try_emplace(key_of(*v), 0, *v);
        ++it->second.first;
    }
    std::vector<std::pair<std::string, std::pair<std::size_t, FeatureValue>>> ordered(categories.begin(),
                                                                                     categories.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.second.first > b.second.first; });
    std::map<std::string, std::size_t> position;
    for (auto& [key, entry] : ordered) {
        HistogramBar bar;
        bar.label = key;
        bar.predicate = FeatureEqualsPredicate{feature, entry.second};
        bar.overlap.assign(overlays.size(), 0);
        position.emplace(key, out.bars.size());
        out.bars.push_back(std::move(bar));
    }
    tally([&](const FeatureValue& v) { return position.at(key_of(v)); });
    return out;
}

} // namespace cbx
