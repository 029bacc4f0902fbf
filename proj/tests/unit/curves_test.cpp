#include "cbx/binning.hpp"
#include "cbx/curves.hpp"
#include "cbx/error.hpp"
#include "cbx/selection.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace cbx;

namespace {

const CurvePoint* point_at_x(const CurveSeries& s, double x) {
    for (const auto& p : s.points)
        if (p.x == x) return &p;
    return nullptr;
}

} // namespace

TEST(Roc, SeparatedAndFlat) {
    const auto ds = fixtures::make_dataset({1, 1, 0, 0}, {{"Sep", {0.9, 0.8, 0.1, 0.2}}, {"Flat", {0.5, 0.5, 0.5, 0.5}}});
    const auto sep = roc_curve(ds, ds.classifier("Sep"));
    EXPECT_TRUE(std::any_of(sep.points.begin(), sep.points.end(), [](const auto& p) { return p.x == 0.0 && p.y == 1.0; }));
    const auto flat = roc_curve(ds, ds.classifier("Flat"));
    ASSERT_EQ(flat.points.size(), 2u);
    EXPECT_EQ(flat.points[0].x, 0.0);
    EXPECT_EQ(flat.points[1].x, 1.0);
    EXPECT_EQ(flat.points[1].y, 1.0);
    EXPECT_EQ(trapezoid_area(flat), 0.5);
}

TEST(Roc, WorkedAreaAndEndpoints) {
    const auto ds = fixtures::make_dataset({1, 1, 0, 0}, {{"M", {0.35, 0.8, 0.1, 0.4}}});
    const auto roc = roc_curve(ds, ds.classifier("M"));
    EXPECT_EQ(trapezoid_area(roc), 0.75);
    EXPECT_EQ(roc.points.front().x, 0.0);
    EXPECT_EQ(roc.points.front().y, 0.0);
    EXPECT_FALSE(roc.points.front().param);
    EXPECT_EQ(roc.points.back().x, 1.0);
    EXPECT_EQ(roc.points.back().y, 1.0);
    EXPECT_EQ(roc.points.size(), 5u);  // origin + 4 distinct scores
}

TEST(Roc, SingleClassIsUndefined) {
    const auto ds = fixtures::make_dataset({1, 1}, {{"M", {0.3, 0.4}}});
    try {
        roc_curve(ds, ds.classifier("M"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UndefinedCurve);
    }
}

TEST(Roc, BruteForcePointsAreMonotoneAndIntegrateToAuc) {
    std::mt19937_64 gen(31);
    for (int k = 0; k < 500; ++k) {
        const auto ds = fixtures::random_dataset(gen);
        const auto s = fixtures::scores_of(ds, "C0");
        const auto y = fixtures::labels_of(ds);
        const auto [num, den] = fixtures::oracle_auc_pairs(s, y);
        if (den == 0) continue;
        const auto roc = roc_curve(ds, ds.classifier("C0"));
        std::set<double> distinct(s.begin(), s.end());
        ASSERT_EQ(roc.points.size(), distinct.size() + 1);
        for (std::size_t p = 1; p < roc.points.size(); ++p) {
            const double t = *roc.points[p].param;
            const auto tally = fixtures::oracle_tally(s, y, t, t);
            EXPECT_EQ(roc.points[p].x, tally.fp / (tally.fp + tally.tn));
            EXPECT_EQ(roc.points[p].y, tally.tp / (tally.tp + tally.fn));
            EXPECT_GE(roc.points[p].x, roc.points[p - 1].x);
            EXPECT_GE(roc.points[p].y, roc.points[p - 1].y);
        }
        EXPECT_NEAR(trapezoid_area(roc), static_cast<double>(num) / static_cast<double>(den), 1e-12);
    }
}

TEST(Pr, WorkedExample) {
    const auto ds = fixtures::make_dataset({1, 1, 0, 0}, {{"M", {0.35, 0.8, 0.1, 0.4}}});
    const auto pr = pr_curve(ds, ds.classifier("M"));
    bool found = false;
    for (const auto& p : pr.points)
        if (p.param && *p.param == 0.35) {
            found = true;
            EXPECT_EQ(p.x, 1.0);
            EXPECT_EQ(p.y, 2.0 / 3.0);
        }
    EXPECT_TRUE(found);
    EXPECT_TRUE(pr.points.front().undefined);
    EXPECT_EQ(pr.points.front().y, pr.points[1].y);
    const auto& last = pr.points.back();
    EXPECT_EQ(last.x, 1.0);
    EXPECT_EQ(last.y, 0.5);  // base rate
}

TEST(Pr, PerfectClassifierKeepsPrecisionOne) {
    const auto ds = fixtures::make_dataset({1, 1, 0, 0}, {{"Sep", {0.9, 0.8, 0.1, 0.2}}});
    for (const auto& p : pr_curve(ds, ds.classifier("Sep")).points)
        if (p.x < 1.0 || (p.param && *p.param >= 0.8)) EXPECT_EQ(p.y, 1.0);
}

TEST(Pr, RecallIsMonotone) {
    std::mt19937_64 gen(32);
    for (int k = 0; k < 200; ++k) {
        const auto ds = fixtures::random_dataset(gen);
        if (ds.positive_count() == 0 || ds.positive_count() == ds.size()) continue;
        const auto pr = pr_curve(ds, ds.classifier("C0"));
        for (std::size_t p = 1; p < pr.points.size(); ++p) EXPECT_GE(pr.points[p].x, pr.points[p - 1].x);
    }
}

TEST(Binning, EdgesAndTopBin) {
    const BinSpec ten;
    EXPECT_EQ(ten.index_of(0.0), 0);
    EXPECT_EQ(ten.index_of(0.1), 1);
    EXPECT_EQ(ten.index_of(0.99), 9);
    EXPECT_EQ(ten.index_of(1.0), 9);
    EXPECT_EQ(ten.index_of(0.35), 3);
    EXPECT_THROW(BinSpec::make(0), Error);
}

TEST(Reliability, SixItemExample) {
    const auto ds = fixtures::make_dataset({0, 0, 1, 1, 1, 0}, {{"M", {0.05, 0.15, 0.95, 0.85, 0.55, 0.45}}});
    const auto bins = reliability_curve(ds, ds.classifier("M"), BinSpec{}, ReliabilityMode::FractionPositive);
    ASSERT_EQ(bins.size(), 10u);
    EXPECT_EQ(bins[0].value, 0.0);
    EXPECT_EQ(bins[1].value, 0.0);
    EXPECT_EQ(bins[8].value, 1.0);
    EXPECT_EQ(bins[9].value, 1.0);
    EXPECT_EQ(bins[4].value, 0.0);
    EXPECT_EQ(bins[5].value, 1.0);
    EXPECT_TRUE(bins[2].undefined);
    EXPECT_EQ(bins[2].count, 0u);
    EXPECT_DOUBLE_EQ(bins[9].mean_score, 0.95);
}

TEST(Reliability, PercentCorrectExcludesRejected) {
    const auto ds = fixtures::make_dataset({1, 0, 1, 0}, {{"M", {0.42, 0.44, 0.46, 0.48}}});
    const auto bins = reliability_curve(ds, ds.classifier("M"), BinSpec{}, ReliabilityMode::PercentCorrect, nullptr,
                                        OperatingPoint::make(0.43, 0.47));
    // 0.42 pos -> FN, 0.44/0.46 rejected, 0.48 neg -> FP: 0 of 2 accepted correct.
    EXPECT_EQ(bins[4].count, 4u);
    EXPECT_EQ(bins[4].value, 0.0);
    EXPECT_FALSE(bins[4].undefined);
    EXPECT_THROW(reliability_curve(ds, ds.classifier("M"), BinSpec{}, ReliabilityMode::PercentCorrect), Error);
}

TEST(PerfConf, RunningExampleBins) {
    const auto ds = fixtures::running_example();
    const auto h = perf_conf_histogram(ds, ds.classifier("LR"), {0.5, 0.5}, BinSpec{});
    EXPECT_EQ(h[9].counts, (TrinaryCounts{1, 0, 0, 0, 0}));
    EXPECT_EQ(h[8].counts, (TrinaryCounts{0, 1, 0, 0, 0}));
    EXPECT_EQ(h[3].counts, (TrinaryCounts{0, 0, 1, 0, 0}));
    EXPECT_EQ(h[1].counts, (TrinaryCounts{0, 0, 0, 1, 0}));
    double total = 0;
    for (const auto& b : h) total += b.counts.total();
    EXPECT_EQ(total, 4.0);
    const MemberSet none(4);
    for (const auto& b : perf_conf_histogram(ds, ds.classifier("LR"), {0.5, 0.5}, BinSpec{}, &none))
        EXPECT_EQ(b.counts.total(), 0.0);
}

TEST(PerfConf, AllOnesLandInLastBin) {
    const auto ds = fixtures::make_dataset({1, 1, 1}, {{"M", {1.0, 1.0, 1.0}}});
    const auto h = perf_conf_histogram(ds, ds.classifier("M"), {0.5, 0.5}, BinSpec{});
    EXPECT_EQ(h[9].counts.tp, 3.0);
    for (int k = 0; k < 9; ++k) EXPECT_EQ(h[k].counts.total(), 0.0);
}

TEST(PerfConf, CellsMatchSelections) {
    std::mt19937_64 gen(41);
    std::uniform_int_distribution<int> grid(0, 20);
    for (int k = 0; k < 100; ++k) {
        const auto ds = fixtures::random_dataset(gen);
        OperatingPointTable points;
        double l = grid(gen) / 20.0, u = grid(gen) / 20.0;
        if (l > u) std::swap(l, u);
        points.set("C0", OperatingPoint::make(l, u));
        const auto& c = ds.classifier("C0");
        const auto h = perf_conf_histogram(ds, c, points.point_for(c), BinSpec{});
        for (int b = 0; b < 10; ++b)
            for (auto o : kOutcomes) {
                const auto e = SelectionExpr::intersection_of(
                    {SelectionExpr::leaf(ScoreRangePredicate{"C0", 0, 0, b, 10}), SelectionExpr::leaf(OutcomePredicate{"C0", o})});
                EXPECT_EQ(static_cast<double>(evaluate(e, ds, points).count()), h[b].counts[o]);
            }
    }
}

TEST(RejectionCurve, RunningExample) {
    const auto ds = fixtures::running_example();
    const auto arc = rejection_curve(ds, ds.classifier("LR"), 0.5, Metric::Accuracy);
    ASSERT_FALSE(arc.points.empty());
    EXPECT_EQ(arc.points.front().x, 0.0);
    EXPECT_EQ(arc.points.front().y, 0.5);
    const auto* half = point_at_x(arc, 0.5);
    ASSERT_NE(half, nullptr);
    EXPECT_EQ(half->y, 0.5);
    for (std::size_t p = 1; p < arc.points.size(); ++p) EXPECT_GT(arc.points[p].x, arc.points[p - 1].x);

    const auto direct = binary_metric(confusion(ds, ds.classifier("LR"), OperatingPoint::band(0.5, 0.35)), Metric::Accuracy);
    EXPECT_EQ(direct.value, 0.5);
    EXPECT_EQ(confusion(ds, ds.classifier("LR"), OperatingPoint::band(0.5, 0.35)).rejected, 2.0);
}

TEST(RejectionCurve, MccStartsAtZeroForTheRunningExample) {
    const auto ds = fixtures::running_example();
    const auto arc = rejection_curve(ds, ds.classifier("LR"), 0.5, Metric::MCC);
    EXPECT_EQ(arc.points.front().x, 0.0);
    EXPECT_EQ(arc.points.front().y, 0.0);
    EXPECT_FALSE(arc.points.front().undefined);
}

TEST(RejectionCurve, PerfectScoresStayPerfect) {
    const auto ds = fixtures::make_dataset({1, 0, 1, 0, 1}, {{"M", {1.0, 0.0, 1.0, 0.0, 1.0}}});
    for (const auto& p : rejection_curve(ds, ds.classifier("M"), 0.5, Metric::Accuracy).points)
        if (!p.undefined) EXPECT_EQ(p.y, 1.0);
}

TEST(RejectionCurve, ErrorsAndEmptyScope) {
    const auto ds = fixtures::running_example();
    EXPECT_THROW(rejection_curve(ds, ds.classifier("LR"), 1.5, Metric::Accuracy), Error);
    EXPECT_THROW(rejection_curve(ds, ds.classifier("LR"), 0.5, Metric::F1, RejectedPolicy::AsCorrect), Error);
    const MemberSet none(4);
    EXPECT_TRUE(rejection_curve(ds, ds.classifier("LR"), 0.5, Metric::Accuracy, RejectedPolicy::Exclude, &none).points.empty());
}

TEST(Bandwidth, RunningExampleMarks) {
    const auto ds = fixtures::running_example();
    const std::vector<double> bw{0.0, 0.35, 0.5};
    const auto rows = bandwidth_series(ds, ds.classifier("LR"), bw);
    ASSERT_EQ(rows.size(), 21u);
    const auto& mid = rows[10];
    EXPECT_EQ(mid.threshold, 0.5);
    EXPECT_EQ(mid.center.value, 0.5);
    EXPECT_EQ(mid.marks[0].upper, mid.center);
    EXPECT_EQ(mid.marks[0].lower, mid.center);
    EXPECT_EQ(mid.marks[1].upper.value, 0.75);
    EXPECT_EQ(mid.marks[1].lower.value, 0.25);
    EXPECT_EQ(mid.marks[2].upper.value, 1.0);
    EXPECT_EQ(mid.marks[2].lower.value, 0.0);
    EXPECT_THROW(bandwidth_series(ds, ds.classifier("LR"), bw, Metric::F1), Error);
}

TEST(Heatmap, RunningExampleCell) {
    const auto ds = fixtures::running_example();
    const auto cells = threshold_grid(ds, ds.classifier("LR"), Metric::Accuracy);
    EXPECT_EQ(cells.size(), 21u * 22u / 2u);
    bool found = false;
    for (const auto& c : cells) {
        EXPECT_LE(c.lower, c.upper);
        if (c.lower == 0.2 && c.upper == 0.85) {
            found = true;
            EXPECT_EQ(c.value.value, 0.5);
            EXPECT_EQ(c.coverage, 0.5);
        }
        if (c.lower == c.upper) EXPECT_EQ(c.coverage, 1.0);
        if (c.lower == 0.0 && c.upper == 1.0) EXPECT_EQ(c.coverage, 0.0);
    }
    EXPECT_TRUE(found);
}

TEST(Heatmap, DiagonalMatchesBandwidthCenters) {
    std::mt19937_64 gen(51);
    const std::vector<double> bw{0.05, 0.1, 0.25};
    for (int k = 0; k < 100; ++k) {
        const auto ds = fixtures::random_dataset(gen);
        const auto& c = ds.classifier("C0");
        const auto cells = threshold_grid(ds, c, Metric::Accuracy, 20);
        const auto rows = bandwidth_series(ds, c, bw, Metric::Accuracy, 20);
        for (const auto& cell : cells) {
            if (cell.lower != cell.upper) continue;
            const auto& row = rows[static_cast<std::size_t>(std::lround(cell.lower * 20))];
            EXPECT_EQ(row.threshold, cell.lower);
            EXPECT_EQ(row.center, cell.value);
        }
        for (const auto& row : rows)
            for (const auto& m : row.marks) {
                EXPECT_GE(m.upper.value, row.center.value);
                EXPECT_LE(m.lower.value, row.center.value);
            }
    }
}

TEST(Scatter, PlacementAndTotals) {
    const auto ds = fixtures::make_dataset({0, 1, 0}, {{"A", {0.0, 1.0, 0.0}}, {"B", {0.0, 0.0, 1.0}}});
    const auto grid = scatter_bins(ds, ScatterVariable::parse(ds, "A"), ScatterVariable::parse(ds, "score:B"), 2, 2);
    EXPECT_EQ(grid.counts, (std::vector<std::size_t>{1, 1, 1, 0}));
    EXPECT_EQ(grid.total, 3u);
    const auto one = scatter_bins(ds, ScatterVariable::parse(ds, "A"), ScatterVariable::parse(ds, "B"), 1, 1);
    EXPECT_EQ(one.counts, (std::vector<std::size_t>{3}));
    const MemberSet none(3);
    const auto empty = scatter_bins(ds, ScatterVariable::parse(ds, "A"), ScatterVariable::parse(ds, "B"), 2, 2, &none);
    EXPECT_EQ(empty.total, 0u);

    const auto sel = MemberSet::from_indices(3, {1});
    const std::vector<ScatterOverlay> overlays{{"s1", &sel}};
    const auto with = scatter_bins(ds, ScatterVariable::parse(ds, "A"), ScatterVariable::parse(ds, "B"), 2, 2, nullptr, overlays);
    ASSERT_EQ(with.overlay.size(), 1u);
    EXPECT_EQ(with.overlay[0].x, 1.0);
    EXPECT_EQ(with.overlay[0].id, fixtures::item_id(1));
}

TEST(Scatter, StringFeatureIsATypeError) {
    const auto ds = fixtures::make_dataset({0, 1}, {{"A", {0.1, 0.2}}}, {{{"g", std::string("m")}}, {{"g", std::string("f")}}});
    try {
        scatter_bins(ds, ScatterVariable::parse(ds, "feature:g"), ScatterVariable::parse(ds, "A"), 2, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TypeError);
    }
}

TEST(FeatureHistogram, CategoricalAndNumeric) {
    std::vector<FeatureMap> f;
    for (int i = 0; i < 10; ++i) f.push_back({{"sex", std::string(i < 6 ? "M" : "F")}, {"len", i < 4 ? std::vector<double>{1, 2, 3, 10}[i] : 2.0}});
    std::vector<int> labels(10, 0);
    labels[0] = 1;
    const auto ds = fixtures::make_dataset(labels, {{"A", std::vector<double>(10, 0.5)}}, f);

    const auto cat = feature_histogram(ds, "sex");
    EXPECT_TRUE(cat.categorical);
    ASSERT_EQ(cat.bars.size(), 2u);
    EXPECT_EQ(cat.bars[0].label, "M");
    EXPECT_EQ(cat.bars[0].count, 6u);
    EXPECT_EQ(cat.bars[1].count, 4u);

    const auto first_four = MemberSet::from_indices(10, {0, 1, 2, 3});
    const auto num = feature_histogram(ds, "len", 3, &first_four);
    EXPECT_FALSE(num.categorical);
    ASSERT_EQ(num.bars.size(), 3u);
    EXPECT_EQ(num.bars[0].count, 3u);
    EXPECT_EQ(num.bars[1].count, 0u);
    EXPECT_EQ(num.bars[2].count, 1u);

    OperatingPointTable points;
    for (const auto& bar : feature_histogram(ds, "len", 3).bars)
        EXPECT_EQ(evaluate(SelectionExpr::leaf(bar.predicate), ds, points).count(), bar.count);
    for (const auto& bar : cat.bars)
        EXPECT_EQ(evaluate(SelectionExpr::leaf(bar.predicate), ds, points).count(), bar.count);

    const MemberSet none(10);
    for (const auto& bar : feature_histogram(ds, "sex", 10, &none).bars) EXPECT_EQ(bar.count, 0u);
    EXPECT_THROW(feature_histogram(ds, "nope"), Error);
}
