#include "cbx/error.hpp"
#include "cbx/trinary.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cbx;

TEST(Classify, DecisionRuleBoundaries) {
    EXPECT_EQ(classify(0.7, Label::Positive, {0.5, 0.5}), Outcome::TP);
    EXPECT_EQ(classify(0.5, Label::Positive, {0.4, 0.6}), Outcome::Rejected);
    EXPECT_EQ(classify(0.4, Label::Negative, {0.4, 0.6}), Outcome::Rejected);
    EXPECT_EQ(classify(0.6, Label::Negative, {0.4, 0.6}), Outcome::FP);
    EXPECT_EQ(classify(0.39, Label::Positive, {0.4, 0.6}), Outcome::FN);
    EXPECT_EQ(classify(0.5, Label::Negative, {0.5, 0.5}), Outcome::FP);
    EXPECT_EQ(classify(0.49, Label::Negative, {0.5, 0.5}), Outcome::TN);
}

TEST(OperatingPoint, ValidationAndAccessors) {
    EXPECT_THROW(OperatingPoint::make(0.6, 0.4), Error);
    EXPECT_THROW(OperatingPoint::make(-0.1, 0.4), Error);
    EXPECT_THROW(OperatingPoint::make(0.1, 1.1), Error);
    const auto op = OperatingPoint::make(0.2, 0.6);
    EXPECT_DOUBLE_EQ(op.bandwidth(), 0.2);
    EXPECT_DOUBLE_EQ(op.center(), 0.4);
    EXPECT_TRUE(OperatingPoint::make(0.3, 0.3).is_binary());
    const auto clamped = OperatingPoint::band(0.9, 0.3);
    EXPECT_EQ(clamped.upper, 1.0);
    EXPECT_DOUBLE_EQ(clamped.lower, 0.6);
}

TEST(TrinarySummary, RunningExample) {
    const auto ds = fixtures::running_example();
    const auto& lr = ds.classifier("LR");
    EXPECT_EQ(trinary_summary(ds, lr, {0.5, 0.5}), (TrinaryCounts{1, 1, 1, 1, 0}));
    EXPECT_EQ(trinary_summary(ds, lr, {0.2, 0.85}), (TrinaryCounts{1, 0, 0, 1, 2}));
    MemberSet none(ds.size());
    EXPECT_EQ(trinary_summary(ds, lr, {0.5, 0.5}, &none), TrinaryCounts{});
}

TEST(TrinarySummary, WeightsAndScope) {
    const auto ds = fixtures::running_example();
    const auto& lr = ds.classifier("LR");
    const WeightVector w(std::vector<double>{2.0, 1.0, 1.0, 1.0});
    const auto c = trinary_summary(ds, lr, {0.5, 0.5}, nullptr, &w);
    EXPECT_EQ(c.tp, 2.0);
    EXPECT_EQ(c.total(), 5.0);
    const auto scope = MemberSet::from_indices(4, {0, 3});
    EXPECT_EQ(trinary_summary(ds, lr, {0.5, 0.5}, &scope), (TrinaryCounts{1, 0, 0, 1, 0}));
}

TEST(TrinarySummary, BinaryPointNeverRejects) {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<int> t(0, 20);
    for (int k = 0; k < 200; ++k) {
        const auto ds = fixtures::random_dataset(gen);
        const double th = t(gen) / 20.0;
        EXPECT_EQ(trinary_summary(ds, ds.classifier("C0"), {th, th}).rejected, 0.0);
    }
}

TEST(TrinarySummary, MonotoneTransformPreservesOutcomes) {
    std::mt19937_64 gen(9);
    std::uniform_int_distribution<int> t(0, 20);
    auto f = [](double s) { return s * s * s; };  // strictly increasing on [0, 1]
    for (int k = 0; k < 200; ++k) {
        const auto ds = fixtures::random_dataset(gen);
        const auto s = fixtures::scores_of(ds, "C0");
        std::vector<double> g;
        for (double v : s) g.push_back(f(v));
        const auto moved = fixtures::make_dataset(fixtures::labels_of(ds), {{"C0", g}});
        double l = t(gen) / 20.0, u = t(gen) / 20.0;
        if (l > u) std::swap(l, u);
        EXPECT_EQ(trinary_summary(ds, ds.classifier("C0"), {l, u}),
                  trinary_summary(moved, moved.classifier("C0"), {f(l), f(u)}));
    }
}

TEST(DeriveClassifier, FrozenPointAndConflicts) {
    auto ds = fixtures::make_dataset({1, 0, 0, 1}, {{"LR", {0.9, 0.8, 0.3, 0.1}}, {"RF", {0.45, 0.55, 0.2, 0.7}}});
    OperatingPointTable points;

    ds.add_classifier(derive_classifier(ds, ds.classifier("LR"), {0.5, 0.5}, "LR@.5"));
    const auto before = trinary_summary(ds, ds.classifier("LR@.5"), points.point_for(ds.classifier("LR@.5")));
    points.set("LR", OperatingPoint::make(0.0, 1.0));
    EXPECT_EQ(trinary_summary(ds, ds.classifier("LR@.5"), points.point_for(ds.classifier("LR@.5"))), before);
    EXPECT_EQ(points.point_for(ds.classifier("LR")), OperatingPoint::make(0.0, 1.0));

    EXPECT_THROW(derive_classifier(ds, ds.classifier("LR"), {0.4, 0.6}, "LR@.5"), Error);
    EXPECT_THROW(derive_classifier(ds, ds.classifier("LR"), {0.4, 0.6}, "RF"), Error);

    const OperatingPoint band{0.4, 0.6};
    ds.add_classifier(derive_classifier(ds, ds.classifier("RF"), band, "RF-band"));
    const auto& d = ds.classifier("RF-band");
    EXPECT_EQ(d.kind, ClassifierKind::Derived);
    EXPECT_EQ(d.base, "RF");
    EXPECT_EQ(trinary_summary(ds, d, points.point_for(d)), trinary_summary(ds, ds.classifier("RF"), band));

    ds.add_classifier(derive_classifier(ds, d, {0.1, 0.2}, "RF-again"));
    EXPECT_EQ(ds.classifier("RF-again").base, "RF");
}

TEST(OperatingPointTable, VersionsAndEpoch) {
    OperatingPointTable t;
    EXPECT_EQ(t.version("LR"), 0u);
    const auto e0 = t.epoch();
    EXPECT_EQ(t.set("LR", {0.3, 0.7}), 1u);
    EXPECT_EQ(t.set("LR", {0.4, 0.7}), 2u);
    EXPECT_EQ(t.set("RF", {0.4, 0.7}), 1u);
    EXPECT_GT(t.epoch(), e0);
    EXPECT_EQ(t.entry("LR")->point, OperatingPoint::make(0.4, 0.7));
    EXPECT_THROW(t.set("LR", {0.8, 0.7}), Error);
    EXPECT_EQ(t.version("LR"), 2u);
}
