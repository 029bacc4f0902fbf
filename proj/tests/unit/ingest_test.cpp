#include "cbx/error.hpp"
#include "cbx/ingest.hpp"
#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cbx;

namespace {

const char* kMinimal = R"({"classes":["neg","pos"],
  "instances":[{"id":"a","label":"neg","features":{}},{"id":"b","label":"pos","features":{}}],
  "classifiers":[{"name":"LR","scores":{"a":0.2,"b":0.9}}]})";

bool has_error_for(const ValidationReport& r, const std::string& code, const std::string& id) {
    for (const auto& e : r.errors)
        if (e.code == code && e.offending_id == id) return true;
    return false;
}

} // namespace

TEST(Ingest, MinimalPayloadAccepted) {
    const auto r = load_dataset(kMinimal);
    ASSERT_TRUE(r.report.ok());
    ASSERT_TRUE(r.dataset);
    EXPECT_EQ(r.dataset->size(), 2u);
    EXPECT_EQ(r.report.instances, 2u);
    EXPECT_EQ(r.report.classifiers, 1u);
    EXPECT_EQ(r.report.positives, 1u);
    EXPECT_EQ(r.report.negatives, 1u);
    EXPECT_EQ(r.dataset->classes().positive, "pos");
}

TEST(Ingest, MissingScoreNamesTheId) {
    const auto r = load_dataset(R"({"classes":["neg","pos"],
      "instances":[{"id":"a","label":"neg"},{"id":"b","label":"pos"}],
      "classifiers":[{"name":"LR","scores":{"a":0.2}}]})");
    EXPECT_FALSE(r.report.ok());
    EXPECT_FALSE(r.dataset);
    EXPECT_TRUE(has_error_for(r.report, "MISSING_SCORE", "b"));
}

TEST(Ingest, NormalizeMapsMinMaxToUnitInterval) {
    const auto payload = R"({"classes":["neg","pos"],
      "instances":[{"id":"a","label":"neg"},{"id":"b","label":"pos"}],
      "classifiers":[{"name":"LR","scores":{"a":-2,"b":6}}]})";
    const auto rejected = load_dataset(payload);
    EXPECT_TRUE(rejected.report.has_error("SCORE_OUT_OF_RANGE"));

    LoadOptions opts;
    opts.normalize = true;
    const auto r = load_dataset(payload, IngestFormat::Auto, opts);
    ASSERT_TRUE(r.report.ok());
    EXPECT_TRUE(r.report.has_warning("SCORES_NORMALIZED"));
    EXPECT_TRUE(r.report.scores_normalized);
    const auto& lr = r.dataset->classifier("LR");
    EXPECT_EQ(lr.score(0), (-2.0 - -2.0) / (6.0 - -2.0));
    EXPECT_EQ(lr.score(1), 1.0);
    EXPECT_EQ(lr.raw_score(0), -2.0);
    EXPECT_EQ(lr.raw_score(1), 6.0);
}

TEST(Ingest, NormalizeLeavesInRangeClassifiersAlone) {
    const auto payload = R"({"classes":["neg","pos"],
      "instances":[{"id":"a","label":"neg"},{"id":"b","label":"pos"}],
      "classifiers":[{"name":"A","scores":{"a":0.3,"b":0.6}},{"name":"B","scores":{"a":3,"b":5}}]})";
    LoadOptions opts;
    opts.normalize = true;
    const auto r = load_dataset(payload, IngestFormat::Json, opts);
    ASSERT_TRUE(r.report.ok());
    EXPECT_EQ(r.dataset->classifier("A").score(0), 0.3);
    EXPECT_FALSE(r.dataset->classifier("A").normalization);
    EXPECT_EQ(r.dataset->classifier("B").score(0), 0.0);
}

TEST(Ingest, ConstantScoresNormalizeToHalf) {
    LoadOptions opts;
    opts.normalize = true;
    const auto r = load_dataset(R"({"classes":["neg","pos"],
      "instances":[{"id":"a","label":"neg"},{"id":"b","label":"pos"}],
      "classifiers":[{"name":"K","scores":{"a":7,"b":7}}]})",
                                IngestFormat::Json, opts);
    ASSERT_TRUE(r.report.ok());
    EXPECT_TRUE(r.report.has_warning("CONSTANT_SCORES"));
    EXPECT_EQ(r.dataset->classifier("K").score(0), 0.5);
    EXPECT_EQ(r.dataset->classifier("K").score(1), 0.5);
}

TEST(Ingest, SemanticErrorsAreReported) {
    const auto r = load_dataset(R"({"classes":["neg","pos"],
      "instances":[{"id":"a","label":"neg"},{"id":"a","label":"pos"},{"id":"c","label":"maybe"}],
      "classifiers":[{"name":"LR","scores":{"a":0.2,"c":0.4,"zz":0.1}}]})");
    EXPECT_TRUE(r.report.has_error("DUPLICATE_ID"));
    EXPECT_TRUE(has_error_for(r.report, "NON_BINARY_LABEL", "c"));
    EXPECT_TRUE(has_error_for(r.report, "UNKNOWN_SCORE_ID", "zz"));
}

TEST(Ingest, NeedsTwoInstancesAndAClassifier) {
    EXPECT_TRUE(load_dataset(R"({"classes":["n","p"],"instances":[{"id":"a","label":"n"}],
      "classifiers":[{"name":"LR","scores":{"a":0.2}}]})")
                    .report.has_error("TOO_FEW_INSTANCES"));
    EXPECT_TRUE(load_dataset(R"({"classes":["n","p"],"instances":[{"id":"a","label":"n"},{"id":"b","label":"p"}],
      "classifiers":[]})")
                    .report.has_error("NO_CLASSIFIERS"));
}

TEST(Ingest, SingleClassIsAWarningOnly) {
    const auto r = load_dataset(R"({"classes":["n","p"],"instances":[{"id":"a","label":"n"},{"id":"b","label":"n"}],
      "classifiers":[{"name":"LR","scores":{"a":0.2,"b":0.3}}]})");
    EXPECT_TRUE(r.report.ok());
    EXPECT_TRUE(r.report.has_warning("SINGLE_CLASS"));
}

TEST(Ingest, MalformedJsonIsAParseError) {
    try {
        load_dataset(R"({"classes":["n","p"], "instances": [)", IngestFormat::Json);
        FAIL() << "expected a parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
    try {
        load_dataset(R"({"classes":["n","p"],"instances":[{"id":"a","label":"n","features":{"f":[1]}}],"classifiers":[]})",
                     IngestFormat::Json);
        FAIL() << "expected a parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("features"), std::string::npos) << e.what();
    }
}

TEST(Ingest, CsvWithFeaturesAndScores) {
    const std::string csv =
        "id,label,age,group,score:LR,score:RF\n"
        "b,yes,41,\"x, y\",0.9,0.7\n"
        "a,no,,z,0.2,0.1\n";
    LoadOptions opts;
    opts.classes = ClassNames{"no", "yes"};
    const auto r = load_dataset(csv, IngestFormat::Auto, opts);
    ASSERT_TRUE(r.report.ok()) << r.report.errors[0].message;
    const auto& ds = *r.dataset;
    EXPECT_EQ(ds.instance(0).id, "a");
    EXPECT_EQ(ds.feature(0, "age"), nullptr);
    EXPECT_EQ(std::get<double>(*ds.feature(1, "age")), 41.0);
    EXPECT_EQ(std::get<std::string>(*ds.feature(1, "group")), "x, y");
    EXPECT_EQ(ds.classifier("RF").score(1), 0.7);
    EXPECT_EQ(ds.label(1), Label::Positive);
}

TEST(Ingest, CsvBadScoreNamesLineAndField) {
    try {
        load_dataset("id,label,score:LR\na,n,0.1\nb,p,abc\n", IngestFormat::Csv);
        FAIL() << "expected a parse error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
        EXPECT_NE(msg.find("score:LR"), std::string::npos) << msg;
    }
}

TEST(Ingest, CsvInfersClassesWithWarning) {
    const auto r = load_dataset("id,label,score:LR\na,neg,0.1\nb,pos,0.8\n", IngestFormat::Csv);
    ASSERT_TRUE(r.report.ok());
    EXPECT_TRUE(r.report.has_warning("CLASSES_INFERRED"));
    EXPECT_EQ(r.dataset->classes().positive, "pos");
}

TEST(Ingest, SerializeRoundTripsRandomDatasets) {
    std::mt19937_64 gen(11);
    for (int k = 0; k < 200; ++k) {
        const auto ds = fixtures::random_dataset(gen, 12, 2, true);
        const auto again = load_dataset(serialize_dataset(ds), IngestFormat::Json);
        ASSERT_TRUE(again.report.ok());
        EXPECT_EQ(*again.dataset, ds);
    }
}

TEST(Ingest, SerializeRoundTripsNormalizationAndProvenance) {
    LoadOptions opts;
    opts.normalize = true;
    opts.provenance = "notebook dump";
    const auto r = load_dataset(R"({"classes":["neg","pos"],
      "instances":[{"id":"a","label":"neg"},{"id":"b","label":"pos"},{"id":"c","label":"pos"}],
      "classifiers":[{"name":"LR","scores":{"a":-2,"b":6,"c":1.3}}]})",
                                IngestFormat::Json, opts);
    ASSERT_TRUE(r.report.ok());
    const auto again = load_dataset(serialize_dataset(*r.dataset), IngestFormat::Json);
    ASSERT_TRUE(again.report.ok());
    EXPECT_EQ(*again.dataset, *r.dataset);
    EXPECT_EQ(again.dataset->provenance(), "notebook dump");
    EXPECT_EQ(again.dataset->classifier("LR").raw_score(2), r.dataset->classifier("LR").raw_score(2));
}

TEST(Ingest, EveryClassifierCoversEveryInstance) {
    std::mt19937_64 gen(5);
    for (int k = 0; k < 50; ++k) {
        const auto ds = fixtures::random_dataset(gen, 12, 3);
        for (const auto& c : ds.classifiers()) EXPECT_EQ(c.scores->size(), ds.size());
    }
}
