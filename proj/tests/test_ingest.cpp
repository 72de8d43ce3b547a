#include <frontdoor/ingest.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace frontdoor;

namespace {

CsvText parse(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
}

AuditManifest manifest(std::vector<std::string> children) {
    AuditManifest m;
    m.treatment.column = "age";
    m.treatment.rule.kind = BinarizeRule::Kind::threshold;
    m.treatment.rule.threshold = 25;
    m.outcome.column = "good";
    m.children = std::move(children);
    return m;
}

const char* kCredit =
    "age,good,purpose,savings,\"note, free text\"\n"
    "30,1,car,2,\"a \"\"quoted\"\" one\"\n"
    "22,0,tv,?,x\n"
    "41,1,\"tv\",1,y\n"
    "19,0,radio,3,z\n"
    "25,1,car,NA,w\n"
    "60,0,business,2,v\n";

}  // namespace

TEST(Csv, QuotesEscapesAndEmbeddedNewlines) {
    const auto csv = parse("a,b\n\"x,1\",\"line\nbreak\"\r\n\"say \"\"hi\"\"\",2\n\n");
    ASSERT_EQ(csv.header, (std::vector<std::string>{"a", "b"}));
    ASSERT_EQ(csv.rows.size(), 2u);
    EXPECT_EQ(csv.rows[0][0], "x,1");
    EXPECT_EQ(csv.rows[0][1], "line\nbreak");
    EXPECT_EQ(csv.rows[1][0], "say \"hi\"");
    EXPECT_EQ(csv.rows[1][1], "2");
}

TEST(Csv, RejectsRaggedRowsAndOpenQuotes) {
    EXPECT_THROW(parse("a,b\n1\n"), std::invalid_argument);
    EXPECT_THROW(parse("a,b\n\"1,2\n"), std::invalid_argument);
    EXPECT_THROW(parse(""), std::invalid_argument);
}

TEST(Csv, MissingMarkers) {
    EXPECT_TRUE(is_missing(""));
    EXPECT_TRUE(is_missing(" ? "));
    EXPECT_TRUE(is_missing("NA"));
    EXPECT_FALSE(is_missing("na"));
    EXPECT_FALSE(is_missing("0"));
}

TEST(Ingest, DropsIncompleteRowsAndCountsThem) {
    auto m = manifest({"savings"});
    m.drop = {"note, free text"};
    const auto r = ingest(parse(kCredit), m);
    EXPECT_EQ(r.rows_read, 6u);
    EXPECT_EQ(r.rows_dropped, 2u);
    EXPECT_EQ(r.table.rows(), 4u);
}

TEST(Ingest, MissingOnlyInDroppedColumnKeepsRow) {
    auto m = manifest({"savings"});
    m.drop = {"note, free text"};
    const auto r = ingest(parse("age,good,savings,\"note, free text\"\n30,1,2,?\n20,0,1,ok\n"), m);
    EXPECT_EQ(r.rows_dropped, 0u);
}

TEST(Ingest, ThresholdBinarizesTreatment) {
    auto m = manifest({"savings"});
    m.drop = {"note, free text", "purpose"};
    const auto r = ingest(parse(kCredit), m);
    const auto t = r.table.variable(r.roles.treatment).columns.at(0);
    // kept rows: ages 30, 41, 19, 60
    const std::vector<double> expected{1, 1, 0, 1};
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(r.table.column(t)(static_cast<Eigen::Index>(i)), expected[i]);
    EXPECT_EQ(r.table.variable(r.roles.treatment).provenance, "threshold(age)");
}

TEST(Ingest, OneHotDropsFirstSortedLevel) {
    auto m = manifest({"savings"});
    m.drop = {"note, free text"};
    const auto r = ingest(parse(kCredit), m);
    const auto v = r.table.require_variable("purpose");
    const auto& var = r.table.variable(v);
    // levels among kept rows: business, car, radio, tv
    ASSERT_EQ(var.columns.size(), 3u);
    EXPECT_EQ(var.provenance, "onehot(purpose)");
    EXPECT_EQ(r.table.column_names()[var.columns[0]], "purpose=car");
    EXPECT_EQ(r.table.column_names()[var.columns[2]], "purpose=tv");
    ASSERT_EQ(r.encodings.size(), 1u);
    EXPECT_EQ(r.encodings[0].levels.front(), "business");
}

TEST(Ingest, OneHotRoundTrip) {
    auto m = manifest({"savings"});
    m.drop = {"note, free text"};
    const auto r = ingest(parse(kCredit), m);
    const auto v = r.table.require_variable("purpose");
    const std::vector<std::string> kept{"car", "tv", "radio", "business"};
    for (std::size_t i = 0; i < kept.size(); ++i) EXPECT_EQ(decode_category(r, v, i), kept[i]);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        double sum = 0;
        for (auto c : r.table.variable(v).columns) sum += r.table.column(c)(static_cast<Eigen::Index>(i));
        EXPECT_LE(sum, 1.0);
    }
}

TEST(Ingest, ListedNumericColumnIsCategorical) {
    auto m = manifest({"purpose"});
    m.drop = {"note, free text"};
    m.categorical = {"savings"};
    const auto r = ingest(parse(kCredit), m);
    const auto& var = r.table.variable(r.table.require_variable("savings"));
    EXPECT_EQ(var.columns.size(), 2u);  // levels 1, 2, 3
    EXPECT_EQ(r.table.column_names()[var.columns[0]], "savings=2");
}

TEST(Ingest, RolesFollowVariableIds) {
    auto m = manifest({"purpose", "savings"});
    m.drop = {"note, free text"};
    const auto r = ingest(parse(kCredit), m);
    EXPECT_EQ(r.roles.treatment, 0u);
    EXPECT_EQ(r.roles.outcome, 1u);
    EXPECT_EQ(r.roles.children, (NodeSet{2, 3}));
}

TEST(Ingest, PositiveLabelOutcome) {
    AuditManifest m;
    m.treatment.column = "t";
    m.outcome = {"y", {BinarizeRule::Kind::positive_label, 0, "good"}};
    m.children = {"b"};
    const auto r = ingest(parse("t,y,b\n1,good,0.5\n0,bad,1.5\n"), m);
    const auto y = r.table.variable(r.roles.outcome).columns.at(0);
    EXPECT_EQ(r.table.column(y)(0), 1.0);
    EXPECT_EQ(r.table.column(y)(1), 0.0);
}

TEST(Ingest, RejectsBadInputs) {
    auto m = manifest({"savings"});
    m.drop = {"note, free text"};
    auto missing = m;
    missing.children = {"nope"};
    EXPECT_THROW(ingest(parse(kCredit), missing), std::invalid_argument);

    auto raw_t = m;
    raw_t.treatment.rule = {};
    EXPECT_THROW(ingest(parse(kCredit), raw_t), std::invalid_argument);

    auto overlap = m;
    overlap.children = {"good"};
    EXPECT_THROW(overlap.validate(), std::invalid_argument);
}

TEST(Manifest, JsonRoundTrip) {
    const std::string text = R"({
      "csv_path": "german.csv",
      "treatment": {"column": "age", "threshold": 25},
      "outcome": "credit",
      "children": ["dependents", "savings", "job"],
      "categorical": ["purpose"],
      "drop": []
    })";
    const auto m = parse_audit_manifest(text);
    EXPECT_EQ(m.treatment.rule.kind, BinarizeRule::Kind::threshold);
    EXPECT_EQ(m.treatment.rule.threshold, 25);
    EXPECT_EQ(m.outcome.column, "credit");
    EXPECT_EQ(m.outcome.rule.kind, BinarizeRule::Kind::none);
    const auto again = parse_audit_manifest(to_json(m));
    EXPECT_EQ(to_json(again), to_json(m));
    EXPECT_THROW(parse_audit_manifest("{\"treatment\": \"a\"}"), std::invalid_argument);
    EXPECT_THROW(parse_audit_manifest("not json"), std::invalid_argument);
}
