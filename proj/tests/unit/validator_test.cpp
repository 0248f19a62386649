#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mutations.hpp"
#include "tj/validator.hpp"
#include "tj/xml_io.hpp"

namespace tj {
namespace {

std::size_t errors(const std::vector<Finding>& fs) {
    return static_cast<std::size_t>(
        std::count_if(fs.begin(), fs.end(), [](const Finding& f) { return f.severity == Severity::error; }));
}

std::size_t count_rule(const std::vector<Finding>& fs, const std::string& id) {
    return static_cast<std::size_t>(std::count_if(fs.begin(), fs.end(), [&](const Finding& f) { return f.rule_id == id; }));
}

TEST(Validate, SkeletonIsClean) {
    auto fs = validate(testing::skeleton());
    EXPECT_EQ(errors(fs), 0u);
    EXPECT_EQ(count_rule(fs, "R11"), 0u);
    EXPECT_EQ(count_rule(fs, "R9"), 0u);
    for (const auto& f : fs) ADD_FAILURE() << f.rule_id << " " << f.location << " " << f.message;
}

TEST(Validate, ChapterScopeIsOneR5) {
    Article a = testing::skeleton();
    a.header.file_desc->sources[0].monogr.imprint.scopes[0].kind = "chapter";
    auto fs = validate(a);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].rule_id, "R5");
    EXPECT_EQ(fs[0].severity, Severity::error);
    EXPECT_EQ(fs[0].location, "TEI[1]/teiHeader[1]/fileDesc[1]/sourceDesc[1]/biblStruct[1]/monogr[1]/imprint[1]/biblScope[1]");
}

TEST(Validate, AlteredTitleIsOneR3) {
    Article a = testing::skeleton();
    a.header.file_desc->main_title = plain("Multilocus Analysis of Age Related Retinal Degeneration");
    auto fs = validate(a);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].rule_id, "R3");
}

TEST(Validate, TitleComparisonIgnoresMarkupAndWhitespace) {
    Article a = testing::skeleton();
    a.header.file_desc->main_title = {Inline(TextRun{"Multilocus  Analysis of "}),
                                      Inline(Emph{"italic", plain("Age Related")}),
                                      Inline(TextRun{" Macular\n Degeneration "})};
    EXPECT_EQ(count_rule(validate(a), "R3"), 0u);
}

class MutationKill : public ::testing::TestWithParam<std::size_t> {};

TEST_P(MutationKill, ExactlyOneFindingForRule) {
    const auto& m = testing::rule_mutations().at(GetParam());
    Article a = testing::skeleton();
    m.apply(a);
    auto fs = validate(a);
    EXPECT_EQ(count_rule(fs, m.rule_id), 1u) << m.description;
    EXPECT_EQ(fs.size(), 1u) << m.description;
}

TEST_P(MutationKill, LocationsResolveInCanonicalOutput) {
    const auto& m = testing::rule_mutations().at(GetParam());
    Article a = testing::skeleton();
    m.apply(a);
    auto doc = xml::parse(serialize_article(a));
    for (const auto& f : validate(a)) {
        EXPECT_NE(xml::find_by_path(doc.root, f.location), nullptr) << f.rule_id << " " << f.location;
    }
}

TEST_P(MutationKill, OverrideChangesOnlySeverity) {
    const auto& m = testing::rule_mutations().at(GetParam());
    Article a = testing::skeleton();
    m.apply(a);
    auto base = validate(a);
    ValidatorConfig cfg;
    const auto* rule = find_rule(m.rule_id);
    cfg.severity_overrides[m.rule_id] = rule->severity == Severity::error ? Severity::warning : Severity::error;
    auto overridden = validate(a, cfg);
    ASSERT_EQ(base.size(), overridden.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        EXPECT_EQ(base[i].rule_id, overridden[i].rule_id);
        EXPECT_EQ(base[i].location, overridden[i].location);
        EXPECT_EQ(base[i].message, overridden[i].message);
        if (base[i].rule_id == m.rule_id) EXPECT_NE(base[i].severity, overridden[i].severity);
    }
}

INSTANTIATE_TEST_SUITE_P(Rules, MutationKill, ::testing::Range<std::size_t>(0, 12),
                         [](const auto& info) { return testing::rule_mutations().at(info.param).rule_id; });

TEST(Validate, MutationsCoverEveryRule) {
    const auto& ms = testing::rule_mutations();
    ASSERT_EQ(ms.size(), rules().size());
    for (std::size_t i = 0; i < ms.size(); ++i) EXPECT_EQ(ms[i].rule_id, rules()[i].id);
}

TEST(Validate, Deterministic) {
    Article a = testing::skeleton();
    for (const auto& m : testing::rule_mutations()) m.apply(a);
    auto first = validate(a);
    EXPECT_GE(first.size(), 10u);
    EXPECT_EQ(validate(a), first);
}

TEST(Validate, OrderedByDocumentPositionThenRule) {
    Article a = testing::skeleton();
    a.header.profile_desc.keywords.clear();                                   // R11 in profileDesc
    a.header.file_desc->main_title = plain("Other");                          // R3 in titleStmt
    a.body.at(0).kind = "abstract";                                           // R8 in body
    auto fs = validate(a);
    ASSERT_EQ(fs.size(), 3u);
    EXPECT_EQ(fs[0].rule_id, "R3");
    EXPECT_EQ(fs[1].rule_id, "R11");
    EXPECT_EQ(fs[2].rule_id, "R8");
}

TEST(Validate, FpageAfterLpageIsR5) {
    Article a = testing::skeleton();
    auto& scopes = a.header.file_desc->sources[0].monogr.imprint.scopes;
    scopes[1].value = "20";
    scopes.push_back(Scope{"lpage", "9"});
    auto fs = validate(a);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].rule_id, "R5");
    EXPECT_NE(fs[0].message.find("exceeds"), std::string::npos);
}

TEST(Validate, DuplicateReferenceIds) {
    Article a = testing::skeleton();
    BiblStruct e;
    e.xml_id = "b1";
    e.monogr.titles.push_back(Title{"m", "main", plain("X")});
    a.back.reference_list = ListBibl{{e, e}};
    auto fs = validate(a);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].rule_id, "R12");
    EXPECT_EQ(fs[0].location, "TEI[1]/text[1]/back[1]/div[1]/listBibl[1]/biblStruct[2]");
}

TEST(Validate, MalformedCitTargetIsR9) {
    Article a = testing::skeleton();
    a.body[0].blocks.push_back(Block(CitBlock{plain("q"), RefTarget{"b1"}, {}}));
    auto fs = validate(a);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].rule_id, "R9");
    EXPECT_EQ(fs[0].location, "TEI[1]/text[1]/body[1]/div[1]/cit[1]/ptr[1]");
}

TEST(Validate, EmptyBodyIsR8) {
    Article a = testing::skeleton();
    a.body.clear();
    auto fs = validate(a);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].rule_id, "R8");
}

TEST(Validate, DocTypeVocabulary) {
    ValidatorConfig cfg;
    cfg.doc_type_vocabulary = {"journalArticle"};
    auto fs = validate(testing::skeleton(), cfg);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].rule_id, "R7");
}

TEST(Explain, MentionsRuleSubstance) {
    EXPECT_NE(explain("R3").find("duplication"), std::string::npos);
    auto r5 = explain("R5");
    for (const char* kind : {"vol", "issue", "fpage", "lpage", "pp"}) EXPECT_NE(r5.find(kind), std::string::npos);
    EXPECT_THROW(explain("R99"), Error);
}

TEST(ValidatorConfig, ParsesJson) {
    auto cfg = ValidatorConfig::from_json(
        R"({"org_unit_vocabulary": ["lab"], "severity_overrides": {"R11": "error"}, "doc_type_vocabulary": []})");
    EXPECT_EQ(cfg.org_unit_vocabulary, std::set<std::string>{"lab"});
    EXPECT_EQ(cfg.severity_overrides.at("R11"), Severity::error);
}

TEST(ValidatorConfig, RejectsBadInput) {
    EXPECT_THROW(ValidatorConfig::from_json(R"({"severity_overrides": {"R99": "error"}})"), Error);
    EXPECT_THROW(ValidatorConfig::from_json(R"({"severity_overrides": {"R1": "fatal"}})"), Error);
    EXPECT_THROW(ValidatorConfig::from_json(R"({"unknown": 1})"), Error);
    EXPECT_THROW(ValidatorConfig::from_json("not json"), Error);
}

}  // namespace
}  // namespace tj
