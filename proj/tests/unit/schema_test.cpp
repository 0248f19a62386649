#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "synthetic.hpp"
#include "tj/model.hpp"
#include "tj/schema.hpp"
#include "tj/xml.hpp"
#include "tj/xml_io.hpp"

using namespace tj;
using namespace tj::schema;
using tj::testing::SyntheticOptions;
using tj::testing::synthetic_corpus;

namespace {

std::vector<xml::Document> parse_all(const std::vector<std::string>& sources) {
    std::vector<xml::Document> out;
    for (const auto& s : sources) out.push_back(xml::parse(s));
    return out;
}

std::vector<xml::Document> synthetic_docs(const SyntheticOptions& o) {
    std::vector<std::string> sources;
    for (auto& d : synthetic_corpus(o)) sources.push_back(std::move(d.xml));
    return parse_all(sources);
}

std::string tei(const std::string& inner) {
    return "<TEI xmlns=\"http://www.tei-c.org/ns/1.0\">" + inner + "</TEI>";
}

std::string hi_doc(const std::vector<std::string>& rends) {
    std::string body;
    for (const auto& r : rends) body += "<hi rend=\"" + r + "\">x</hi>";
    return tei("<text><body><p>" + body + "</p></body></text>");
}

std::size_t errors(const std::vector<Finding>& fs) {
    return static_cast<std::size_t>(
        std::count_if(fs.begin(), fs.end(), [](const Finding& f) { return f.severity == Severity::error; }));
}

std::set<std::string> keys(const UsageProfile& p) {
    std::set<std::string> out;
    for (const auto& [k, u] : p.elements) out.insert(k);
    return out;
}

}  // namespace

// ---- profile ---------------------------------------------------------------

TEST(Profile, SkeletonElementSetMatchesListing) {
    auto doc = xml::parse(tj::testing::read_data("skeleton_completed.xml"));
    auto p = profile_document(doc.root);
    // Tags of the skeleton listing, enumerated by hand from the file.
    std::set<std::string> expected = {
        "TEI",         "teiHeader", "fileDesc",   "titleStmt",  "title",       "publicationStmt", "availability",
        "p",           "date",      "authority",  "sourceDesc", "biblStruct",  "analytic",        "author",
        "persName",    "forename",  "surname",    "affiliation", "orgName",    "address",         "settlement",
        "postCode",    "country",   "addrLine",   "email",      "monogr",      "idno",            "imprint",
        "publisher",   "pubPlace",  "biblScope",  "profileDesc", "textClass",  "keywords",        "list",
        "head",        "item",      "term",       "revisionDesc", "change",    "text",            "front",
        "div",         "body",      "back"};
    EXPECT_EQ(keys(p), expected);
    EXPECT_EQ(p.documents, 1u);
    EXPECT_EQ(p.roots.at("TEI"), 1u);
    EXPECT_EQ(p.elements.at("change").count, 2u);
    EXPECT_EQ(p.elements.at("title").attribute_values.at("type").at("main"), 3u);
    EXPECT_EQ(p.elements.at("title").attribute_values.at("type").at("nlm-ta"), 1u);
    EXPECT_TRUE(p.elements.at("surname").text);
    EXPECT_FALSE(p.elements.at("persName").text);
}

TEST(Profile, CompetingRendValuesAreCounted) {
    auto docs = parse_all({hi_doc({"italic"}), hi_doc({"italics"})});
    auto p = profile_corpus(docs);
    std::map<std::string, std::size_t> expected{{"italic", 1}, {"italics", 1}};
    EXPECT_EQ(p.elements.at("hi").attribute_values.at("rend"), expected);
    EXPECT_EQ(p.documents, 2u);
}

TEST(Profile, EmptyCorpus) {
    auto p = profile_corpus({});
    EXPECT_TRUE(p.empty());
    EXPECT_EQ(p.documents, 0u);
    EXPECT_TRUE(codify(p).empty());
}

TEST(Profile, ForeignElementsAreOpaque) {
    auto doc = xml::parse(tei(
        "<text><body><p><formula><m:math xmlns:m=\"http://www.w3.org/1998/Math/MathML\"><m:mi>x</m:mi></m:math>"
        "</formula></p></body></text>"));
    auto p = profile_document(doc.root);
    const std::string math = "{http://www.w3.org/1998/Math/MathML}math";
    ASSERT_TRUE(p.elements.count(math));
    EXPECT_TRUE(p.elements.at(math).foreign);
    EXPECT_FALSE(p.elements.count("{http://www.w3.org/1998/Math/MathML}mi"));
    auto s = codify(p);
    EXPECT_TRUE(s.rule(math)->foreign);
    EXPECT_EQ(errors(validate_against(s, doc.root)), 0u);
}

TEST(Profile, TotalsAreConsistentWithCounts) {
    SyntheticOptions o;
    o.documents = 8;
    auto p = profile_corpus(synthetic_docs(o));
    std::map<std::string, std::size_t> as_child;
    for (const auto& [key, u] : p.elements) {
        EXPECT_GE(u.count, 1u) << key;
        for (const auto& [child, n] : u.child_counts) {
            as_child[child] += n;
            EXPECT_LE(u.parents_with_child.at(child), u.count) << key << "/" << child;
            EXPECT_LE(u.parents_with_child.at(child), n) << key << "/" << child;
        }
        for (const auto& [attr, values] : u.attribute_values) {
            std::size_t total = 0;
            for (const auto& [v, n] : values) total += n;
            EXPECT_LE(total, u.count) << key << "@" << attr;
        }
    }
    for (const auto& [key, u] : p.elements) {
        auto roots = p.roots.count(key) ? p.roots.at(key) : 0;
        EXPECT_EQ(as_child[key] + roots, u.count) << key;
    }
}

TEST(Profile, OrderIndependent) {
    SyntheticOptions o;
    o.documents = 12;
    auto docs = synthetic_docs(o);
    auto reference = profile_corpus(docs);
    std::mt19937 rng(7);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(docs.begin(), docs.end(), rng);
        EXPECT_EQ(profile_corpus(docs), reference);
    }
    // Merge is associative and commutative on partial profiles.
    UsageProfile a, b, c;
    for (std::size_t i = 0; i < docs.size(); ++i) (i % 3 == 0 ? a : i % 3 == 1 ? b : c).merge(profile_document(docs[i].root));
    UsageProfile left = a;
    left.merge(b);
    left.merge(c);
    UsageProfile right = c;
    UsageProfile bc = b;
    bc.merge(a);
    right.merge(bc);
    EXPECT_EQ(left, right);
    EXPECT_EQ(left, reference);
}

TEST(Profile, ReprofilingCanonicalSerializationIsEqual) {
    SyntheticOptions o;
    o.documents = 5;
    auto docs = synthetic_docs(o);
    std::vector<std::string> again;
    for (const auto& d : docs) again.push_back(serialize_article(tj::testing::parse_ok(d.source)));
    EXPECT_EQ(profile_corpus(parse_all(again)), profile_corpus(docs));
}

// ---- codify ----------------------------------------------------------------

TEST(Codify, CompetingValuesAreBothPermitted) {
    auto s = codify(profile_corpus(parse_all({hi_doc({"italic"}), hi_doc({"italics"})})));
    const auto* hi = s.rule("hi");
    ASSERT_NE(hi, nullptr);
    std::set<std::string> expected{"italic", "italics"};
    EXPECT_EQ(hi->attributes.at("rend").values, expected);
    EXPECT_TRUE(hi->attributes.at("rend").required);
    EXPECT_EQ(s.root, "TEI");
}

TEST(Codify, SkeletonClosureAndNothingElse) {
    auto doc = xml::parse(tj::testing::read_data("skeleton_completed.xml"));
    auto s = codify(profile_document(doc.root));
    EXPECT_TRUE(validate_against(s, doc.root).empty());

    // An element the skeleton never used is refused.
    auto novel = xml::parse(tei("<teiHeader><fileDesc><titleStmt><title>t</title><editor>E</editor></titleStmt>"
                                "</fileDesc></teiHeader><text><body><div><p>x</p></div></body></text>"));
    auto fs = validate_against(s, novel.root);
    auto has = [&](const std::string& code, const std::string& loc) {
        return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) {
            return f.rule_id == code && f.location == loc && f.severity == Severity::error;
        });
    };
    const std::string editor = "TEI[1]/teiHeader[1]/fileDesc[1]/titleStmt[1]/editor[1]";
    EXPECT_TRUE(has("schema-element", editor));
    EXPECT_TRUE(has("schema-child", editor));
}

TEST(Codify, ContentModelIsUnordered) {
    auto s = codify(profile_document(xml::parse(tei("<text><body><div><head>h</head><p>x</p></div></body></text>")).root));
    auto swapped = xml::parse(tei("<text><body><div><p>x</p><head>h</head></div></body></text>"));
    EXPECT_TRUE(validate_against(s, swapped.root).empty());
}

TEST(Codify, RequiredChildrenAndAttributes) {
    auto docs = parse_all({tei("<text><body><div type=\"a\"><head>h</head><p>x</p></div>"
                               "<div type=\"b\"><p>y</p></div></body></text>")});
    auto s = codify(profile_corpus(docs));
    const auto* div = s.rule("div");
    EXPECT_EQ(div->required_children, std::set<std::string>{"p"});
    EXPECT_EQ(div->children, (std::set<std::string>{"head", "p"}));
    EXPECT_TRUE(div->attributes.at("type").required);

    CodifyOptions half;
    half.required_child_threshold = 0.5;
    EXPECT_EQ(codify(profile_corpus(docs), half).rule("div")->required_children, (std::set<std::string>{"head", "p"}));

    auto missing = xml::parse(tei("<text><body><div><head>h</head></div></body></text>"));
    auto fs = validate_against(s, missing.root);
    std::set<std::string> codes;
    for (const auto& f : fs) codes.insert(f.rule_id);
    EXPECT_EQ(codes, (std::set<std::string>{"schema-required-child", "schema-required-attribute"}));
}

TEST(Codify, EnumerationCap) {
    std::vector<std::string> values;
    for (int i = 0; i < 25; ++i) values.push_back("v" + std::to_string(i));
    auto p = profile_corpus(parse_all({hi_doc(values)}));
    auto open = codify(p);
    EXPECT_TRUE(open.rule("hi")->attributes.count("rend"));
    EXPECT_FALSE(open.rule("hi")->attributes.at("rend").values.has_value());

    CodifyOptions wide;
    wide.enumeration_cap = 25;
    EXPECT_EQ(codify(p, wide).rule("hi")->attributes.at("rend").values->size(), 25u);

    // Attributes outside the enumerable set stay open whatever their count.
    auto q = profile_corpus(parse_all({tei("<text><body><p><ref target=\"#a\">a</ref></p></body></text>")}));
    EXPECT_FALSE(codify(q).rule("ref")->attributes.at("target").values.has_value());
}

TEST(Codify, OptionsAreChecked) {
    CodifyOptions o;
    o.enumeration_cap = 0;
    EXPECT_THROW(o.check(), Error);
    o.enumeration_cap = 1;
    o.required_child_threshold = 0.0;
    EXPECT_THROW(o.check(), Error);
    o.required_child_threshold = 1.5;
    EXPECT_THROW(o.check(), Error);
    o.required_child_threshold = 1.0;
    EXPECT_NO_THROW(o.check());
    o.enumeration_cap = 0;
    EXPECT_THROW(codify(UsageProfile{}, o), Error);
}

TEST(Codify, ClosureOnSyntheticCorpus) {
    SyntheticOptions o;
    o.documents = 20;
    auto docs = synthetic_docs(o);
    auto s = codify(profile_corpus(docs));
    for (const auto& d : docs) EXPECT_TRUE(validate_against(s, d.root).empty());
}

TEST(Codify, JsonIsDeterministicAndRoundTrips) {
    SyntheticOptions o;
    o.documents = 6;
    auto docs = synthetic_docs(o);
    auto first = codify(profile_corpus(docs)).to_json();
    auto second = codify(profile_corpus(docs)).to_json();
    EXPECT_EQ(first, second);
    auto back = RestrictedSchema::from_json(first);
    EXPECT_EQ(back.to_json(), first);
    EXPECT_EQ(back, codify(profile_corpus(docs)));
    EXPECT_EQ(first.back(), '\n');
    EXPECT_NE(first.find("\"content_model\": \"unordered\""), std::string::npos);
}

TEST(Codify, JsonRejectsBadInput) {
    EXPECT_THROW(RestrictedSchema::from_json("not json"), Error);
    EXPECT_THROW(RestrictedSchema::from_json("{\"root\": \"TEI\", \"elements\": {\"p\": {\"children\": 3}}}"), Error);
    EXPECT_THROW(RestrictedSchema::from_json("[]"), Error);
}

// ---- validation against a base ----------------------------------------------

TEST(Validate, BasePermittedConstructsAreWarnings) {
    auto s = codify(profile_document(xml::parse(tei("<text><body><div><p>x</p></div></body></text>")).root));
    auto doc = xml::parse(tei("<text><body><div><p>x <hi rend=\"italic\">y</hi></p></div></body></text>"));
    auto strict = validate_against(s, doc.root);
    EXPECT_GT(errors(strict), 0u);
    auto relaxed = validate_against(s, doc.root, &base_schema());
    EXPECT_EQ(errors(relaxed), 0u);
    EXPECT_EQ(relaxed.size(), strict.size());
    for (const auto& f : relaxed) EXPECT_EQ(f.severity, Severity::warning) << f.message;
}

TEST(Validate, ConstructsOutsideTheBaseStayErrors) {
    auto s = codify(profile_document(xml::parse(tei("<text><body><div><p>x</p></div></body></text>")).root));
    auto doc = xml::parse(tei("<text><body><div><p>x <blink>y</blink></p></div></body></text>"));
    auto fs = validate_against(s, doc.root, &base_schema());
    EXPECT_EQ(errors(fs), fs.size());
    EXPECT_GE(fs.size(), 1u);
}

TEST(Validate, CorpusMemberHasNoFindings) {
    auto doc = xml::parse(tj::testing::read_data("skeleton_completed.xml"));
    auto s = codify(profile_document(doc.root));
    auto copy = xml::parse(doc.source);
    EXPECT_TRUE(validate_against(s, copy.root, &base_schema()).empty());
}

TEST(Validate, BaseSchemaCoversTheSkeletonAndSynthetics) {
    auto doc = xml::parse(tj::testing::read_data("skeleton_completed.xml"));
    EXPECT_EQ(errors(validate_against(base_schema(), doc.root)), 0u);
    SyntheticOptions o;
    o.documents = 4;
    auto s = codify(profile_corpus(synthetic_docs(o)));
    EXPECT_TRUE(not_permitted(s, base_schema()).empty());
}

// ---- variants --------------------------------------------------------------

TEST(Variants, Normalization) {
    EXPECT_EQ(normalize_variant("italics"), "italic");
    EXPECT_EQ(normalize_variant("Italic"), "italic");
    EXPECT_EQ(normalize_variant("font-style"), "font-style");
    EXPECT_EQ(normalize_variant("font_style"), "font-style");
    EXPECT_EQ(normalize_variant("Font Style"), "font-style");
    EXPECT_EQ(normalize_variant("small__caps"), "small-cap");
    EXPECT_EQ(normalize_variant("bold"), "bold");
    EXPECT_EQ(normalize_variant("s"), "");
}

TEST(Variants, ItalicAndItalicsFormOneCluster) {
    auto p = profile_corpus(parse_all({hi_doc({"italic", "italic", "italic", "italics"})}));
    auto cs = detect_variants(p);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].element, "hi");
    EXPECT_EQ(cs[0].attribute, "rend");
    EXPECT_EQ(cs[0].key, "italic");
    std::map<std::string, std::size_t> members{{"italic", 3}, {"italics", 1}};
    EXPECT_EQ(cs[0].members, members);
    EXPECT_EQ(cs[0].total(), 4u);
}

TEST(Variants, SingleValueIsNoCluster) {
    auto p = profile_corpus(parse_all({hi_doc({"bold", "bold", "bold", "bold", "bold"})}));
    EXPECT_TRUE(detect_variants(p).empty());
}

TEST(Variants, SeparatorSpellingsFormOneClusterOfThree) {
    auto p = profile_corpus(parse_all({hi_doc({"font-style", "font-style", "font_style", "Font Style"})}));
    auto cs = detect_variants(p);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].key, "font-style");
    EXPECT_EQ(cs[0].members.size(), 3u);
    EXPECT_EQ(cs[0].total(), 4u);
}

TEST(Variants, OnlyEnumerableAttributesAndSortedByTotal) {
    auto doc = tei("<text><body><p><hi rend=\"bold\">a</hi><hi rend=\"Bold\">a</hi>"
                   "<hi rend=\"italic\">a</hi><hi rend=\"italics\">a</hi><hi rend=\"italics\">a</hi>"
                   "<ref target=\"#x\" n=\"A\">a</ref><ref target=\"#x\" n=\"a\">a</ref></p></body></text>");
    auto cs = detect_variants(profile_corpus(parse_all({doc})));
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_EQ(cs[0].key, "italic");
    EXPECT_EQ(cs[1].key, "bold");
    EXPECT_EQ(detect_variants(profile_corpus(parse_all({doc})), {"n"}).size(), 1u);
}

// ---- rules and arbitration --------------------------------------------------

TEST(Rules, Parse) {
    auto rules = parse_rules("# comment\n\nhi rend italics -> italic\n* type \"Font Style\" -> \"font-style\"\n");
    ASSERT_EQ(rules.size(), 2u);
    EXPECT_EQ(rules[0], (RewriteRule{"hi", "rend", "italics", "italic"}));
    EXPECT_EQ(rules[1], (RewriteRule{"*", "type", "Font Style", "font-style"}));
}

TEST(Rules, ParseErrorsNameTheLine) {
    auto message = [](const std::string& text) {
        try {
            parse_rules(text);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("hi rend a -> b\nhi rend italic\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("hi italics -> italic").find("line 1"), std::string::npos);
    EXPECT_NE(message("hi rend italic -> italic").find("equal"), std::string::npos);
    EXPECT_NE(message("hi rend \"it -> italic").find("quote"), std::string::npos);
    EXPECT_NE(message("hi rend a ->").find("empty"), std::string::npos);
}

TEST(Rules, Conflicts) {
    EXPECT_THROW(check_rules({{"hi", "rend", "it", "italic"}, {"hi", "rend", "it", "italics"}}), Error);
    EXPECT_THROW(check_rules({{"*", "rend", "it", "italic"}, {"hi", "rend", "it", "italics"}}), Error);
    EXPECT_NO_THROW(check_rules({{"hi", "rend", "it", "italic"}, {"hi", "rend", "it", "italic"}}));
    EXPECT_NO_THROW(check_rules({{"hi", "rend", "it", "italic"}, {"seg", "rend", "it", "italics"}}));
}

TEST(Arbitrate, RewritesOnlyTheAttributeValue) {
    std::string src = "<?xml version=\"1.0\"?>\n<!-- keep -->\n" +
                      tei("<text><body><p>  <hi rend='italics'>a</hi> <hi   rend=\"italic\">b</hi>"
                          "<seg rend=\"italics\">c</seg></p></body></text>") +
                      "\n";
    auto docs = parse_all({src});
    auto r = arbitrate(docs, parse_rules("hi rend italics -> italic"));
    EXPECT_EQ(r.changes, 1u);
    EXPECT_EQ(r.changes_per_document, std::vector<std::size_t>{1});
    auto expected = src;
    expected.replace(expected.find("'italics'"), 9, "'italic'");
    EXPECT_EQ(r.sources[0], expected);
    // Clusters are per element, so the untouched seg value does not pair with hi.
    EXPECT_TRUE(detect_variants(profile_corpus(parse_all(r.sources))).empty());
}

TEST(Arbitrate, EmptyRulesAndAbsentValues) {
    SyntheticOptions o;
    o.documents = 3;
    std::vector<std::string> sources;
    for (auto& d : synthetic_corpus(o)) sources.push_back(d.xml);
    auto docs = parse_all(sources);
    auto none = arbitrate(docs, {});
    EXPECT_EQ(none.changes, 0u);
    EXPECT_EQ(none.sources, sources);
    auto absent = arbitrate(docs, parse_rules("hi rend underline -> underlined"));
    EXPECT_EQ(absent.changes, 0u);
    EXPECT_EQ(absent.sources, sources);
}

TEST(Arbitrate, ConflictsFailBeforeAnyRewrite) {
    auto docs = parse_all({hi_doc({"it"})});
    EXPECT_THROW(arbitrate(docs, {{"hi", "rend", "it", "italic"}, {"*", "rend", "it", "italics"}}), Error);
}

TEST(Arbitrate, SinglePassAndWildcard) {
    auto docs = parse_all({tei("<text><body><p><hi rend=\"a\">x</hi><hi rend=\"b\">y</hi><seg type=\"a\">z</seg>"
                               "</p></body></text>")});
    auto r = arbitrate(docs, {{"hi", "rend", "a", "b"}, {"hi", "rend", "b", "a"}, {"*", "type", "a", "c&d"}});
    EXPECT_EQ(r.changes, 3u);
    EXPECT_NE(r.sources[0].find("<hi rend=\"b\">x</hi><hi rend=\"a\">y</hi><seg type=\"c&amp;d\">z</seg>"),
              std::string::npos);
    auto reparsed = xml::parse(r.sources[0]);
    EXPECT_EQ(reparsed.root.first_child("text")->first_child("body")->first_child("p")->first_child("seg")->attribute_or("type"),
              "c&d");
}

// ---- corpus-level properties -----------------------------------------------------

TEST(Evolution, MonotonicGrowth) {
    SyntheticOptions small;
    small.documents = 10;
    SyntheticOptions large;
    large.documents = 20;
    auto s10 = codify(profile_corpus(synthetic_docs(small)));
    auto s20 = codify(profile_corpus(synthetic_docs(large)));
    auto gaps = not_permitted(s10, s20);
    EXPECT_TRUE(gaps.empty()) << gaps.front();
    // Required children only relax as the corpus grows.
    for (const auto& [key, r] : s20.elements) {
        const auto* old = s10.rule(key);
        if (!old) continue;
        for (const auto& c : r.required_children) EXPECT_TRUE(old->required_children.count(c)) << key << "/" << c;
    }
}

TEST(Evolution, NestedPrefixesGrowMonotonically) {
    SyntheticOptions o;
    o.documents = 16;
    auto docs = synthetic_docs(o);
    RestrictedSchema previous;
    UsageProfile p;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        p.merge(profile_document(docs[i].root));
        auto s = codify(p);
        if (i > 0) EXPECT_TRUE(not_permitted(previous, s).empty()) << "after " << i + 1;
        previous = s;
    }
}

TEST(Evolution, ArbitrationConverges) {
    SyntheticOptions o;
    o.documents = 20;
    o.rend_values = {"italic", "italics"};
    auto corpus = synthetic_corpus(o);
    std::size_t italics = 0;
    std::vector<std::string> sources;
    for (const auto& d : corpus) {
        sources.push_back(d.xml);
        if (d.rend_counts.count("italics")) italics += d.rend_counts.at("italics");
    }
    ASSERT_GT(italics, 0u);
    auto docs = parse_all(sources);
    auto clusters = detect_variants(profile_corpus(docs));
    ASSERT_EQ(clusters.size(), 1u);
    EXPECT_EQ(clusters[0].key, "italic");

    auto r = arbitrate(docs, parse_rules("hi rend italics -> italic"));
    EXPECT_EQ(r.changes, italics);
    auto rewritten = parse_all(r.sources);
    auto profile = profile_corpus(rewritten);
    auto s = codify(profile);
    EXPECT_EQ(s.rule("hi")->attributes.at("rend").values, std::set<std::string>{"italic"});
    EXPECT_TRUE(detect_variants(profile).empty());
    for (const auto& d : rewritten) EXPECT_TRUE(validate_against(s, d.root).empty());
}
