#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tj/xml_io.hpp"

namespace tj {
namespace {

std::string wrap_body(const std::string& body, const std::string& back = "") {
    return R"(<TEI xmlns="http://www.tei-c.org/ns/1.0"><teiHeader><fileDesc><titleStmt><title>T</title></titleStmt>)"
           R"(<publicationStmt/><sourceDesc><biblStruct><monogr><title>T</title></monogr></biblStruct></sourceDesc>)"
           R"(</fileDesc></teiHeader><text><body>)" +
           body + "</body>" + back + "</text></TEI>";
}

Article parsed_ok(const ParseReport& r) {
    if (!r.ok()) {
        for (const auto& i : r.issues) ADD_FAILURE() << i.location << ": " << i.message;
        return {};
    }
    return *r.outcome;
}

bool has_warning(const ParseReport& r, std::string_view needle) {
    for (const auto& i : r.issues) {
        if (i.severity == Severity::warning && i.message.find(needle) != std::string::npos) return true;
    }
    return false;
}

TEST(ParseArticle, SkeletonHeader) {
    const auto& a = testing::skeleton();
    ASSERT_EQ(a.header.profile_desc.keywords.size(), 1u);
    EXPECT_EQ(a.header.profile_desc.keywords[0].term, "foetal development");
    const auto& ch = a.header.revision_desc.changes;
    ASSERT_EQ(ch.size(), 2u);
    EXPECT_EQ(ch[0].when, CalendarDate::ymd(2008, 8, 27));
    EXPECT_EQ(ch[0].kind, "received");
    EXPECT_EQ(ch[1].when, CalendarDate::ymd(2008, 12, 1));
    EXPECT_EQ(ch[1].kind, "accepted");
    EXPECT_NE(flatten(a.header.file_desc->availability).find("Copyright © The Animal Consortium 2009"),
              std::string::npos);
    EXPECT_EQ(a.header.file_desc->authority, "The Animal Consortium");
    EXPECT_EQ(a.header.file_desc->publication_date->year, 2009);
}

TEST(ParseArticle, SkeletonSource) {
    const auto* src = testing::skeleton().source();
    ASSERT_NE(src, nullptr);
    EXPECT_EQ(src->doc_type.value, "article");
    ASSERT_TRUE(src->analytic);
    const auto& dean = src->analytic->authors.at(0);
    EXPECT_TRUE(dean.corresponding);
    EXPECT_EQ(dean.forenames, std::vector<std::string>{"Michael"});
    EXPECT_EQ(dean.surname, "Dean");
    EXPECT_EQ(*dean.email, "dean@ncifcrf.gov");
    ASSERT_TRUE(dean.affiliation);
    ASSERT_EQ(dean.affiliation->org_units.size(), 2u);
    EXPECT_EQ(dean.affiliation->org_units[0].kind, "laboratory");
    EXPECT_EQ(dean.affiliation->address->lines.at(1).kind, "fax");
    EXPECT_EQ(src->monogr.titles.size(), 2u);
    EXPECT_EQ(src->monogr.titles[1].type, "nlm-ta");
    EXPECT_EQ(*src->monogr.issn, "1018-4813");
    EXPECT_EQ(src->monogr.imprint.scope("fpage")->value, "1");
}

TEST(ParseArticle, SkeletonText) {
    const auto& a = testing::skeleton();
    ASSERT_EQ(a.front.size(), 1u);
    EXPECT_EQ(a.front[0].kind, "abstract");
    ASSERT_EQ(a.body.size(), 1u);
    EXPECT_TRUE(a.back.empty());
}

TEST(ParseArticle, PlaceholderKeywordItemWarns) {
    auto r = parse_article(testing::read_data("skeleton_completed.xml"));
    EXPECT_TRUE(has_warning(r, "keyword item without <term>"));
}

TEST(ParseArticle, Minimal) {
    auto r = parse_article(wrap_body("<div><p>x</p></div>"));
    auto a = parsed_ok(r);
    EXPECT_TRUE(a.front.empty());
    EXPECT_TRUE(a.back.empty());
    ASSERT_EQ(a.body.size(), 1u);
    EXPECT_EQ(a.body[0].kind, "section");
}

TEST(ParseArticle, WrongRootIsError) {
    auto r = parse_article("<html><body/></html>");
    EXPECT_FALSE(r.ok());
    ASSERT_EQ(r.error_count(), 1u);
    EXPECT_NE(r.issues[0].message.find("root element must be TEI"), std::string::npos);
    auto r2 = parse_article(R"(<TEI xmlns="http://www.tei-c.org/ns/1.0/"><teiHeader/><text/></TEI>)");
    EXPECT_FALSE(r2.ok());
}

TEST(ParseArticle, MissingHeaderOrText) {
    auto r = parse_article(R"(<TEI xmlns="http://www.tei-c.org/ns/1.0"><text><body/></text></TEI>)");
    EXPECT_FALSE(r.ok());
    auto r2 = parse_article(R"(<TEI xmlns="http://www.tei-c.org/ns/1.0"><teiHeader/></TEI>)");
    EXPECT_FALSE(r2.ok());
}

TEST(ParseArticle, MalformedXml) {
    auto r = parse_article("<TEI><unclosed></TEI>");
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.error_count(), 1u);
}

TEST(ParseArticle, DateTypRepair) {
    auto r = parse_article(wrap_body(
        "<div><cit><quote>q</quote><biblStruct><monogr><title>B</title><imprint>"
        R"(<date typ="Published" when="1969-02-07"/></imprint></monogr></biblStruct></cit></div>)"));
    auto a = parsed_ok(r);
    EXPECT_TRUE(has_warning(r, "'typ'"));
    const auto& cit = std::get<CitBlock>(a.body.at(0).blocks.at(0).value);
    const auto& b = std::get<BiblStruct>(cit.source);
    EXPECT_EQ(b.monogr.imprint.date->role, "published");
    EXPECT_EQ(b.doc_type.value, "book");
}

TEST(ParseArticle, ListBibSpellingAccepted) {
    auto r = parse_article(wrap_body(R"(<div><p>see <ref target="#b1">1</ref></p></div>)",
                                     R"(<back><listBib><biblStruct xml:id="b1"><monogr><title>X</title></monogr>)"
                                     R"(</biblStruct></listBib></back>)"));
    auto a = parsed_ok(r);
    EXPECT_TRUE(has_warning(r, "listBib"));
    ASSERT_TRUE(a.back.reference_list);
    EXPECT_EQ(a.back.reference_list->entries.size(), 1u);
    const auto& p = std::get<Paragraph>(a.body[0].blocks[0].value);
    EXPECT_TRUE(std::holds_alternative<BiblRef>(p.content.at(1).value));
}

TEST(ParseArticle, MentionsAndOpaqueInlines) {
    auto r = parse_article(wrap_body(
        R"(<div><p><persName key="dean">Dean</persName> at <orgName>IISc</orgName> in <placeName>Bangalore</placeName> )"
        R"(used <term type="software">R</term>, <choice><abbr>AMD</abbr><expan>age related macular degeneration</expan></choice> )"
        R"(<foo>bar</foo> <hi rend="italic">it</hi> <ref target="http://x.org">link</ref></p></div>)"));
    auto a = parsed_ok(r);
    const auto& c = std::get<Paragraph>(a.body[0].blocks[0].value).content;
    std::vector<std::size_t> kinds;
    for (const auto& in : c) kinds.push_back(in.value.index());
    const auto& person = std::get<NameMention>(c[0].value);
    EXPECT_EQ(person.kind, NameKind::person);
    EXPECT_EQ(*person.key, "dean");
    EXPECT_EQ(std::get<NameMention>(c[2].value).kind, NameKind::organization);
    EXPECT_EQ(std::get<NameMention>(c[4].value).kind, NameKind::place);
    EXPECT_EQ(*std::get<TermMention>(c[6].value).kind, "software");
    EXPECT_EQ(*std::get<AbbrMention>(c[8].value).expansion, "age related macular degeneration");
    EXPECT_EQ(std::get<OpaqueInline>(c[10].value).markup, "<foo>bar</foo>");
    EXPECT_EQ(std::get<Emph>(c[12].value).rend, "italic");
    EXPECT_EQ(std::get<Link>(c[14].value).target, "http://x.org");
}

TEST(ParseArticle, UnknownHeaderElementDroppedWithWarning) {
    std::string doc = testing::read_data("skeleton_completed.xml");
    doc.replace(doc.find("<revisionDesc>"), 0, "<encodingDesc><p>x</p></encodingDesc>");
    auto r = parse_article(doc);
    ASSERT_TRUE(r.ok());
    EXPECT_TRUE(has_warning(r, "encodingDesc"));
}

TEST(ParseArticle, NonUtf8IsError) {
    auto r = parse_article(R"(<?xml version="1.0" encoding="ISO-8859-1"?><TEI/>)");
    EXPECT_FALSE(r.ok());
}

TEST(ParseArticle, IssuePathsResolveInInput) {
    std::string doc = testing::read_data("skeleton_completed.xml");
    doc.replace(doc.find("<revisionDesc>"), 0, "<encodingDesc/>");
    doc.replace(doc.find("<date when=\"2009-02-03\"/>"), 0, "<junk/>");
    auto r = parse_article(doc);
    auto tree = xml::parse(doc);
    ASSERT_GE(r.issues.size(), 3u);
    for (const auto& i : r.issues) {
        EXPECT_NE(xml::find_by_path(tree.root, i.location), nullptr) << i.location;
    }
}

TEST(ParseArticle, BadChangeDateIsError) {
    std::string doc = testing::read_data("skeleton_completed.xml");
    doc.replace(doc.find("2008-12-01"), 10, "2008-13-01");
    auto r = parse_article(doc);
    EXPECT_FALSE(r.ok());
}

TEST(Serialize, RoundTripFixpointOnSkeleton) {
    const auto& a = testing::skeleton();
    auto out = serialize_article(a);
    auto r = parse_article(out, a.source_path);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(*r.outcome, a);
    EXPECT_EQ(serialize_article(*r.outcome), out);
}

TEST(Serialize, EmptyFrontOmitted) {
    Article a = testing::skeleton();
    a.front.clear();
    auto out = serialize_article(a);
    EXPECT_EQ(out.find("<front"), std::string::npos);
    EXPECT_NE(out.find("<body"), std::string::npos);
}

TEST(Serialize, OpaqueTableByteIdentical) {
    std::string table =
        "<table rows=\"2\"  cols=\"1\">\n   <head>Results</head><row><cell>a &amp; b</cell></row>\n"
        "<row ><cell>c</cell></row></table>";
    auto input = wrap_body("<div><p>x</p>" + table + "</div>");
    auto a = parsed_ok(parse_article(input));
    const auto& t = std::get<TableBlock>(a.body[0].blocks.at(1).value);
    EXPECT_EQ(t.markup, table);
    EXPECT_EQ(normalize_title(t.caption), "Results");
    auto out = serialize_article(a);
    EXPECT_NE(out.find(table), std::string::npos);
    auto again = parse_article(out);
    ASSERT_TRUE(again.ok());
    EXPECT_EQ(again.outcome->body, a.body);
}

TEST(Serialize, ForeignNamespacesRedeclared) {
    auto input = wrap_body(
        R"(<div><formula notation="mathml"><m:math xmlns:m="http://www.w3.org/1998/Math/MathML"><m:mi>x</m:mi></m:math></formula>)"
        R"(<p>see <svg:rect xmlns:svg="http://www.w3.org/2000/svg" width="1"/></p></div>)");
    auto a = parsed_ok(parse_article(input));
    auto out = serialize_article(a);
    auto again = parse_article(out);
    ASSERT_TRUE(again.ok());
    EXPECT_EQ(*again.outcome, a);
}

TEST(Serialize, ImplicitDivisionsAndBack) {
    auto input = wrap_body(
        "<p>loose</p><div type=\"section\"><head>H</head><p>a</p><div><p>nested</p></div></div><p>tail</p>",
        R"(<back><div type="acknowledgements"><p>thanks</p></div><div type="references"><head>References</head>)"
        R"(<listBibl><biblStruct xml:id="b1"><monogr><title>X</title></monogr></biblStruct></listBibl></div>)"
        R"(<note>n1</note></back>)");
    auto a = parsed_ok(parse_article(input));
    ASSERT_EQ(a.body.size(), 3u);
    EXPECT_TRUE(a.body[0].implicit);
    EXPECT_FALSE(a.body[1].implicit);
    EXPECT_EQ(a.body[1].children.size(), 1u);
    EXPECT_TRUE(a.body[2].implicit);
    EXPECT_EQ(a.back.divisions.size(), 1u);
    EXPECT_EQ(a.back.notes.size(), 1u);
    auto again = parse_article(serialize_article(a));
    ASSERT_TRUE(again.ok());
    EXPECT_EQ(*again.outcome, a);
}

TEST(Serialize, Deterministic) {
    Article a = testing::skeleton();
    Article b = testing::skeleton();
    EXPECT_EQ(serialize_article(a), serialize_article(b));
}

TEST(ElementName, CoversKinds) {
    EXPECT_EQ(element_name(Block(Paragraph{})), "p");
    EXPECT_EQ(element_name(Block(OpaqueBlock{"m:math", "", ""})), "m:math");
    EXPECT_FALSE(element_name(Inline(TextRun{"x"})));
    EXPECT_EQ(*element_name(Inline(AbbrMention{"A", "B"})), "choice");
    EXPECT_EQ(*element_name(Inline(AbbrMention{"A", std::nullopt})), "abbr");
}

}  // namespace
}  // namespace tj
