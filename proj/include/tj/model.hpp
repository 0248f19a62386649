#pragma once

// In-memory model of a TEI journal article.
//
// Everything here is a plain value type with structural equality. Rich text
// is an ordered sequence of inlines; flat fields (tokens, org unit names) are
// plain strings. Tables and formulae are kept as the markup they were written
// in and never interpreted.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

#include "tj/xml.hpp"

namespace tj {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class DatePrecision { year, month, day };

// ISO 8601 calendar date at year, month or day precision.
struct CalendarDate {
    DatePrecision precision = DatePrecision::year;
    int year = 0;
    std::optional<int> month;
    std::optional<int> day;
    std::string raw;

    // Accepts YYYY, YYYY-MM and YYYY-MM-DD with range checks (leap years included).
    static std::optional<CalendarDate> parse(std::string_view s);
    static CalendarDate ymd(int y, int m, int d);

    // (year, month, day) of the first and last day covered by the date.
    std::tuple<int, int, int> first_day() const;
    std::tuple<int, int, int> last_day() const;

    bool operator==(const CalendarDate&) const = default;
};

// Orders by first day covered; coarser precision first on ties.
bool date_before(const CalendarDate& a, const CalendarDate& b);

struct Inline;
using RichText = std::vector<Inline>;

struct TextRun {
    std::string text;
    bool operator==(const TextRun&) const = default;
};

struct Emph {
    std::string rend;
    RichText content;
    bool operator==(const Emph&) const = default;
};

struct RefTarget {
    std::string uri;

    // The part after '#'. Throws Error when the target is not a local fragment.
    std::string fragment() const;
    bool is_fragment() const { return uri.size() > 1 && uri.front() == '#'; }
    bool operator==(const RefTarget&) const = default;
};

struct BiblRef {
    RefTarget target;
    std::string text;  // text as encoded; renderers generate their own markers
    bool operator==(const BiblRef&) const = default;
};

enum class NameKind { person, organization, place };

struct NameMention {
    NameKind kind = NameKind::person;
    std::string text;
    std::optional<std::string> key;
    bool operator==(const NameMention&) const = default;
};

struct TermMention {
    std::optional<std::string> kind;  // "software", "keyword", ...
    std::string text;
    bool operator==(const TermMention&) const = default;
};

struct AbbrMention {
    std::string abbr;
    std::optional<std::string> expansion;
    bool operator==(const AbbrMention&) const = default;
};

struct Link {
    std::string target;
    std::string text;
    bool operator==(const Link&) const = default;
};

// Unknown inline element, kept verbatim.
struct OpaqueInline {
    std::string qname;
    std::string markup;
    std::string text;
    bool operator==(const OpaqueInline&) const = default;
};

struct Inline {
    std::variant<TextRun, Emph, BiblRef, NameMention, TermMention, AbbrMention, Link, OpaqueInline> value;

    template <typename T>
        requires(!std::is_same_v<std::decay_t<T>, Inline> && std::is_constructible_v<decltype(value), T>)
    Inline(T v) : value(std::move(v)) {}

    bool operator==(const Inline&) const = default;
};

RichText plain(std::string s);

// Inline markup removed, text concatenated, nothing normalized.
std::string flatten(const RichText& rich);

// flatten() followed by whitespace normalization.
std::string normalize_title(const RichText& rich);

// ---------------------------------------------------------------------------
// Bibliographic records

struct Identifier {
    std::string kind;
    std::string value;
    bool operator==(const Identifier&) const = default;
};

struct Title {
    std::string level;  // a, j, m
    std::string type;   // main, subordinate, abbreviated, or open registry tokens
    RichText text;
    bool operator==(const Title&) const = default;
};

struct OrgUnit {
    std::string kind;
    std::string name;
    bool operator==(const OrgUnit&) const = default;
};

struct AddressLine {
    std::optional<std::string> kind;  // phone, fax, plain
    std::string text;
    bool operator==(const AddressLine&) const = default;
};

struct Address {
    std::optional<std::string> settlement;
    std::optional<std::string> post_code;
    std::optional<std::string> country;
    std::vector<AddressLine> lines;
    bool operator==(const Address&) const = default;
};

// Org units run from most to least specific.
struct Affiliation {
    std::vector<OrgUnit> org_units;
    std::optional<Address> address;
    bool operator==(const Affiliation&) const = default;
};

// Organizational authors carry the full name in surname and no forenames.
struct Author {
    bool corresponding = false;
    std::vector<Identifier> identifiers;
    std::vector<std::string> forenames;
    std::string surname;
    std::optional<Affiliation> affiliation;
    std::optional<std::string> email;

    bool is_organization() const { return forenames.empty(); }
    std::string display_name() const;  // "Michael Dean"
    bool operator==(const Author&) const = default;
};

const Title* find_main_title(const std::vector<Title>& titles);
std::size_t count_main_titles(const std::vector<Title>& titles);

struct Analytic {
    std::vector<Title> titles;
    std::vector<Author> authors;
    bool operator==(const Analytic&) const = default;
};

inline const std::vector<std::string_view> kScopeKinds = {"vol", "issue", "fpage", "lpage", "pp"};

struct Scope {
    std::string kind;
    std::string value;
    bool operator==(const Scope&) const = default;
};

struct ImprintDate {
    CalendarDate date;
    std::string role = "published";
    bool operator==(const ImprintDate&) const = default;
};

struct Imprint {
    std::optional<std::string> publisher;
    std::optional<std::string> pub_place;
    std::optional<ImprintDate> date;
    std::vector<Scope> scopes;

    const Scope* scope(std::string_view kind) const;
    bool operator==(const Imprint&) const = default;
};

struct Monogr {
    std::vector<Author> container_authors;
    std::vector<Title> titles;
    std::optional<std::string> issn;
    std::vector<Identifier> identifiers;  // other than ISSN
    Imprint imprint;
    bool operator==(const Monogr&) const = default;
};

// Extensible document-type token. Unrecognized values are kept verbatim and
// classified as unknown.
struct DocumentType {
    std::string value = "unknown";

    static const std::vector<std::string>& seeded();
    bool is_known() const;
    bool is_article() const { return value == "article" || value == "journalArticle"; }
    bool operator==(const DocumentType&) const = default;
};

struct BiblStruct {
    DocumentType doc_type;
    std::optional<Analytic> analytic;
    Monogr monogr;
    std::vector<Identifier> identifiers;
    std::optional<std::string> xml_id;

    // Analytic main title when there is one, else the monogr main title.
    const Title* main_title() const;
    // Analytic authors, or the container authors for works cited whole.
    const std::vector<Author>& primary_authors() const;
    std::optional<std::string> identifier(std::string_view kind) const;  // case-insensitive kind
    std::optional<std::string> doi() const { return identifier("DOI"); }
    std::optional<int> year() const;
    bool operator==(const BiblStruct&) const = default;
};

// ---------------------------------------------------------------------------
// Text structure

struct Paragraph {
    RichText content;
    bool operator==(const Paragraph&) const = default;
};

struct CitBlock {
    RichText quote;
    std::variant<BiblStruct, RefTarget> source;
    RichText qualifiers;
    bool operator==(const CitBlock&) const = default;
};

struct FigureBlock {
    std::string graphic;
    RichText caption;
    std::optional<BiblStruct> source;
    bool operator==(const FigureBlock&) const = default;
};

struct TableBlock {
    std::string markup;
    RichText caption;
    bool operator==(const TableBlock&) const = default;
};

struct FormulaBlock {
    std::string markup;
    std::string notation;
    bool operator==(const FormulaBlock&) const = default;
};

struct ListBlock {
    std::vector<RichText> items;
    bool operator==(const ListBlock&) const = default;
};

struct QuoteBlock {
    RichText content;
    bool operator==(const QuoteBlock&) const = default;
};

struct OpaqueBlock {
    std::string qname;
    std::string markup;
    std::string text;
    bool operator==(const OpaqueBlock&) const = default;
};

struct Block {
    std::variant<Paragraph, CitBlock, FigureBlock, TableBlock, FormulaBlock, ListBlock, QuoteBlock, OpaqueBlock> value;

    template <typename T>
        requires(!std::is_same_v<std::decay_t<T>, Block> && std::is_constructible_v<decltype(value), T>)
    Block(T v) : value(std::move(v)) {}

    bool operator==(const Block&) const = default;
};

struct Division {
    std::string kind = "section";
    std::optional<RichText> head;
    std::vector<Block> blocks;
    std::vector<Division> children;
    // Loose blocks written directly inside front/body/back, with no div.
    bool implicit = false;
    bool operator==(const Division&) const = default;
};

// ---------------------------------------------------------------------------
// Header

struct Keyword {
    std::string term;
    std::optional<std::string> scheme;
    bool operator==(const Keyword&) const = default;
};

struct ProfileDesc {
    std::vector<Keyword> keywords;
    std::vector<std::string> languages;
    bool operator==(const ProfileDesc&) const = default;
};

struct Change {
    CalendarDate when;
    std::string kind;  // lowercase: received, accepted, published, correction, ...
    RichText description;
    bool operator==(const Change&) const = default;
};

struct RevisionDesc {
    std::vector<Change> changes;
    bool operator==(const RevisionDesc&) const = default;
};

struct FileDesc {
    bool has_title_stmt = true;
    bool has_publication_stmt = true;
    bool has_source_desc = true;
    RichText main_title;
    RichText availability;
    std::optional<CalendarDate> publication_date;
    std::string authority;
    // Exactly one record for a valid article; kept as a list so that a
    // malformed header is still representable.
    std::vector<BiblStruct> sources;

    const BiblStruct* source() const { return sources.empty() ? nullptr : &sources.front(); }
    bool operator==(const FileDesc&) const = default;
};

struct Header {
    std::optional<FileDesc> file_desc;
    ProfileDesc profile_desc;
    RevisionDesc revision_desc;
    bool operator==(const Header&) const = default;
};

struct ListBibl {
    std::vector<BiblStruct> entries;
    bool operator==(const ListBibl&) const = default;
};

struct BackMatter {
    std::vector<Division> divisions;
    std::optional<ListBibl> reference_list;
    std::vector<RichText> notes;

    bool empty() const { return divisions.empty() && !reference_list && notes.empty(); }
    bool operator==(const BackMatter&) const = default;
};

struct Article {
    std::string id;
    Header header;
    std::vector<Division> front;
    std::vector<Division> body;
    BackMatter back;
    std::optional<std::string> source_path;
    // Prefixed namespaces needed by verbatim markup.
    std::vector<xml::NamespaceDecl> namespaces;

    const BiblStruct* source() const { return header.file_desc ? header.file_desc->source() : nullptr; }
    bool operator==(const Article&) const = default;
};

// Imprint date of the source description, if any.
std::optional<CalendarDate> document_date(const Article& article);

// Reference-list entry for a "#id" target; nullptr when there is none.
// Throws Error when the target is not a local fragment.
const BiblStruct* resolve_ref(const Article& article, const RefTarget& target);

// First DOI of the source description, else the file basename without extension.
std::string derive_article_id(const Article& article, const std::optional<std::string>& source_path);

}  // namespace tj
