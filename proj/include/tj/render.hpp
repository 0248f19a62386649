#pragma once

// Bibliography formatting and article rendering (XHTML and plain text).
//
// A style guide is data: per document type, an ordered list of segments,
// each naming a field of the record plus typography and surrounding text.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tj/model.hpp"
#include "tj/xml.hpp"

namespace tj::render {

enum class MarkerScheme { numeric_bracket, author_date };
enum class ListOrder { alphabetical, citation_order };
enum class NameFormat { surname_first_initials, surname_first_full, as_encoded };
enum class Typography { plain, italic, quoted };

// Field paths: authors, title, analytic.title, monogr.title, monogr.issn,
// imprint.publisher, imprint.pub_place, imprint.year, imprint.date,
// scope.vol, scope.issue, scope.pages, scope.pp, idno.<kind>.
struct Segment {
    std::string path;
    Typography typography = Typography::plain;
    std::string prefix;
    std::string suffix;
    // When false, an absent field still emits its prefix and suffix.
    bool omit_if_absent = true;
    bool operator==(const Segment&) const = default;
};

bool is_known_field(std::string_view path);

struct StyleGuide {
    std::string id;
    MarkerScheme marker_scheme = MarkerScheme::numeric_bracket;
    ListOrder list_order = ListOrder::citation_order;
    NameFormat author_name_format = NameFormat::surname_first_full;
    std::map<std::string, std::vector<Segment>> layouts;  // must contain "unknown"

    // Exact doc_type, then article/journalArticle as aliases, then "unknown".
    const std::vector<Segment>& layout(const DocumentType& type) const;

    // Throws Error on unknown keys, tokens or field paths.
    static StyleGuide from_json(std::string_view text);
    std::string to_json() const;
    bool operator==(const StyleGuide&) const = default;
};

const std::vector<std::string>& builtin_style_ids();  // apa, chicago, mla
const StyleGuide& builtin_style(std::string_view id);  // throws Error
// A builtin id, or a path to a style file.
StyleGuide resolve_style(const std::string& id_or_path);

enum class Mark { plain, italic, range_dash };

struct Span {
    std::string text;
    Mark mark = Mark::plain;
    bool operator==(const Span&) const = default;
};

struct SortKey {
    std::string surname;  // casefolded; the title when there are no authors
    std::optional<int> year;
    std::string title;  // casefolded, whitespace-normalized
    auto operator<=>(const SortKey&) const = default;
};

struct RenderedEntry {
    std::vector<Span> spans;
    SortKey sort_key;

    std::string text() const;      // range dash as "-", no emphasis
    std::string markdown() const;  // *italic*, range dash as en-dash
    bool operator==(const RenderedEntry&) const = default;
};

// Throws Error when the record has no title at all.
RenderedEntry format_entry(const BiblStruct& b, const StyleGuide& guide);

std::string format_authors(const std::vector<Author>& authors, NameFormat format);

struct ListedEntry {
    std::optional<std::string> label;  // "[1]" for numeric schemes
    std::string id;                    // xml:id, empty when the entry has none
    RenderedEntry entry;
};

// Unknown ids in citation_order are ignored.
std::vector<ListedEntry> format_reference_list(const ListBibl& list, const StyleGuide& guide,
                                               const std::vector<std::string>& citation_order);

// Fragment ids of resolvable citations (BiblRef inlines and cit pointers) in
// document order, repeats included.
std::vector<std::string> citation_order(const Article& article);

// "(Dean 2009)", "(Dean and Kotz 2008)", "(Dean et al. 2009)".
std::string author_date_marker(const BiblStruct& b);

// Appends the entry's spans as XHTML content (em for italics).
void append_entry(xml::Element& parent, const RenderedEntry& entry);

std::string render_xhtml(const Article& article, const StyleGuide& guide);

// Uses the chicago tables for the reference list; markers are always "[n]".
std::string render_plaintext(const Article& article);

}  // namespace tj::render
