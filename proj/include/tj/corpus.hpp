#pragma once

// A directory of articles and the products derived from it: indexes, a
// unified bibliography, corrigenda and structural queries.
//
// Locators and query hits are element paths into each article's canonical
// serialization (see tj/paths.hpp).

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tj/model.hpp"
#include "tj/render.hpp"
#include "tj/xml_io.hpp"

namespace tj::corpus {

struct LoadRecord {
    std::string path;
    std::string id;  // empty when the file did not parse
    ParseReport report;
    bool accepted = false;
    bool operator==(const LoadRecord&) const = default;
};

struct Corpus {
    std::map<std::string, Article> articles;
    std::vector<LoadRecord> records;  // one per input file, sorted by path

    const Article* find(const std::string& id) const;
    std::size_t size() const { return articles.size(); }
    bool operator==(const Corpus&) const = default;
};

// Files are parsed concurrently. Nothing throws: unreadable or malformed
// files and duplicate ids end up as error reports with no article. Paths are
// sorted first, so of two files with the same id the one with the smaller
// path wins whatever order they were given in.
Corpus load_corpus(std::vector<std::filesystem::path> paths);
Corpus load_directory(const std::filesystem::path& dir);  // throws Error if unreadable

// Throws Error on duplicate ids.
Corpus from_articles(std::vector<Article> articles);

// Element path ordering: segment by segment, names lexically, indexes numerically.
bool path_less(std::string_view a, std::string_view b);

struct Locator {
    std::string id;
    std::string path;

    bool operator==(const Locator&) const = default;
    bool operator<(const Locator& o) const { return id != o.id ? id < o.id : path_less(path, o.path); }
};

inline const std::set<std::string> kIndexKinds = {"abbreviation", "author", "keyword", "organization",
                                                  "person",       "place",  "software"};

struct IndexEntry {
    std::string kind;
    std::string key;      // casefolded, whitespace-collapsed
    std::string display;  // most frequent original form; ties to the smallest
    std::vector<Locator> locators;

    bool operator==(const IndexEntry&) const = default;
};

// Throws Error on kinds outside kIndexKinds.
std::vector<IndexEntry> build_indexes(const Corpus& c, const std::set<std::string>& kinds = kIndexKinds);

struct UnifiedEntry {
    std::string key;
    BiblStruct record;  // first occurrence by article id
    std::vector<std::string> citing;
};

// "doi:<lowercased doi>", else "ref:<surname>|<year>|<title>" casefolded.
std::string dedup_key(const BiblStruct& b);
std::vector<UnifiedEntry> unified_bibliography(const Corpus& c);

struct CorrigendaEntry {
    std::string article_id;
    CalendarDate when;
    RichText description;

    bool operator==(const CorrigendaEntry&) const = default;
};

// Changes of the given kind, newest first, then by article id.
std::vector<CorrigendaEntry> corrigenda(const Corpus& c, const std::string& kind = "correction");

enum class NodeKind { person, organization, place, term, abbreviation, paragraph, heading, any };

// Accepts person, org, organization, place, term, abbr, abbreviation (each
// also with a "-mention" suffix), paragraph, heading and any.
std::optional<NodeKind> node_kind_from_string(std::string_view s);
std::string to_string(NodeKind k);

struct Query {
    std::optional<NodeKind> kind;  // any when unset
    std::optional<std::string> text;
    std::optional<std::pair<CalendarDate, CalendarDate>> date_range;
    std::optional<std::string> cites_surname;

    bool valid() const { return kind || text || date_range || cites_surname; }
};

struct QueryHit {
    std::string id;
    std::string path;
    std::string snippet;

    bool operator==(const QueryHit&) const = default;
    bool operator<(const QueryHit& o) const { return Locator{id, path} < Locator{o.id, o.path}; }
};

// Node kinds cover the <text> part only. Snippets are the node's normalized
// text; an abbreviation with an expansion reads "AMD (age related ...)".
// Throws Error for an empty query.
std::vector<QueryHit> query(const Corpus& c, const Query& q);

// Overlap of the days covered by d with [from, to].
bool date_in_range(const CalendarDate& d, const CalendarDate& from, const CalendarDate& to);

// Cross-document pages.
std::string index_xhtml(const std::vector<IndexEntry>& entries);
std::string unibib_xhtml(const std::vector<UnifiedEntry>& entries, const render::StyleGuide& guide);
std::string corrigenda_xhtml(const std::vector<CorrigendaEntry>& entries);

}  // namespace tj::corpus
