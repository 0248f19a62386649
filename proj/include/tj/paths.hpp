#pragma once

// Element paths into the canonical serialization of an Article.
//
// Validator findings, index locators and query hits all point at the element
// that serialize_article() would write for a model node, so a path taken from
// any of them resolves with xml::find_by_path() on the reparsed output.

#include <string>
#include <vector>

#include "tj/model.hpp"

namespace tj::paths {

std::string header();
std::string file_desc();
std::string title_stmt();
std::string main_title();  // titleStmt/title
std::string publication_stmt();
std::string source_desc();
std::string source(std::size_t index);  // 0-based
std::string profile_desc();
std::string revision_desc();
std::string change(std::size_t index);
std::string text();
std::string body();

// Path of the <term> for each keyword, in ProfileDesc order.
std::vector<std::string> keywords(const ProfileDesc& profile);

// Paths relative to a biblStruct path.
std::string analytic(const std::string& bibl);
std::string analytic_title(const std::string& bibl, std::size_t index);
std::string analytic_author(const std::string& bibl, std::size_t index);
std::string monogr(const std::string& bibl);
std::string monogr_title(const std::string& bibl, std::size_t index);
std::string monogr_author(const std::string& bibl, std::size_t index);
std::string scope(const std::string& bibl, std::size_t index);
// Primary authors of `b` (analytic authors, else container authors).
std::string primary_author(const std::string& bibl, const BiblStruct& b, std::size_t index);

enum class Region { front, body, back };

// Callbacks for the <text> part of an article, in document order.
class TextVisitor {
  public:
    virtual ~TextVisitor() = default;
    virtual void division(const Division&, Region, const std::string& /*path*/) {}
    virtual void heading(const RichText&, const std::string& /*path*/) {}
    virtual void block(const Block&, const std::string& /*path*/) {}
    // Element inlines only; plain text runs are not visited.
    virtual void inline_node(const Inline&, const std::string& /*path*/) {}
    // Records embedded in cit and figure blocks, and reference-list entries.
    virtual void bibl(const BiblStruct&, const std::string& /*path*/) {}
    virtual void note(const RichText&, const std::string& /*path*/) {}
};

void walk_text(const Article& article, TextVisitor& visitor);

}  // namespace tj::paths
