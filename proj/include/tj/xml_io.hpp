#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tj/finding.hpp"
#include "tj/model.hpp"
#include "tj/xml.hpp"

namespace tj {

struct Issue {
    Severity severity = Severity::error;
    std::string location;  // SourcePath into the input tree
    std::string message;

    bool operator==(const Issue&) const = default;
};

// Outcome is present iff no issue has error severity.
struct ParseReport {
    std::vector<Issue> issues;
    std::optional<Article> outcome;

    bool ok() const { return outcome.has_value(); }
    std::size_t error_count() const;
    bool operator==(const ParseReport&) const = default;
};

// Parses a complete TEI file. Elements outside the modelled subset are kept
// verbatim when they occur in <text> and dropped with a warning in the header.
ParseReport parse_article(std::string bytes, const std::optional<std::string>& source_path = std::nullopt);
ParseReport parse_article(const xml::Document& doc, const std::optional<std::string>& source_path = std::nullopt);

// Canonical UTF-8 TEI serialization.
std::string serialize_article(const Article& article);
xml::Element to_tei(const Article& article);

// Element names used for model nodes in the canonical serialization.
std::string element_name(const Block& block);
std::optional<std::string> element_name(const Inline& in);  // nullopt for plain text runs

}  // namespace tj
