#pragma once

// Corpus-driven restricted schemas: profile what encoders actually use,
// codify it, find competing spellings of the same attribute value, and
// rewrite a corpus onto one spelling.
//
// Element keys are TEI local names ("hi"); elements in other namespaces are
// keyed "{uri}local" and treated as opaque (their content is not profiled).
// Attribute keys are the local name for unqualified attributes, "xml:id" for
// the XML namespace and "{uri}local" otherwise.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tj/finding.hpp"
#include "tj/xml.hpp"

namespace tj::schema {

std::string element_key(const xml::Element& e);
std::string attribute_key(const xml::Attribute& a);

struct ElementUsage {
    std::size_t count = 0;
    std::map<std::string, std::size_t> child_counts;
    // Occurrences of this element having at least one child of the given name.
    std::map<std::string, std::size_t> parents_with_child;
    std::map<std::string, std::map<std::string, std::size_t>> attribute_values;
    bool text = false;
    bool foreign = false;

    bool operator==(const ElementUsage&) const = default;
};

struct UsageProfile {
    std::size_t documents = 0;
    std::map<std::string, std::size_t> roots;
    std::map<std::string, ElementUsage> elements;

    bool empty() const { return elements.empty(); }
    // Commutative and associative.
    void merge(const UsageProfile& other);
    bool operator==(const UsageProfile&) const = default;
};

UsageProfile profile_document(const xml::Element& root);
UsageProfile profile_corpus(const std::vector<xml::Document>& docs);

struct CodifyOptions {
    std::set<std::string> enumerable_attributes{"type", "level", "rend", "unit"};
    std::size_t enumeration_cap = 20;
    double required_child_threshold = 1.0;

    void check() const;  // throws Error on cap < 1 or threshold outside (0, 1]
};

struct AttributeRule {
    bool required = false;
    std::optional<std::set<std::string>> values;  // nullopt: any value
    bool operator==(const AttributeRule&) const = default;
};

struct ElementRule {
    std::set<std::string> children;
    std::set<std::string> required_children;
    std::map<std::string, AttributeRule> attributes;
    bool text = false;
    bool foreign = false;
    bool operator==(const ElementRule&) const = default;
};

struct RestrictedSchema {
    std::string root;
    std::map<std::string, ElementRule> elements;

    bool empty() const { return elements.empty(); }
    const ElementRule* rule(const std::string& key) const;

    // Deterministic JSON with sorted keys and a trailing newline.
    std::string to_json() const;
    static RestrictedSchema from_json(std::string_view text);  // throws Error
    bool operator==(const RestrictedSchema&) const = default;
};

// The journal-subset superset standing in for the full TEI schema.
const RestrictedSchema& base_schema();

RestrictedSchema codify(const UsageProfile& profile, const CodifyOptions& options = {});

// Finding codes: schema-root, schema-element, schema-child, schema-attribute,
// schema-value, schema-text, schema-required-child, schema-required-attribute.
// With a base schema, constructs it permits are reported as warnings.
std::vector<Finding> validate_against(const RestrictedSchema& schema, const xml::Element& root,
                                      const RestrictedSchema* base = nullptr);

// Constructs permitted by `narrow` that `wide` does not permit, one line each.
std::vector<std::string> not_permitted(const RestrictedSchema& narrow, const RestrictedSchema& wide);

struct VariantCluster {
    std::string element;
    std::string attribute;
    std::string key;
    std::map<std::string, std::size_t> members;

    std::size_t total() const;
    bool operator==(const VariantCluster&) const = default;
};

// casefold, strip one trailing "s", collapse runs of '-', '_' and whitespace to "-".
std::string normalize_variant(std::string_view value);

std::vector<VariantCluster> detect_variants(const UsageProfile& profile,
                                            const std::set<std::string>& attributes = CodifyOptions{}.enumerable_attributes);

struct RewriteRule {
    std::string element;  // element key or "*"
    std::string attribute;
    std::string from;
    std::string to;
    bool operator==(const RewriteRule&) const = default;
};

// One rule per line: `element attribute from -> to`. Values may be double-quoted.
// Blank lines and lines starting with '#' are ignored. Throws Error with the
// line number on malformed input.
std::vector<RewriteRule> parse_rules(std::string_view text);

// Throws Error if two rules can apply to the same attribute with different results.
void check_rules(const std::vector<RewriteRule>& rules);

struct ArbitrationResult {
    std::vector<std::string> sources;  // one per input document
    std::size_t changes = 0;
    std::vector<std::size_t> changes_per_document;
};

// Rewrites matching attribute values in place in each document's source
// bytes; nothing else changes. Rules are applied in a single pass, so one
// rule's output is never matched by another. Calls check_rules first.
ArbitrationResult arbitrate(const std::vector<xml::Document>& docs, const std::vector<RewriteRule>& rules);

}  // namespace tj::schema
