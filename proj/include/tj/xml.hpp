#pragma once

// Minimal namespace-aware XML tree with source offsets, plus a writer.
//
// Parsing is backed by expat. Document type declarations are refused, so the
// only entities ever expanded are the five XML built-ins and character
// references. Every element keeps the byte range it occupied in the input,
// which lets callers lift verbatim markup out of a document or patch single
// attribute values without touching anything else.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tj::xml {

inline constexpr std::string_view kTeiNamespace = "http://www.tei-c.org/ns/1.0";
inline constexpr std::string_view kXmlNamespace = "http://www.w3.org/XML/1998/namespace";
inline constexpr std::string_view kXhtmlNamespace = "http://www.w3.org/1999/xhtml";

struct SourceRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const SourceRange&) const = default;
};

struct Attribute {
    std::string ns;     // namespace URI, empty for unqualified attributes
    std::string local;
    std::string qname;  // as written in the source, or as it should be written
    std::string value;
    SourceRange value_range;  // raw bytes between the quotes; empty for built trees
};

struct Node;

struct Element {
    std::string ns;
    std::string local;
    std::string qname;
    std::vector<Attribute> attributes;
    std::vector<Node> children;

    SourceRange range;      // from '<' of the start tag to the end of the end tag
    SourceRange start_tag;
    std::size_t line = 0;
    std::size_t sibling_index = 1;  // 1-based among same-qname siblings

    // Writer hint: content is written inline with no added whitespace.
    bool mixed = false;

    Element() = default;
    explicit Element(std::string name) : local(name), qname(std::move(name)) {}

    const Attribute* attribute(std::string_view local_name, std::string_view ns_uri = {}) const;
    std::string attribute_or(std::string_view local_name, std::string_view fallback = {}) const;
    bool is(std::string_view local_name) const;  // TEI-namespace element with this local name

    Element& set(std::string name, std::string value);
    Element& add(Element child);
    Element& add_text(std::string text);
    Element& add_raw(std::string markup);

    std::vector<const Element*> child_elements() const;
    const Element* first_child(std::string_view local_name) const;
    std::vector<const Element*> children_named(std::string_view local_name) const;
    bool has_significant_text() const;

    // Concatenated character data of this element and all descendants.
    std::string text() const;
};

struct Text {
    std::string value;
};

// Pre-serialized markup emitted verbatim by the writer.
struct Raw {
    std::string markup;
};

struct Node {
    std::variant<Element, Text, Raw> value;

    Node(Element e) : value(std::move(e)) {}
    Node(Text t) : value(std::move(t)) {}
    Node(Raw r) : value(std::move(r)) {}

    const Element* element() const { return std::get_if<Element>(&value); }
    Element* element() { return std::get_if<Element>(&value); }
    const Text* text() const { return std::get_if<Text>(&value); }
};

struct NamespaceDecl {
    std::string prefix;
    std::string uri;
    bool operator==(const NamespaceDecl&) const = default;
};

struct Document {
    std::string source;
    Element root;
    // Prefixed namespace declarations seen anywhere in the document, first
    // binding wins, in order of appearance.
    std::vector<NamespaceDecl> prefixed_namespaces;

    std::string_view slice(SourceRange r) const { return std::string_view(source).substr(r.begin, r.size()); }
};

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(std::string message, std::size_t line, std::size_t column, std::string path)
        : std::runtime_error(std::move(message)), line_(line), column_(column), path_(std::move(path)) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    // Path of the innermost open element when the error was detected.
    const std::string& path() const { return path_; }

  private:
    std::size_t line_;
    std::size_t column_;
    std::string path_;
};

// Throws SyntaxError on malformed input, DTDs, or non-UTF-8 encodings.
Document parse(std::string source);

// Path segment for an element, e.g. "div[2]".
std::string path_segment(const Element& e);

// Visits every element in document order with its path ("TEI[1]/text[1]").
void walk(const Element& root, const std::function<void(const Element&, const std::string&)>& visit);

// Resolves a path produced by walk(). Returns nullptr when nothing matches.
const Element* find_by_path(const Element& root, std::string_view path);

struct WriteOptions {
    bool declaration = true;
    bool indent = true;
};

std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s);

// Element-only content is indented by two spaces per level; elements that are
// mixed (or contain text) are written inline. Attributes are sorted by name.
std::string write(const Element& root, const WriteOptions& options = {});

}  // namespace tj::xml
