#include "tj/xml.hpp"

#include <expat.h>

#include <algorithm>
#include <map>
#include <memory>

namespace tj::xml {

namespace {

constexpr char kSeparator = '\x01';

struct SplitName {
    std::string ns;
    std::string local;
    std::string prefix;
};

SplitName split_expanded(const char* raw) {
    std::string_view s(raw);
    SplitName out;
    auto first = s.find(kSeparator);
    if (first == std::string_view::npos) {
        out.local = std::string(s);
        return out;
    }
    out.ns = std::string(s.substr(0, first));
    auto second = s.find(kSeparator, first + 1);
    if (second == std::string_view::npos) {
        out.local = std::string(s.substr(first + 1));
    } else {
        out.local = std::string(s.substr(first + 1, second - first - 1));
        out.prefix = std::string(s.substr(second + 1));
    }
    return out;
}

std::string qualified(const SplitName& n) {
    if (n.ns == kXmlNamespace) return "xml:" + n.local;
    return n.prefix.empty() ? n.local : n.prefix + ":" + n.local;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Locates the raw value of every attribute inside a well-formed start tag.
std::map<std::string, SourceRange> scan_attribute_ranges(std::string_view source, SourceRange tag) {
    std::map<std::string, SourceRange> ranges;
    std::size_t i = tag.begin + 1;
    while (i < tag.end && !is_space(source[i]) && source[i] != '>' && source[i] != '/') ++i;
    while (i < tag.end) {
        while (i < tag.end && is_space(source[i])) ++i;
        if (i >= tag.end || source[i] == '>' || source[i] == '/') break;
        std::size_t name_begin = i;
        while (i < tag.end && !is_space(source[i]) && source[i] != '=') ++i;
        std::string name(source.substr(name_begin, i - name_begin));
        while (i < tag.end && (is_space(source[i]) || source[i] == '=')) ++i;
        if (i >= tag.end) break;
        char quote = source[i++];
        std::size_t value_begin = i;
        while (i < tag.end && source[i] != quote) ++i;
        ranges[name] = SourceRange{value_begin, i};
        ++i;
    }
    return ranges;
}

struct OpenElement {
    Element element;
    std::map<std::string, std::size_t> child_counts;
};

struct ParseContext {
    XML_Parser parser = nullptr;
    const std::string* source = nullptr;
    std::vector<OpenElement> stack;
    Element root;
    bool have_root = false;
    std::vector<NamespaceDecl> namespaces;
    std::string error;

    std::string current_path() const {
        std::string path;
        for (const auto& open : stack) {
            if (!path.empty()) path += '/';
            path += path_segment(open.element);
        }
        return path;
    }

    void fail(std::string message) {
        if (error.empty()) error = std::move(message);
        XML_StopParser(parser, XML_FALSE);
    }
};

void on_start(void* data, const char* name, const char** attrs) {
    auto& ctx = *static_cast<ParseContext*>(data);
    Element e;
    auto split = split_expanded(name);
    e.qname = qualified(split);
    e.ns = std::move(split.ns);
    e.local = std::move(split.local);
    e.line = XML_GetCurrentLineNumber(ctx.parser);
    auto begin = static_cast<std::size_t>(XML_GetCurrentByteIndex(ctx.parser));
    auto count = static_cast<std::size_t>(XML_GetCurrentByteCount(ctx.parser));
    e.start_tag = SourceRange{begin, begin + count};
    e.range.begin = begin;

    auto ranges = scan_attribute_ranges(*ctx.source, e.start_tag);
    for (const char** a = attrs; a[0] != nullptr; a += 2) {
        auto an = split_expanded(a[0]);
        Attribute attr;
        attr.qname = qualified(an);
        attr.ns = std::move(an.ns);
        attr.local = std::move(an.local);
        attr.value = a[1];
        if (auto it = ranges.find(attr.qname); it != ranges.end()) attr.value_range = it->second;
        e.attributes.push_back(std::move(attr));
    }

    if (!ctx.stack.empty()) {
        e.sibling_index = ++ctx.stack.back().child_counts[e.qname];
    }
    ctx.stack.push_back(OpenElement{std::move(e), {}});
}

void on_end(void* data, const char*) {
    auto& ctx = *static_cast<ParseContext*>(data);
    auto index = static_cast<std::size_t>(XML_GetCurrentByteIndex(ctx.parser));
    auto count = static_cast<std::size_t>(XML_GetCurrentByteCount(ctx.parser));
    Element done = std::move(ctx.stack.back().element);
    ctx.stack.pop_back();
    done.range.end = index + count;
    if (ctx.stack.empty()) {
        ctx.root = std::move(done);
        ctx.have_root = true;
    } else {
        ctx.stack.back().element.children.emplace_back(std::move(done));
    }
}

void on_text(void* data, const char* s, int len) {
    auto& ctx = *static_cast<ParseContext*>(data);
    if (ctx.stack.empty()) return;
    auto& children = ctx.stack.back().element.children;
    if (!children.empty()) {
        if (auto* t = std::get_if<Text>(&children.back().value)) {
            t->value.append(s, static_cast<std::size_t>(len));
            return;
        }
    }
    children.emplace_back(Text{std::string(s, static_cast<std::size_t>(len))});
}

void on_xml_decl(void* data, const XML_Char*, const XML_Char* encoding, int) {
    auto& ctx = *static_cast<ParseContext*>(data);
    if (encoding == nullptr) return;
    std::string enc(encoding);
    std::transform(enc.begin(), enc.end(), enc.begin(), [](unsigned char c) { return std::tolower(c); });
    if (enc != "utf-8" && enc != "utf8") ctx.fail("unsupported encoding '" + std::string(encoding) + "' (only UTF-8 is accepted)");
}

void on_doctype(void* data, const XML_Char*, const XML_Char*, const XML_Char*, int) {
    static_cast<ParseContext*>(data)->fail("document type declarations are not accepted");
}

void on_namespace(void* data, const XML_Char* prefix, const XML_Char* uri) {
    auto& ctx = *static_cast<ParseContext*>(data);
    if (prefix == nullptr || uri == nullptr) return;
    for (const auto& d : ctx.namespaces) {
        if (d.prefix == prefix) return;
    }
    ctx.namespaces.push_back(NamespaceDecl{prefix, uri});
}

struct ParserDeleter {
    void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

}  // namespace

const Attribute* Element::attribute(std::string_view local_name, std::string_view ns_uri) const {
    for (const auto& a : attributes) {
        if (a.local == local_name && a.ns == ns_uri) return &a;
    }
    return nullptr;
}

std::string Element::attribute_or(std::string_view local_name, std::string_view fallback) const {
    const auto* a = attribute(local_name);
    return a ? a->value : std::string(fallback);
}

bool Element::is(std::string_view local_name) const { return local == local_name && ns == kTeiNamespace; }

Element& Element::set(std::string name, std::string value) {
    for (auto& a : attributes) {
        if (a.qname == name) {
            a.value = std::move(value);
            return *this;
        }
    }
    Attribute a;
    a.local = name;
    a.qname = std::move(name);
    a.value = std::move(value);
    attributes.push_back(std::move(a));
    return *this;
}

Element& Element::add(Element child) {
    children.emplace_back(std::move(child));
    return *this;
}

Element& Element::add_text(std::string text) {
    if (text.empty()) return *this;
    if (!children.empty()) {
        if (auto* t = std::get_if<Text>(&children.back().value)) {
            t->value += text;
            return *this;
        }
    }
    children.emplace_back(Text{std::move(text)});
    return *this;
}

Element& Element::add_raw(std::string markup) {
    children.emplace_back(Raw{std::move(markup)});
    return *this;
}

std::vector<const Element*> Element::child_elements() const {
    std::vector<const Element*> out;
    for (const auto& c : children) {
        if (const auto* e = c.element()) out.push_back(e);
    }
    return out;
}

const Element* Element::first_child(std::string_view local_name) const {
    for (const auto& c : children) {
        if (const auto* e = c.element(); e && e->is(local_name)) return e;
    }
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view local_name) const {
    std::vector<const Element*> out;
    for (const auto& c : children) {
        if (const auto* e = c.element(); e && e->is(local_name)) out.push_back(e);
    }
    return out;
}

bool Element::has_significant_text() const {
    for (const auto& c : children) {
        if (const auto* t = c.text()) {
            if (std::any_of(t->value.begin(), t->value.end(), [](char ch) { return !is_space(ch); })) return true;
        }
    }
    return false;
}

std::string Element::text() const {
    std::string out;
    for (const auto& c : children) {
        if (const auto* t = c.text()) {
            out += t->value;
        } else if (const auto* e = c.element()) {
            out += e->text();
        }
    }
    return out;
}

Document parse(std::string source) {
    Document doc;
    doc.source = std::move(source);

    std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreateNS("UTF-8", kSeparator));
    if (!parser) throw std::bad_alloc();
    ParseContext ctx;
    ctx.parser = parser.get();
    ctx.source = &doc.source;

    XML_SetUserData(parser.get(), &ctx);
    XML_SetReturnNSTriplet(parser.get(), 1);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    XML_SetXmlDeclHandler(parser.get(), on_xml_decl);
    XML_SetStartDoctypeDeclHandler(parser.get(), on_doctype);
    XML_SetStartNamespaceDeclHandler(parser.get(), on_namespace);
    XML_SetParamEntityParsing(parser.get(), XML_PARAM_ENTITY_PARSING_NEVER);

    auto status = XML_Parse(parser.get(), doc.source.data(), static_cast<int>(doc.source.size()), XML_TRUE);
    if (status != XML_STATUS_OK || !ctx.error.empty()) {
        std::string message = ctx.error.empty() ? XML_ErrorString(XML_GetErrorCode(parser.get())) : ctx.error;
        throw SyntaxError(message, XML_GetCurrentLineNumber(parser.get()), XML_GetCurrentColumnNumber(parser.get()),
                          ctx.current_path());
    }
    if (!ctx.have_root) throw SyntaxError("no root element", 1, 0, "");
    doc.root = std::move(ctx.root);
    doc.prefixed_namespaces = std::move(ctx.namespaces);
    return doc;
}

std::string path_segment(const Element& e) { return e.qname + "[" + std::to_string(e.sibling_index) + "]"; }

namespace {

void walk_impl(const Element& e, const std::string& path,
               const std::function<void(const Element&, const std::string&)>& visit) {
    visit(e, path);
    for (const auto& c : e.children) {
        if (const auto* child = c.element()) walk_impl(*child, path + "/" + path_segment(*child), visit);
    }
}

}  // namespace

void walk(const Element& root, const std::function<void(const Element&, const std::string&)>& visit) {
    walk_impl(root, path_segment(root), visit);
}

const Element* find_by_path(const Element& root, std::string_view path) {
    std::vector<std::string_view> segments;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto slash = path.find('/', start);
        if (slash == std::string_view::npos) slash = path.size();
        segments.push_back(path.substr(start, slash - start));
        start = slash + 1;
    }
    if (segments.empty() || segments.front() != path_segment(root)) return nullptr;
    const Element* current = &root;
    for (std::size_t i = 1; i < segments.size(); ++i) {
        const Element* next = nullptr;
        for (const auto& c : current->children) {
            if (const auto* e = c.element(); e && path_segment(*e) == segments[i]) {
                next = e;
                break;
            }
        }
        if (!next) return nullptr;
        current = next;
    }
    return current;
}

std::string escape_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '\r': out += "&#13;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string escape_attribute(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#10;"; break;
            case '\t': out += "&#9;"; break;
            case '\r': out += "&#13;"; break;
            default: out += c;
        }
    }
    return out;
}

namespace {

void write_start(const Element& e, std::string& out, bool empty) {
    out += '<';
    out += e.qname;
    std::vector<const Attribute*> attrs;
    for (const auto& a : e.attributes) attrs.push_back(&a);
    std::sort(attrs.begin(), attrs.end(), [](const Attribute* a, const Attribute* b) { return a->qname < b->qname; });
    for (const auto* a : attrs) {
        out += ' ';
        out += a->qname;
        out += "=\"";
        out += escape_attribute(a->value);
        out += '"';
    }
    out += empty ? "/>" : ">";
}

void write_inline(const Element& e, std::string& out) {
    if (e.children.empty()) {
        write_start(e, out, true);
        return;
    }
    write_start(e, out, false);
    for (const auto& c : e.children) {
        if (const auto* child = c.element()) {
            write_inline(*child, out);
        } else if (const auto* t = c.text()) {
            out += escape_text(t->value);
        } else {
            out += std::get<Raw>(c.value).markup;
        }
    }
    out += "</" + e.qname + ">";
}

void write_block(const Element& e, std::string& out, int depth, bool indent) {
    if (e.mixed || e.has_significant_text() || !indent) {
        write_inline(e, out);
        return;
    }
    if (e.children.empty()) {
        write_start(e, out, true);
        return;
    }
    write_start(e, out, false);
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    for (const auto& c : e.children) {
        if (const auto* child = c.element()) {
            out += '\n';
            out += pad;
            write_block(*child, out, depth + 1, indent);
        } else if (const auto* raw = std::get_if<Raw>(&c.value)) {
            out += '\n';
            out += pad;
            out += raw->markup;
        }
    }
    out += '\n';
    out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
    out += "</" + e.qname + ">";
}

}  // namespace

std::string write(const Element& root, const WriteOptions& options) {
    std::string out;
    if (options.declaration) out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_block(root, out, 0, options.indent);
    out += '\n';
    return out;
}

}  // namespace tj::xml
