#include "tj/render.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tj/paths.hpp"
#include "tj/text.hpp"
#include "tj/xml_io.hpp"

namespace tj::render {

namespace {

constexpr std::string_view kOpenQuote = "“";
constexpr std::string_view kCloseQuote = "”";
constexpr std::string_view kEnDash = "–";

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

// Accumulates spans, merging neighbours with the same mark and dropping a
// period that would follow terminal punctuation.
class SpanBuilder {
  public:
    void add(std::string s, Mark mark = Mark::plain) {
        if (s.empty()) return;
        if (s.front() == '.' && is_terminal(last_significant())) {
            s.erase(0, 1);
            if (!flat_.empty() && flat_.back() == ' ') {
                auto first = s.find_first_not_of(' ');
                s.erase(0, first == std::string::npos ? s.size() : first);
            }
            if (s.empty()) return;
        }
        flat_ += s;
        if (!spans_.empty() && spans_.back().mark == mark && mark != Mark::range_dash) {
            spans_.back().text += s;
        } else {
            spans_.push_back(Span{std::move(s), mark});
        }
    }

    // Trailing spaces and separators removed, then a full stop unless the
    // text already ends in terminal punctuation.
    void terminate() {
        while (!spans_.empty()) {
            auto& t = spans_.back().text;
            while (!t.empty() && (t.back() == ' ' || t.back() == ',' || t.back() == ';' || t.back() == ':')) t.pop_back();
            if (!t.empty()) break;
            spans_.pop_back();
        }
        rebuild_flat();
        if (spans_.empty()) return;
        if (!is_terminal(last_significant())) add(".");
    }

    std::vector<Span> take() { return std::move(spans_); }
    const std::string& flat() const { return flat_; }

  private:
    char last_significant() const {
        std::string_view v(flat_);
        while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
        if (ends_with(v, kCloseQuote)) v.remove_suffix(kCloseQuote.size());
        return v.empty() ? '\0' : v.back();
    }

    void rebuild_flat() {
        flat_.clear();
        for (const auto& s : spans_) flat_ += s.text;
    }

    std::vector<Span> spans_;
    std::string flat_;
};

std::string initials(const std::string& forename) {
    std::string out;
    for (const auto& part : text::split(forename, '-')) {
        if (part.empty()) continue;
        if (!out.empty()) out += '-';
        // First code point, whatever its byte length.
        std::size_t n = 1;
        auto lead = static_cast<unsigned char>(part[0]);
        if (lead >= 0xF0) n = 4;
        else if (lead >= 0xE0) n = 3;
        else if (lead >= 0xC0) n = 2;
        out += part.substr(0, std::min(n, part.size()));
        out += '.';
    }
    return out;
}

std::string format_name(const Author& a, NameFormat format) {
    if (a.is_organization()) return a.surname;
    switch (format) {
        case NameFormat::as_encoded: return a.display_name();
        case NameFormat::surname_first_full: {
            std::string out = a.surname + ",";
            for (const auto& f : a.forenames) out += " " + f;
            return out;
        }
        case NameFormat::surname_first_initials: {
            std::string out = a.surname + ",";
            for (const auto& f : a.forenames) {
                auto i = initials(f);
                if (!i.empty()) out += " " + i;
            }
            return out;
        }
    }
    return a.surname;
}

std::string join_names(const std::vector<std::string>& names) {
    if (names.empty()) return {};
    if (names.size() == 1) return names[0];
    if (names.size() == 2) return names[0] + " and " + names[1];
    std::string out;
    for (std::size_t i = 0; i + 1 < names.size(); ++i) out += names[i] + ", ";
    return out + "and " + names.back();
}

std::optional<std::string> title_text(const std::vector<Title>& titles) {
    const auto* t = find_main_title(titles);
    if (!t) return std::nullopt;
    auto s = normalize_title(t->text);
    if (s.empty()) return std::nullopt;
    return s;
}

std::optional<std::string> main_title_text(const BiblStruct& b) {
    if (b.analytic) {
        if (auto t = title_text(b.analytic->titles)) return t;
    }
    return title_text(b.monogr.titles);
}

std::optional<std::string> non_empty(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    auto n = text::normalize_space(*s);
    if (n.empty()) return std::nullopt;
    return n;
}

// Field value as spans, or nullopt when the record has no such data.
std::optional<std::vector<Span>> resolve(const std::string& path, const BiblStruct& b, const StyleGuide& g) {
    auto one = [](std::optional<std::string> s) -> std::optional<std::vector<Span>> {
        if (!s) return std::nullopt;
        return std::vector<Span>{Span{std::move(*s), Mark::plain}};
    };
    const auto& imprint = b.monogr.imprint;
    auto scope = [&](std::string_view kind) -> std::optional<std::string> {
        if (const auto* s = imprint.scope(kind)) return non_empty(s->value);
        return std::nullopt;
    };
    if (path == "authors") {
        auto s = format_authors(b.primary_authors(), g.author_name_format);
        return one(s.empty() ? std::nullopt : std::optional<std::string>(s));
    }
    if (path == "title") return one(main_title_text(b));
    if (path == "analytic.title") return one(b.analytic ? title_text(b.analytic->titles) : std::nullopt);
    if (path == "monogr.title") return one(title_text(b.monogr.titles));
    if (path == "monogr.issn") return one(non_empty(b.monogr.issn));
    if (path == "imprint.publisher") return one(non_empty(imprint.publisher));
    if (path == "imprint.pub_place") return one(non_empty(imprint.pub_place));
    if (path == "imprint.year") {
        if (!imprint.date) return std::nullopt;
        return one(std::to_string(imprint.date->date.year));
    }
    if (path == "imprint.date") {
        if (!imprint.date) return std::nullopt;
        return one(imprint.date->date.raw);
    }
    if (path == "scope.vol") return one(scope("vol"));
    if (path == "scope.issue") return one(scope("issue"));
    if (path == "scope.pp") return one(scope("pp"));
    if (path == "scope.pages") {
        auto first = scope("fpage");
        auto last = scope("lpage");
        if (!first) return std::nullopt;
        std::vector<Span> out{Span{*first, Mark::plain}};
        if (last && *last != *first) {
            out.push_back(Span{"-", Mark::range_dash});
            out.push_back(Span{*last, Mark::plain});
        }
        return out;
    }
    if (path.rfind("idno.", 0) == 0) {
        auto kind = path.substr(5);
        if (auto v = b.identifier(kind)) return one(non_empty(v));
        auto lowered = text::to_lower_ascii(kind);
        for (const auto& id : b.monogr.identifiers) {
            if (text::to_lower_ascii(id.kind) == lowered) return one(non_empty(id.value));
        }
        return std::nullopt;
    }
    throw Error("style: unknown field path '" + path + "'");
}

void emit_segment(SpanBuilder& out, const Segment& seg, std::optional<std::vector<Span>> value) {
    if (!value) {
        if (seg.omit_if_absent) return;
        out.add(seg.prefix);
        out.add(seg.suffix);
        return;
    }
    out.add(seg.prefix);
    auto suffix = seg.suffix;
    if (seg.typography == Typography::quoted) {
        std::string inner;
        for (const auto& s : *value) inner += s.text;
        if (!suffix.empty() && (suffix.front() == '.' || suffix.front() == ',')) {
            if (inner.empty() || !is_terminal(inner.back())) inner += suffix.front();
            suffix.erase(0, 1);
        }
        out.add(std::string(kOpenQuote) + inner + std::string(kCloseQuote));
    } else {
        for (auto& s : *value) {
            auto mark = s.mark;
            if (seg.typography == Typography::italic && mark == Mark::plain) mark = Mark::italic;
            out.add(std::move(s.text), mark);
        }
    }
    out.add(suffix);
}

bool is_title_path(const std::string& p) { return p == "title" || p == "analytic.title" || p == "monogr.title"; }

}  // namespace

std::string format_authors(const std::vector<Author>& authors, NameFormat format) {
    std::vector<std::string> names;
    for (const auto& a : authors) {
        auto n = format_name(a, format);
        if (!text::normalize_space(n).empty()) names.push_back(std::move(n));
    }
    return join_names(names);
}

std::string RenderedEntry::text() const {
    std::string out;
    for (const auto& s : spans) out += s.text;
    return out;
}

std::string RenderedEntry::markdown() const {
    std::string out;
    for (const auto& s : spans) {
        switch (s.mark) {
            case Mark::plain: out += s.text; break;
            case Mark::italic: out += "*" + s.text + "*"; break;
            case Mark::range_dash: out += kEnDash; break;
        }
    }
    return out;
}

RenderedEntry format_entry(const BiblStruct& b, const StyleGuide& guide) {
    auto title = main_title_text(b);
    if (!title) throw Error("bibliographic record has no title");

    auto layout = guide.layout(b.doc_type);
    if (b.primary_authors().empty()) {
        auto it = std::find_if(layout.begin(), layout.end(),
                               [&](const Segment& s) { return is_title_path(s.path) && resolve(s.path, b, guide); });
        if (it != layout.end()) std::rotate(layout.begin(), it, it + 1);
    }

    SpanBuilder out;
    for (const auto& seg : layout) emit_segment(out, seg, resolve(seg.path, b, guide));
    out.terminate();
    if (auto doi = non_empty(b.doi())) {
        auto link = doi->rfind("http", 0) == 0 ? *doi : "https://doi.org/" + *doi;
        out.add(" " + link);
    }

    RenderedEntry entry;
    entry.spans = out.take();
    const auto& authors = b.primary_authors();
    entry.sort_key.surname = text::casefold(authors.empty() ? *title : text::normalize_space(authors.front().surname));
    entry.sort_key.year = b.year();
    entry.sort_key.title = text::casefold(*title);
    return entry;
}

std::vector<ListedEntry> format_reference_list(const ListBibl& list, const StyleGuide& guide,
                                               const std::vector<std::string>& citation_order) {
    struct Item {
        std::size_t position;
        const BiblStruct* record;
        RenderedEntry entry;
    };
    std::vector<Item> items;
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& b = list.entries[i];
        RenderedEntry e;
        if (main_title_text(b)) {
            e = format_entry(b, guide);
        } else {
            // Untitled entries (R12) still get a slot so numbering stays complete.
            e.spans = {Span{"[untitled]", Mark::plain}};
        }
        items.push_back(Item{i, &b, std::move(e)});
    }

    auto alphabetical = [](const Item& a, const Item& b) {
        if (a.entry.sort_key != b.entry.sort_key) return a.entry.sort_key < b.entry.sort_key;
        return a.position < b.position;
    };

    std::vector<const Item*> ordered;
    if (guide.list_order == ListOrder::citation_order) {
        std::map<std::string, std::size_t> first_seen;
        for (const auto& id : citation_order) first_seen.emplace(id, first_seen.size());
        std::set<std::string> ids_used;
        std::vector<std::pair<std::size_t, const Item*>> cited;
        std::vector<const Item*> rest;
        for (const auto& it : items) {
            const auto& xid = it.record->xml_id;
            auto found = xid ? first_seen.find(*xid) : first_seen.end();
            if (found != first_seen.end() && ids_used.insert(*xid).second) {
                cited.emplace_back(found->second, &it);
            } else {
                rest.push_back(&it);
            }
        }
        std::sort(cited.begin(), cited.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::sort(rest.begin(), rest.end(), [&](const Item* a, const Item* b) { return alphabetical(*a, *b); });
        for (const auto& [_, it] : cited) ordered.push_back(it);
        ordered.insert(ordered.end(), rest.begin(), rest.end());
    } else {
        for (const auto& it : items) ordered.push_back(&it);
        std::sort(ordered.begin(), ordered.end(), [&](const Item* a, const Item* b) { return alphabetical(*a, *b); });
    }

    std::vector<ListedEntry> out;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        ListedEntry le;
        if (guide.marker_scheme == MarkerScheme::numeric_bracket) le.label = "[" + std::to_string(i + 1) + "]";
        le.id = ordered[i]->record->xml_id.value_or("");
        le.entry = ordered[i]->entry;
        out.push_back(std::move(le));
    }
    return out;
}

std::vector<std::string> citation_order(const Article& article) {
    struct Collector : paths::TextVisitor {
        const Article& a;
        std::vector<std::string> ids;
        explicit Collector(const Article& art) : a(art) {}

        void add(const RefTarget& t) {
            if (!t.is_fragment()) return;
            if (resolve_ref(a, t)) ids.push_back(t.fragment());
        }
        void inline_node(const Inline& in, const std::string&) override {
            if (const auto* ref = std::get_if<BiblRef>(&in.value)) add(ref->target);
        }
        void block(const Block& b, const std::string&) override {
            if (const auto* cit = std::get_if<CitBlock>(&b.value)) {
                if (const auto* t = std::get_if<RefTarget>(&cit->source)) add(*t);
            }
        }
    } collector(article);
    paths::walk_text(article, collector);
    return collector.ids;
}

std::string author_date_marker(const BiblStruct& b) {
    const auto& authors = b.primary_authors();
    std::string who;
    if (authors.empty()) {
        who = std::string(kOpenQuote) + main_title_text(b).value_or("untitled") + std::string(kCloseQuote);
    } else if (authors.size() == 1) {
        who = authors[0].surname;
    } else if (authors.size() == 2) {
        who = authors[0].surname + " and " + authors[1].surname;
    } else {
        who = authors[0].surname + " et al.";
    }
    auto year = b.year();
    return "(" + who + " " + (year ? std::to_string(*year) : std::string("n.d.")) + ")";
}

void append_entry(xml::Element& parent, const RenderedEntry& entry) {
    for (const auto& s : entry.spans) {
        switch (s.mark) {
            case Mark::plain: parent.add_text(s.text); break;
            case Mark::italic: {
                xml::Element em("em");
                em.add_text(s.text);
                parent.add(std::move(em));
                break;
            }
            case Mark::range_dash: parent.add_text(std::string(kEnDash)); break;
        }
    }
}

// ---- article rendering -----------------------------------------------------

namespace {

std::string affiliation_text(const Affiliation& aff) {
    std::vector<std::string> parts;
    for (const auto& u : aff.org_units) {
        if (auto n = text::normalize_space(u.name); !n.empty()) parts.push_back(n);
    }
    if (aff.address) {
        const auto& ad = *aff.address;
        for (const auto& line : ad.lines) {
            if (line.kind && *line.kind != "plain") continue;
            if (auto n = text::normalize_space(line.text); !n.empty()) parts.push_back(n);
        }
        for (const auto* f : {&ad.settlement, &ad.post_code, &ad.country}) {
            if (auto n = non_empty(*f)) parts.push_back(*n);
        }
    }
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
    return out;
}

std::string article_title(const Article& a) {
    if (a.header.file_desc) {
        if (auto t = normalize_title(a.header.file_desc->main_title); !t.empty()) return t;
    }
    if (const auto* s = a.source()) return main_title_text(*s).value_or("");
    return {};
}

const std::vector<Author>& article_authors(const Article& a) {
    static const std::vector<Author> kNone;
    if (const auto* s = a.source()) return s->primary_authors();
    return kNone;
}

// Citation markers for both output formats.
class Markers {
  public:
    Markers(const Article& a, const StyleGuide& g) : article_(a), guide_(g) {
        if (a.back.reference_list) {
            listed_ = format_reference_list(*a.back.reference_list, g, citation_order(a));
            for (const auto& le : listed_) {
                if (!le.id.empty() && le.label) labels_.emplace(le.id, *le.label);
            }
        }
    }

    const std::vector<ListedEntry>& listed() const { return listed_; }

    // Marker text for a target, nullopt when it does not resolve.
    std::optional<std::string> marker(const RefTarget& t) const {
        if (!t.is_fragment()) return std::nullopt;
        const auto* b = resolve_ref(article_, t);
        if (!b) return std::nullopt;
        if (guide_.marker_scheme == MarkerScheme::author_date) return author_date_marker(*b);
        auto it = labels_.find(t.fragment());
        if (it == labels_.end()) return std::nullopt;
        return it->second;
    }

  private:
    const Article& article_;
    const StyleGuide& guide_;
    std::vector<ListedEntry> listed_;
    std::map<std::string, std::string> labels_;
};

std::string anchor(const std::string& id) { return "ref-" + id; }

xml::Element el(std::string name, std::string cls = {}) {
    xml::Element e(std::move(name));
    if (!cls.empty()) e.set("class", std::move(cls));
    return e;
}

xml::Element text_el(std::string name, std::string cls, std::string text) {
    auto e = el(std::move(name), std::move(cls));
    e.add_text(std::move(text));
    return e;
}

// Foreign markup (MathML, XHTML tables) re-emitted with default namespace
// declarations instead of prefixes.
xml::Element reemit_foreign(const xml::Element& src, const std::string& parent_ns) {
    xml::Element out(src.local);
    out.mixed = true;
    if (src.ns != parent_ns) out.set("xmlns", src.ns);
    for (const auto& a : src.attributes) {
        if (a.ns.empty()) out.set(a.local, a.value);
    }
    for (const auto& c : src.children) {
        if (const auto* e = c.element()) {
            out.add(reemit_foreign(*e, src.ns));
        } else if (const auto* t = c.text()) {
            out.add_text(t->value);
        }
    }
    return out;
}

std::optional<xml::Document> parse_fragment(const Article& a, const std::string& markup) {
    std::string wrapped = "<tj-fragment xmlns=\"" + std::string(xml::kTeiNamespace) + "\"";
    for (const auto& ns : a.namespaces) wrapped += " xmlns:" + ns.prefix + "=\"" + xml::escape_attribute(ns.uri) + "\"";
    wrapped += ">" + markup + "</tj-fragment>";
    try {
        return xml::parse(std::move(wrapped));
    } catch (const xml::SyntaxError&) {
        return std::nullopt;
    }
}

const xml::Element* first_foreign(const xml::Element& e) {
    for (const auto* c : e.child_elements()) {
        if (c->ns != xml::kTeiNamespace) return c;
        if (const auto* f = first_foreign(*c)) return f;
    }
    return nullptr;
}

class XhtmlWriter {
  public:
    XhtmlWriter(const Article& a, const StyleGuide& g) : a_(a), g_(g), markers_(a, g) {}

    std::string run() {
        auto html = el("html");
        html.set("xmlns", std::string(xml::kXhtmlNamespace));
        auto lang = a_.header.profile_desc.languages.empty() ? std::string() : a_.header.profile_desc.languages.front();
        if (!lang.empty()) html.set("xml:lang", lang);

        auto head = el("head");
        auto meta = el("meta");
        meta.set("charset", "UTF-8");
        head.add(std::move(meta));
        auto title = article_title(a_);
        head.add(text_el("title", {}, title));
        html.add(std::move(head));

        auto body = el("body");
        auto article = el("article", "tj-article");
        article.add(text_el("h1", "tj-title", title));
        authors(article);
        keywords(article);
        for (const auto& d : a_.front) division(article, d, 1, true);
        for (const auto& d : a_.body) division(article, d, 1, false);
        back(article);
        body.add(std::move(article));
        html.add(std::move(body));
        return xml::write(html);
    }

  private:
    void authors(xml::Element& parent) {
        const auto& list = article_authors(a_);
        if (list.empty()) return;
        auto block = el("div", "tj-authors");
        for (const auto& au : list) {
            auto p = el("p", "tj-author");
            p.add(text_el("span", "tj-name", text::normalize_space(au.display_name())));
            if (au.corresponding) p.add(text_el("span", "tj-corresp", "*"));
            if (au.affiliation) {
                if (auto t = affiliation_text(*au.affiliation); !t.empty()) {
                    p.add_text(" ");
                    p.add(text_el("span", "tj-affiliation", t));
                }
            }
            if (au.email) {
                auto link = text_el("a", "tj-email", *au.email);
                link.set("href", "mailto:" + *au.email);
                p.add_text(" ");
                p.add(std::move(link));
            }
            p.mixed = true;
            block.add(std::move(p));
        }
        parent.add(std::move(block));
    }

    void keywords(xml::Element& parent) {
        const auto& kws = a_.header.profile_desc.keywords;
        if (kws.empty()) return;
        auto ul = el("ul", "tj-keywords");
        for (const auto& k : kws) ul.add(text_el("li", {}, text::normalize_space(k.term)));
        parent.add(std::move(ul));
    }

    void division(xml::Element& parent, const Division& d, int depth, bool front) {
        if (d.implicit) {
            for (const auto& b : d.blocks) block(parent, b);
            return;
        }
        bool abstract = front && d.kind == "abstract";
        auto section = el("section", abstract ? "tj-abstract" : "tj-section");
        if (!abstract && d.kind != "section") section.set("data-type", d.kind);
        auto level = "h" + std::to_string(std::min(depth + 1, 6));
        if (d.head) {
            auto h = el(level);
            inlines(h, *d.head);
            section.add(std::move(h));
        } else if (abstract) {
            section.add(text_el(level, {}, "Abstract"));
        }
        for (const auto& b : d.blocks) block(section, b);
        for (const auto& c : d.children) division(section, c, depth + 1, front);
        parent.add(std::move(section));
    }

    void back(xml::Element& parent) {
        for (const auto& d : a_.back.divisions) division(parent, d, 1, false);
        if (a_.back.reference_list) {
            auto section = el("section", "tj-references");
            section.add(text_el("h2", {}, "References"));
            bool numeric = g_.marker_scheme == MarkerScheme::numeric_bracket;
            auto list = el(numeric ? "ol" : "ul", "tj-bibliography");
            for (const auto& le : markers_.listed()) {
                auto li = el("li", "tj-biblio-entry");
                li.mixed = true;
                if (!le.id.empty()) li.set("id", anchor(le.id));
                if (le.label) {
                    li.add(text_el("span", "tj-label", *le.label));
                    li.add_text(" ");
                }
                append_entry(li, le.entry);
                list.add(std::move(li));
            }
            section.add(std::move(list));
            parent.add(std::move(section));
        }
        if (!a_.back.notes.empty()) {
            auto section = el("section", "tj-notes");
            section.add(text_el("h2", {}, "Notes"));
            auto list = el("ol");
            for (const auto& n : a_.back.notes) {
                auto li = el("li", "tj-note");
                inlines(li, n);
                list.add(std::move(li));
            }
            section.add(std::move(list));
            parent.add(std::move(section));
        }
    }

    void source_entry(xml::Element& parent, const BiblStruct& b) {
        if (main_title_text(b)) {
            auto span = el("span", "tj-source");
            span.mixed = true;
            append_entry(span, format_entry(b, g_));
            parent.add(std::move(span));
        }
    }

    void block(xml::Element& parent, const Block& b) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Paragraph>) {
                    auto p = el("p");
                    inlines(p, x.content);
                    parent.add(std::move(p));
                } else if constexpr (std::is_same_v<T, CitBlock>) {
                    auto bq = el("blockquote", "tj-cit");
                    auto p = el("p");
                    inlines(p, x.quote);
                    bq.add(std::move(p));
                    auto footer = el("footer");
                    footer.mixed = true;
                    if (const auto* bibl = std::get_if<BiblStruct>(&x.source)) {
                        source_entry(footer, *bibl);
                    } else {
                        const auto& t = std::get<RefTarget>(x.source);
                        ref(footer, t, t.uri);
                    }
                    if (!x.qualifiers.empty()) {
                        footer.add_text(" ");
                        auto note = el("span", "tj-cit-note");
                        inlines(note, x.qualifiers);
                        footer.add(std::move(note));
                    }
                    bq.add(std::move(footer));
                    parent.add(std::move(bq));
                } else if constexpr (std::is_same_v<T, FigureBlock>) {
                    auto fig = el("figure", "tj-figure");
                    if (!x.graphic.empty()) {
                        auto img = el("img");
                        img.set("src", x.graphic);
                        img.set("alt", normalize_title(x.caption));
                        fig.add(std::move(img));
                    }
                    if (!x.caption.empty() || x.source) {
                        auto cap = el("figcaption");
                        inlines(cap, x.caption);
                        if (x.source) {
                            if (!x.caption.empty()) cap.add_text(" ");
                            source_entry(cap, *x.source);
                        }
                        fig.add(std::move(cap));
                    }
                    parent.add(std::move(fig));
                } else if constexpr (std::is_same_v<T, TableBlock>) {
                    table(parent, x);
                } else if constexpr (std::is_same_v<T, FormulaBlock>) {
                    formula(parent, x);
                } else if constexpr (std::is_same_v<T, ListBlock>) {
                    auto ul = el("ul", "tj-list");
                    for (const auto& item : x.items) {
                        auto li = el("li");
                        inlines(li, item);
                        ul.add(std::move(li));
                    }
                    parent.add(std::move(ul));
                } else if constexpr (std::is_same_v<T, QuoteBlock>) {
                    auto bq = el("blockquote", "tj-quote");
                    auto p = el("p");
                    inlines(p, x.content);
                    bq.add(std::move(p));
                    parent.add(std::move(bq));
                } else {
                    parent.add(text_el("div", "tj-opaque", text::normalize_space(x.text)));
                }
            },
            b.value);
    }

    void table(xml::Element& parent, const TableBlock& t) {
        auto doc = parse_fragment(a_, t.markup);
        const xml::Element* src = doc ? doc->root.child_elements().front() : nullptr;
        if (src && src->ns != xml::kTeiNamespace) {
            parent.add(reemit_foreign(*src, std::string(xml::kXhtmlNamespace)));
            return;
        }
        auto table = el("table", "tj-table");
        if (!t.caption.empty()) {
            auto cap = el("caption");
            inlines(cap, t.caption);
            table.add(std::move(cap));
        }
        if (src) {
            for (const auto* row : src->children_named("row")) {
                auto tr = el("tr");
                bool label_row = row->attribute_or("role") == "label";
                for (const auto* cell : row->children_named("cell")) {
                    bool header = label_row || cell->attribute_or("role") == "label";
                    auto td = text_el(header ? "th" : "td", {}, text::normalize_space(cell->text()));
                    if (auto cols = cell->attribute_or("cols"); !cols.empty()) td.set("colspan", cols);
                    if (auto rows = cell->attribute_or("rows"); !rows.empty()) td.set("rowspan", rows);
                    tr.add(std::move(td));
                }
                table.add(std::move(tr));
            }
        }
        parent.add(std::move(table));
    }

    void formula(xml::Element& parent, const FormulaBlock& f) {
        auto div = el("div", "tj-formula");
        div.mixed = true;
        if (!f.notation.empty()) div.set("data-notation", f.notation);
        auto doc = parse_fragment(a_, f.markup);
        const xml::Element* src = doc ? doc->root.child_elements().front() : nullptr;
        if (src) {
            if (const auto* foreign = first_foreign(*src)) {
                div.add(reemit_foreign(*foreign, std::string(xml::kXhtmlNamespace)));
            } else {
                div.add_text(text::normalize_space(src->text()));
            }
        }
        parent.add(std::move(div));
    }

    void ref(xml::Element& parent, const RefTarget& target, const std::string& encoded) {
        if (auto m = markers_.marker(target)) {
            auto a = text_el("a", "tj-ref", *m);
            a.set("href", "#" + anchor(target.fragment()));
            parent.add(std::move(a));
        } else {
            parent.add(text_el("span", "tj-ref tj-unresolved", encoded));
        }
    }

    void inlines(xml::Element& parent, const RichText& rich) {
        parent.mixed = true;
        for (const auto& in : rich) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, TextRun>) {
                        parent.add_text(v.text);
                    } else if constexpr (std::is_same_v<T, Emph>) {
                        std::string name = "em";
                        if (v.rend == "bold") name = "strong";
                        else if (v.rend == "sup" || v.rend == "superscript") name = "sup";
                        else if (v.rend == "sub" || v.rend == "subscript") name = "sub";
                        auto e = el(name);
                        inlines(e, v.content);
                        parent.add(std::move(e));
                    } else if constexpr (std::is_same_v<T, BiblRef>) {
                        ref(parent, v.target, v.text);
                    } else if constexpr (std::is_same_v<T, NameMention>) {
                        const char* cls = v.kind == NameKind::person         ? "tj-person"
                                          : v.kind == NameKind::organization ? "tj-org"
                                                                             : "tj-place";
                        parent.add(text_el("span", cls, v.text));
                    } else if constexpr (std::is_same_v<T, TermMention>) {
                        auto cls = std::string("tj-term");
                        if (v.kind) cls += " tj-term-" + text::to_lower_ascii(*v.kind);
                        parent.add(text_el("span", cls, v.text));
                    } else if constexpr (std::is_same_v<T, AbbrMention>) {
                        auto e = text_el("abbr", "tj-abbr", v.abbr);
                        if (v.expansion) e.set("title", text::normalize_space(*v.expansion));
                        parent.add(std::move(e));
                    } else if constexpr (std::is_same_v<T, Link>) {
                        auto e = text_el("a", "tj-link", v.text);
                        e.set("href", v.target);
                        parent.add(std::move(e));
                    } else {
                        parent.add(text_el("span", "tj-opaque", v.text));
                    }
                },
                in.value);
        }
    }

    const Article& a_;
    const StyleGuide& g_;
    Markers markers_;
};

constexpr std::size_t kWidth = 78;

class TextWriter {
  public:
    explicit TextWriter(const Article& a) : a_(a), markers_(a, builtin_style("chicago")) {}

    std::string run() {
        auto title = article_title(a_);
        if (!title.empty()) wrapped(title);
        bool any = false;
        for (const auto& au : article_authors(a_)) {
            if (!any) blank();
            any = true;
            auto line = text::normalize_space(au.display_name());
            if (au.affiliation) {
                if (auto t = affiliation_text(*au.affiliation); !t.empty()) line += " (" + t + ")";
            }
            wrapped(line);
        }
        const auto& kws = a_.header.profile_desc.keywords;
        if (!kws.empty()) {
            std::string line = "Keywords:";
            for (std::size_t i = 0; i < kws.size(); ++i) line += (i ? ", " : " ") + text::normalize_space(kws[i].term);
            blank();
            wrapped(line);
        }
        for (const auto& d : a_.front) division(d, 1);
        for (const auto& d : a_.body) division(d, 1);
        for (const auto& d : a_.back.divisions) division(d, 1);
        if (!markers_.listed().empty()) {
            heading("References", 1);
            for (const auto& le : markers_.listed()) {
                blank();
                wrapped(le.label.value_or("") + " " + le.entry.text());
            }
        }
        if (!a_.back.notes.empty()) {
            heading("Notes", 1);
            for (std::size_t i = 0; i < a_.back.notes.size(); ++i) {
                blank();
                wrapped(std::to_string(i + 1) + ". " + text::normalize_space(inline_text(a_.back.notes[i])));
            }
        }
        return out_;
    }

  private:
    void blank() { out_ += '\n'; }

    void wrapped(const std::string& s, const std::string& indent = {}) {
        auto width = kWidth - std::min(kWidth - 20, indent.size());
        for (const auto& line : text::wrap(s, width)) out_ += indent + line + '\n';
    }

    void heading(const std::string& h, int depth) {
        blank();
        out_ += h + '\n';
        out_ += std::string(text::utf8_length(h), depth == 1 ? '=' : '-') + '\n';
    }

    void division(const Division& d, int depth) {
        if (!d.implicit) {
            std::string h = d.head ? text::normalize_space(inline_text(*d.head)) : std::string();
            if (h.empty() && d.kind == "abstract") h = "Abstract";
            if (!h.empty()) heading(h, depth);
        }
        for (const auto& b : d.blocks) block(b);
        for (const auto& c : d.children) division(c, depth + 1);
    }

    void para(const RichText& rich, const std::string& indent = {}) {
        auto t = text::normalize_space(inline_text(rich));
        if (t.empty()) return;
        blank();
        wrapped(t, indent);
    }

    void block(const Block& b) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Paragraph>) {
                    para(x.content);
                } else if constexpr (std::is_same_v<T, CitBlock>) {
                    para(x.quote, "    ");
                    std::string src;
                    if (const auto* bibl = std::get_if<BiblStruct>(&x.source)) {
                        if (main_title_text(*bibl)) src = format_entry(*bibl, builtin_style("chicago")).text();
                    } else {
                        const auto& t = std::get<RefTarget>(x.source);
                        src = markers_.marker(t).value_or(t.uri);
                    }
                    auto note = text::normalize_space(inline_text(x.qualifiers));
                    if (!note.empty()) src += (src.empty() ? "" : " ") + note;
                    if (!src.empty()) wrapped("-- " + src, "    ");
                } else if constexpr (std::is_same_v<T, FigureBlock>) {
                    blank();
                    wrapped("[Figure: " + text::normalize_space(inline_text(x.caption)) + "]");
                } else if constexpr (std::is_same_v<T, TableBlock>) {
                    blank();
                    wrapped("[Table: " + text::normalize_space(inline_text(x.caption)) + "]");
                } else if constexpr (std::is_same_v<T, FormulaBlock>) {
                    auto doc = parse_fragment(a_, x.markup);
                    auto t = doc ? text::normalize_space(doc->root.text()) : std::string();
                    if (!t.empty()) {
                        blank();
                        wrapped(t, "    ");
                    }
                } else if constexpr (std::is_same_v<T, ListBlock>) {
                    blank();
                    for (const auto& item : x.items) {
                        auto lines = text::wrap(text::normalize_space(inline_text(item)), kWidth - 4);
                        for (std::size_t i = 0; i < lines.size(); ++i) out_ += (i ? "    " : "  * ") + lines[i] + '\n';
                    }
                } else if constexpr (std::is_same_v<T, QuoteBlock>) {
                    para(x.content, "    ");
                } else {
                    auto t = text::normalize_space(x.text);
                    if (!t.empty()) {
                        blank();
                        wrapped(t);
                    }
                }
            },
            b.value);
    }

    std::string inline_text(const RichText& rich) const {
        std::string out;
        for (const auto& in : rich) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, TextRun>) {
                        out += v.text;
                    } else if constexpr (std::is_same_v<T, Emph>) {
                        out += inline_text(v.content);
                    } else if constexpr (std::is_same_v<T, BiblRef>) {
                        out += markers_.marker(v.target).value_or(v.text);
                    } else if constexpr (std::is_same_v<T, AbbrMention>) {
                        out += v.abbr;
                        if (v.expansion) out += " (" + *v.expansion + ")";
                    } else {
                        out += v.text;
                    }
                },
                in.value);
        }
        return out;
    }

    const Article& a_;
    Markers markers_;
    std::string out_;
};

}  // namespace

std::string render_xhtml(const Article& article, const StyleGuide& guide) { return XhtmlWriter(article, guide).run(); }

std::string render_plaintext(const Article& article) { return TextWriter(article).run(); }

}  // namespace tj::render
