#include "tj/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "tj/io.hpp"
#include "tj/paths.hpp"
#include "tj/text.hpp"

namespace tj::corpus {

const Article* Corpus::find(const std::string& id) const {
    auto it = articles.find(id);
    return it == articles.end() ? nullptr : &it->second;
}

namespace {

ParseReport load_one(const std::filesystem::path& path) {
    std::string bytes;
    try {
        bytes = io::read_file(path);
    } catch (const Error& e) {
        ParseReport r;
        r.issues.push_back(Issue{Severity::error, "", e.what()});
        return r;
    }
    return parse_article(std::move(bytes), path.generic_string());
}

std::string basename_id(const std::filesystem::path& path) { return path.stem().string(); }

}  // namespace

Corpus load_corpus(std::vector<std::filesystem::path> paths) {
    std::sort(paths.begin(), paths.end());
    paths.erase(std::unique(paths.begin(), paths.end()), paths.end());

    std::vector<ParseReport> reports(paths.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (auto i = next++; i < paths.size(); i = next++) reports[i] = load_one(paths[i]);
    };
    auto threads = std::min<std::size_t>(paths.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    Corpus c;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        LoadRecord rec;
        rec.path = paths[i].generic_string();
        rec.report = std::move(reports[i]);
        if (rec.report.ok()) {
            rec.id = rec.report.outcome->id;
            if (auto prior = c.articles.find(rec.id); prior != c.articles.end()) {
                rec.report.issues.push_back(Issue{Severity::error, "TEI[1]",
                                                  "duplicate article id '" + rec.id + "' (already loaded from " +
                                                      prior->second.source_path.value_or("?") + ")"});
                rec.report.outcome.reset();
            } else {
                c.articles.emplace(rec.id, *rec.report.outcome);
                rec.accepted = true;
            }
        } else if (rec.id.empty()) {
            rec.id = basename_id(paths[i]);
        }
        c.records.push_back(std::move(rec));
    }
    return c;
}

Corpus load_directory(const std::filesystem::path& dir) { return load_corpus(io::xml_files(dir)); }

Corpus from_articles(std::vector<Article> articles) {
    Corpus c;
    for (auto& a : articles) {
        auto id = a.id;
        LoadRecord rec;
        rec.path = a.source_path.value_or(id);
        rec.id = id;
        rec.accepted = true;
        rec.report.outcome = a;
        if (!c.articles.emplace(id, std::move(a)).second) throw Error("duplicate article id '" + id + "'");
        c.records.push_back(std::move(rec));
    }
    std::sort(c.records.begin(), c.records.end(), [](const LoadRecord& x, const LoadRecord& y) { return x.path < y.path; });
    return c;
}

bool path_less(std::string_view a, std::string_view b) {
    while (!a.empty() && !b.empty()) {
        auto sa = a.find('/');
        auto sb = b.find('/');
        auto ea = a.substr(0, sa);
        auto eb = b.substr(0, sb);
        auto split = [](std::string_view s) -> std::pair<std::string_view, long> {
            auto open = s.rfind('[');
            if (open == std::string_view::npos || s.back() != ']') return {s, 0};
            return {s.substr(0, open), std::strtol(std::string(s.substr(open + 1)).c_str(), nullptr, 10)};
        };
        auto [na, ia] = split(ea);
        auto [nb, ib] = split(eb);
        if (na != nb) return na < nb;
        if (ia != ib) return ia < ib;
        a = sa == std::string_view::npos ? std::string_view() : a.substr(sa + 1);
        b = sb == std::string_view::npos ? std::string_view() : b.substr(sb + 1);
    }
    return a.empty() && !b.empty();
}

// ---- indexes ---------------------------------------------------------------

namespace {

std::string index_key(std::string_view s) { return text::casefold(text::normalize_space(s)); }

struct Group {
    std::map<std::string, std::size_t> forms;
    std::vector<Locator> locators;
};

using Groups = std::map<std::pair<std::string, std::string>, Group>;

void add_mention(Groups& groups, const std::set<std::string>& kinds, const std::string& kind, const std::string& display,
                 Locator loc) {
    if (!kinds.count(kind)) return;
    auto shown = text::normalize_space(display);
    auto key = text::casefold(shown);
    if (key.empty()) return;
    auto& g = groups[{kind, key}];
    ++g.forms[shown];
    g.locators.push_back(std::move(loc));
}

std::string author_form(const Author& a) {
    if (a.is_organization()) return a.surname;
    std::string out = a.surname + ",";
    for (const auto& f : a.forenames) out += " " + f;
    return out;
}

void index_article(const Article& a, const std::set<std::string>& kinds, Groups& groups) {
    if (const auto* source = a.source()) {
        const auto& authors = source->primary_authors();
        for (std::size_t i = 0; i < authors.size(); ++i) {
            add_mention(groups, kinds, "author", author_form(authors[i]),
                        Locator{a.id, paths::primary_author(paths::source(0), *source, i)});
        }
    }
    const auto& profile = a.header.profile_desc;
    auto kw_paths = paths::keywords(profile);
    for (std::size_t i = 0; i < profile.keywords.size(); ++i) {
        add_mention(groups, kinds, "keyword", profile.keywords[i].term, Locator{a.id, kw_paths[i]});
    }

    struct Mentions : paths::TextVisitor {
        const Article& a;
        const std::set<std::string>& kinds;
        Groups& groups;
        Mentions(const Article& art, const std::set<std::string>& k, Groups& g) : a(art), kinds(k), groups(g) {}

        void inline_node(const Inline& in, const std::string& path) override {
            if (const auto* n = std::get_if<NameMention>(&in.value)) {
                const char* kind = n->kind == NameKind::person         ? "person"
                                   : n->kind == NameKind::organization ? "organization"
                                                                       : "place";
                add_mention(groups, kinds, kind, n->text, Locator{a.id, path});
            } else if (const auto* t = std::get_if<TermMention>(&in.value)) {
                if (t->kind && text::casefold(*t->kind) == "software") {
                    add_mention(groups, kinds, "software", t->text, Locator{a.id, path});
                }
            } else if (const auto* ab = std::get_if<AbbrMention>(&in.value)) {
                add_mention(groups, kinds, "abbreviation", ab->abbr, Locator{a.id, path});
            }
        }
    } visitor(a, kinds, groups);
    paths::walk_text(a, visitor);
}

}  // namespace

std::vector<IndexEntry> build_indexes(const Corpus& c, const std::set<std::string>& kinds) {
    for (const auto& k : kinds) {
        if (!kIndexKinds.count(k)) throw Error("unknown index kind '" + k + "'");
    }
    Groups groups;
    for (const auto& [_, a] : c.articles) index_article(a, kinds, groups);

    std::vector<IndexEntry> out;
    for (auto& [kk, g] : groups) {
        IndexEntry e;
        e.kind = kk.first;
        e.key = kk.second;
        std::size_t best = 0;
        for (const auto& [form, n] : g.forms) {
            if (n > best) {
                best = n;
                e.display = form;
            }
        }
        std::sort(g.locators.begin(), g.locators.end());
        g.locators.erase(std::unique(g.locators.begin(), g.locators.end()), g.locators.end());
        e.locators = std::move(g.locators);
        out.push_back(std::move(e));
    }
    return out;
}

// ---- unified bibliography --------------------------------------------------

std::string dedup_key(const BiblStruct& b) {
    if (auto doi = b.doi()) {
        auto d = text::to_lower_ascii(text::normalize_space(*doi));
        if (!d.empty()) return "doi:" + d;
    }
    const auto& authors = b.primary_authors();
    std::string surname = authors.empty() ? std::string() : index_key(authors.front().surname);
    auto year = b.year();
    const auto* title = b.main_title();
    return "ref:" + surname + "|" + (year ? std::to_string(*year) : std::string()) + "|" +
           (title ? text::casefold(normalize_title(title->text)) : std::string());
}

std::vector<UnifiedEntry> unified_bibliography(const Corpus& c) {
    std::map<std::string, UnifiedEntry> merged;
    for (const auto& [id, a] : c.articles) {
        if (!a.back.reference_list) continue;
        for (const auto& b : a.back.reference_list->entries) {
            auto key = dedup_key(b);
            auto [it, fresh] = merged.try_emplace(key);
            if (fresh) {
                it->second.key = key;
                it->second.record = b;
            }
            auto& citing = it->second.citing;
            if (citing.empty() || citing.back() != id) citing.push_back(id);
        }
    }
    std::vector<UnifiedEntry> out;
    for (auto& [_, e] : merged) out.push_back(std::move(e));
    return out;
}

// ---- corrigenda ------------------------------------------------------------

std::vector<CorrigendaEntry> corrigenda(const Corpus& c, const std::string& kind) {
    std::vector<CorrigendaEntry> out;
    for (const auto& [id, a] : c.articles) {
        for (const auto& ch : a.header.revision_desc.changes) {
            if (ch.kind == kind) out.push_back(CorrigendaEntry{id, ch.when, ch.description});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const CorrigendaEntry& x, const CorrigendaEntry& y) {
        if (x.when.first_day() != y.when.first_day()) return x.when.first_day() > y.when.first_day();
        return x.article_id < y.article_id;
    });
    return out;
}

// ---- query -----------------------------------------------------------------

std::optional<NodeKind> node_kind_from_string(std::string_view s) {
    std::string t(s);
    if (t.size() > 8 && t.ends_with("-mention")) t.resize(t.size() - 8);
    if (t == "person") return NodeKind::person;
    if (t == "org" || t == "organization") return NodeKind::organization;
    if (t == "place") return NodeKind::place;
    if (t == "term") return NodeKind::term;
    if (t == "abbr" || t == "abbreviation") return NodeKind::abbreviation;
    if (s == "paragraph") return NodeKind::paragraph;
    if (s == "heading") return NodeKind::heading;
    if (s == "any") return NodeKind::any;
    return std::nullopt;
}

std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::person: return "person";
        case NodeKind::organization: return "organization";
        case NodeKind::place: return "place";
        case NodeKind::term: return "term";
        case NodeKind::abbreviation: return "abbreviation";
        case NodeKind::paragraph: return "paragraph";
        case NodeKind::heading: return "heading";
        case NodeKind::any: return "any";
    }
    return "any";
}

bool date_in_range(const CalendarDate& d, const CalendarDate& from, const CalendarDate& to) {
    return d.last_day() >= from.first_day() && d.first_day() <= to.last_day();
}

namespace {

bool cites_surname(const Article& a, const std::string& wanted) {
    if (!a.back.reference_list) return false;
    auto key = index_key(wanted);
    auto match = [&](const std::vector<Author>& authors) {
        return std::any_of(authors.begin(), authors.end(), [&](const Author& au) { return index_key(au.surname) == key; });
    };
    for (const auto& b : a.back.reference_list->entries) {
        if (b.analytic && match(b.analytic->authors)) return true;
        if (match(b.monogr.container_authors)) return true;
    }
    return false;
}

class Matcher : public paths::TextVisitor {
  public:
    Matcher(const Article& a, NodeKind kind, const std::optional<std::string>& needle, std::vector<QueryHit>& out)
        : a_(a), kind_(kind), out_(out) {
        if (needle) needle_ = text::casefold(*needle);
    }

    void heading(const RichText& rich, const std::string& path) override {
        consider(NodeKind::heading, normalize_title(rich), path);
    }

    void block(const Block& b, const std::string& path) override {
        if (const auto* p = std::get_if<Paragraph>(&b.value)) consider(NodeKind::paragraph, normalize_title(p->content), path);
    }

    void inline_node(const Inline& in, const std::string& path) override {
        if (const auto* n = std::get_if<NameMention>(&in.value)) {
            auto k = n->kind == NameKind::person         ? NodeKind::person
                     : n->kind == NameKind::organization ? NodeKind::organization
                                                         : NodeKind::place;
            consider(k, text::normalize_space(n->text), path);
        } else if (const auto* t = std::get_if<TermMention>(&in.value)) {
            consider(NodeKind::term, text::normalize_space(t->text), path);
        } else if (const auto* ab = std::get_if<AbbrMention>(&in.value)) {
            auto s = text::normalize_space(ab->abbr);
            if (ab->expansion) s += " (" + text::normalize_space(*ab->expansion) + ")";
            consider(NodeKind::abbreviation, s, path);
        }
    }

  private:
    void consider(NodeKind k, std::string snippet, const std::string& path) {
        if (kind_ != NodeKind::any && kind_ != k) return;
        if (needle_ && text::casefold(snippet).find(*needle_) == std::string::npos) return;
        out_.push_back(QueryHit{a_.id, path, std::move(snippet)});
    }

    const Article& a_;
    NodeKind kind_;
    std::optional<std::string> needle_;
    std::vector<QueryHit>& out_;
};

}  // namespace

std::vector<QueryHit> query(const Corpus& c, const Query& q) {
    if (!q.valid()) throw Error("query needs at least one of kind, text, date range or cited surname");
    std::vector<QueryHit> out;
    for (const auto& [id, a] : c.articles) {
        if (q.date_range) {
            auto d = document_date(a);
            if (!d || !date_in_range(*d, q.date_range->first, q.date_range->second)) continue;
        }
        if (q.cites_surname && !cites_surname(a, *q.cites_surname)) continue;
        Matcher m(a, q.kind.value_or(NodeKind::any), q.text, out);
        paths::walk_text(a, m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- pages -----------------------------------------------------------------

namespace {

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

std::string page(const std::string& title, xml::Element content) {
    auto html = el("html");
    html.set("xmlns", std::string(xml::kXhtmlNamespace));
    auto head = el("head");
    auto meta = el("meta");
    meta.set("charset", "UTF-8");
    head.add(std::move(meta));
    head.add(text_el("title", {}, title));
    html.add(std::move(head));
    auto body = el("body");
    body.add(std::move(content));
    html.add(std::move(body));
    return xml::write(html);
}

std::string kind_heading(const std::string& kind) {
    if (kind == "author") return "Authors";
    if (kind == "organization") return "Organizations";
    if (kind == "person") return "People";
    if (kind == "place") return "Places";
    if (kind == "software") return "Software";
    if (kind == "keyword") return "Keywords";
    if (kind == "abbreviation") return "Abbreviations";
    return kind;
}

void add_inlines(xml::Element& parent, const RichText& rich) {
    parent.mixed = true;
    parent.add_text(flatten(rich));
}

}  // namespace

std::string index_xhtml(const std::vector<IndexEntry>& entries) {
    auto root = el("div", "tj-index");
    root.add(text_el("h1", {}, "Index"));
    std::string current;
    std::optional<xml::Element> section;
    std::optional<xml::Element> list;
    auto flush = [&] {
        if (section) {
            section->add(std::move(*list));
            root.add(std::move(*section));
        }
    };
    for (const auto& e : entries) {
        if (e.kind != current) {
            flush();
            current = e.kind;
            section = el("section", "tj-index-kind");
            section->set("data-kind", e.kind);
            section->add(text_el("h2", {}, kind_heading(e.kind)));
            list = el("ul");
        }
        auto li = el("li", "tj-index-entry");
        li.set("data-key", e.key);
        li.add(text_el("span", "tj-index-display", e.display));
        auto locs = el("ul", "tj-locators");
        for (const auto& l : e.locators) {
            auto item = el("li", "tj-locator");
            item.mixed = true;
            item.add(text_el("span", "tj-article", l.id));
            item.add_text(" ");
            item.add(text_el("code", "tj-path", l.path));
            locs.add(std::move(item));
        }
        li.add(std::move(locs));
        list->add(std::move(li));
    }
    flush();
    return page("Index", std::move(root));
}

std::string unibib_xhtml(const std::vector<UnifiedEntry>& entries, const render::StyleGuide& guide) {
    auto root = el("div", "tj-unibib");
    root.add(text_el("h1", {}, "Bibliography"));
    auto list = el("ul");
    for (const auto& e : entries) {
        auto li = el("li", "tj-unibib-entry");
        li.mixed = true;
        li.set("data-key", e.key);
        if (e.record.main_title()) {
            auto entry = el("span", "tj-biblio-entry");
            entry.mixed = true;
            render::append_entry(entry, render::format_entry(e.record, guide));
            li.add(std::move(entry));
        } else {
            li.add(text_el("span", "tj-biblio-entry", "[untitled]"));
        }
        std::string citing;
        for (const auto& id : e.citing) citing += (citing.empty() ? "" : ", ") + id;
        li.add_text(" ");
        li.add(text_el("span", "tj-citing", "Cited by: " + citing));
        list.add(std::move(li));
    }
    root.add(std::move(list));
    return page("Bibliography", std::move(root));
}

std::string corrigenda_xhtml(const std::vector<CorrigendaEntry>& entries) {
    auto root = el("div", "tj-corrigenda");
    root.add(text_el("h1", {}, "Corrigenda"));
    if (entries.empty()) {
        root.add(text_el("p", "tj-empty", "No corrections."));
    } else {
        auto list = el("ul");
        for (const auto& e : entries) {
            auto li = el("li", "tj-corrigendum");
            li.mixed = true;
            li.add(text_el("span", "tj-date", e.when.raw));
            li.add_text(" ");
            li.add(text_el("span", "tj-article", e.article_id));
            li.add_text(" ");
            auto desc = el("span", "tj-description");
            add_inlines(desc, e.description);
            li.add(std::move(desc));
            list.add(std::move(li));
        }
        root.add(std::move(list));
    }
    return page("Corrigenda", std::move(root));
}

}  // namespace tj::corpus
