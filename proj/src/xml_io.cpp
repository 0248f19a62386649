#include "tj/xml_io.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "tj/text.hpp"

namespace tj {

using xml::Element;

std::size_t ParseReport::error_count() const {
    return static_cast<std::size_t>(
        std::count_if(issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::error; }));
}

namespace {

std::string child_path(const std::string& parent, const Element& child) { return parent + "/" + xml::path_segment(child); }

bool is_tei(const Element& e) { return e.ns == xml::kTeiNamespace; }

void append_text(RichText& rich, std::string s) {
    if (s.empty()) return;
    if (!rich.empty()) {
        if (auto* run = std::get_if<TextRun>(&rich.back().value)) {
            run->text += s;
            return;
        }
    }
    rich.emplace_back(TextRun{std::move(s)});
}

class Builder {
  public:
    explicit Builder(const xml::Document& doc) : doc_(doc) {}

    ParseReport run(const std::optional<std::string>& source_path) {
        ParseReport report;
        const Element& root = doc_.root;
        const std::string root_path = xml::path_segment(root);
        if (root.local != "TEI" || root.ns != xml::kTeiNamespace) {
            error(root_path, "root element must be TEI in namespace " + std::string(xml::kTeiNamespace) + ", found '" +
                                 root.qname + "'" + (root.ns.empty() ? "" : " in namespace " + root.ns));
            report.issues = std::move(issues_);
            return report;
        }
        const Element* header = root.first_child("teiHeader");
        const Element* text = root.first_child("text");
        if (!header) error(root_path, "missing teiHeader");
        if (!text) error(root_path, "missing text");
        for (const auto* c : root.child_elements()) {
            if (c != header && c != text) warn(child_path(root_path, *c), "unexpected element '" + c->qname + "' under TEI dropped");
        }

        Article article;
        article.namespaces = doc_.prefixed_namespaces;
        if (header) article.header = parse_header(*header, child_path(root_path, *header));
        if (text) {
            collect_bibl_ids(*text);
            parse_text(*text, child_path(root_path, *text), article);
        }
        article.source_path = source_path;
        article.id = derive_article_id(article, source_path);

        report.issues = std::move(issues_);
        if (report.error_count() == 0) report.outcome = std::move(article);
        return report;
    }

  private:
    const xml::Document& doc_;
    std::vector<Issue> issues_;
    std::set<std::string> bibl_ids_;

    void error(const std::string& path, std::string message) {
        issues_.push_back(Issue{Severity::error, path, std::move(message)});
    }
    void warn(const std::string& path, std::string message) {
        issues_.push_back(Issue{Severity::warning, path, std::move(message)});
    }

    std::string raw(const Element& e) const { return std::string(doc_.slice(e.range)); }

    static std::string norm(const Element& e) { return text::normalize_space(e.text()); }

    void drop(const Element& e, const std::string& path, std::string_view where) {
        warn(path, "unsupported element '" + e.qname + "' in " + std::string(where) + " dropped");
    }

    std::optional<CalendarDate> date_of(const Element& e, const std::string& path) {
        if (const auto* when = e.attribute("when")) {
            auto d = CalendarDate::parse(when->value);
            if (!d) error(path, "invalid date '" + when->value + "' (expected YYYY, YYYY-MM or YYYY-MM-DD)");
            return d;
        }
        auto content = norm(e);
        if (content.empty()) return std::nullopt;
        auto d = CalendarDate::parse(content);
        if (!d) warn(path, "date text '" + content + "' is not an ISO 8601 date and was ignored");
        return d;
    }

    // ---- header -----------------------------------------------------------

    Header parse_header(const Element& header, const std::string& path) {
        Header h;
        for (const auto* c : header.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("fileDesc") && !h.file_desc) {
                h.file_desc = parse_file_desc(*c, p);
            } else if (c->is("profileDesc")) {
                parse_profile_desc(*c, p, h.profile_desc);
            } else if (c->is("revisionDesc")) {
                parse_revision_desc(*c, p, h.revision_desc);
            } else {
                drop(*c, p, "teiHeader");
            }
        }
        return h;
    }

    FileDesc parse_file_desc(const Element& fd, const std::string& path) {
        FileDesc f;
        f.has_title_stmt = f.has_publication_stmt = f.has_source_desc = false;
        for (const auto* c : fd.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("titleStmt") && !f.has_title_stmt) {
                f.has_title_stmt = true;
                parse_title_stmt(*c, p, f);
            } else if (c->is("publicationStmt") && !f.has_publication_stmt) {
                f.has_publication_stmt = true;
                parse_publication_stmt(*c, p, f);
            } else if (c->is("sourceDesc") && !f.has_source_desc) {
                f.has_source_desc = true;
                for (const auto* s : c->child_elements()) {
                    auto sp = child_path(p, *s);
                    if (s->is("biblStruct")) {
                        f.sources.push_back(parse_bibl(*s, sp));
                    } else {
                        drop(*s, sp, "sourceDesc");
                    }
                }
            } else {
                drop(*c, p, "fileDesc");
            }
        }
        return f;
    }

    void parse_title_stmt(const Element& ts, const std::string& path, FileDesc& f) {
        const Element* main = nullptr;
        for (const auto* t : ts.children_named("title")) {
            if (t->attribute_or("type") == "main") {
                main = t;
                break;
            }
        }
        auto titles = ts.children_named("title");
        if (!main && !titles.empty()) main = titles.front();
        for (const auto* c : ts.child_elements()) {
            auto p = child_path(path, *c);
            if (c == main) {
                f.main_title = inlines(*c, p);
            } else {
                drop(*c, p, "titleStmt");
            }
        }
    }

    void parse_publication_stmt(const Element& ps, const std::string& path, FileDesc& f) {
        for (const auto* c : ps.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("availability")) {
                for (const auto* para : c->child_elements()) {
                    auto pp = child_path(p, *para);
                    if (para->is("p")) {
                        if (!f.availability.empty()) append_text(f.availability, " ");
                        for (auto& in : inlines(*para, pp)) {
                            if (auto* run = std::get_if<TextRun>(&in.value)) {
                                append_text(f.availability, std::move(run->text));
                            } else {
                                f.availability.push_back(std::move(in));
                            }
                        }
                    } else {
                        drop(*para, pp, "availability");
                    }
                }
            } else if (c->is("date")) {
                f.publication_date = date_of(*c, p);
            } else if (c->is("authority")) {
                f.authority = norm(*c);
            } else {
                drop(*c, p, "publicationStmt");
            }
        }
    }

    void parse_profile_desc(const Element& pd, const std::string& path, ProfileDesc& out) {
        for (const auto* c : pd.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("textClass")) {
                for (const auto* k : c->child_elements()) {
                    auto kp = child_path(p, *k);
                    if (k->is("keywords")) {
                        parse_keywords(*k, kp, out);
                    } else {
                        drop(*k, kp, "textClass");
                    }
                }
            } else if (c->is("langUsage")) {
                for (const auto* l : c->children_named("language")) {
                    auto ident = l->attribute_or("ident");
                    if (!ident.empty()) out.languages.push_back(ident);
                }
            } else {
                drop(*c, p, "profileDesc");
            }
        }
    }

    void add_keyword(const Element& term, const std::string& path, const std::optional<std::string>& scheme,
                     ProfileDesc& out) {
        auto t = norm(term);
        if (t.empty()) {
            warn(path, "empty keyword term ignored");
            return;
        }
        out.keywords.push_back(Keyword{t, scheme});
    }

    void parse_keywords(const Element& kw, const std::string& path, ProfileDesc& out) {
        std::optional<std::string> scheme;
        if (const auto* s = kw.attribute("scheme")) scheme = s->value;
        for (const auto* c : kw.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("term")) {
                add_keyword(*c, p, scheme, out);
            } else if (c->is("list")) {
                for (const auto* item : c->child_elements()) {
                    auto ip = child_path(p, *item);
                    if (item->is("head")) continue;
                    if (!item->is("item")) {
                        drop(*item, ip, "keyword list");
                        continue;
                    }
                    auto terms = item->children_named("term");
                    if (terms.empty()) warn(ip, "keyword item without <term> ignored");
                    for (const auto* t : terms) add_keyword(*t, child_path(ip, *t), scheme, out);
                }
            } else {
                drop(*c, p, "keywords");
            }
        }
    }

    void parse_revision_desc(const Element& rd, const std::string& path, RevisionDesc& out) {
        std::vector<std::pair<const Element*, std::string>> changes;
        for (const auto* c : rd.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("change")) {
                changes.emplace_back(c, p);
            } else if (c->is("listChange")) {
                for (const auto* lc : c->children_named("change")) changes.emplace_back(lc, child_path(p, *lc));
            } else {
                drop(*c, p, "revisionDesc");
            }
        }
        for (const auto& [c, p] : changes) {
            const auto* when = c->attribute("when");
            if (!when) {
                error(p, "change without a when attribute");
                continue;
            }
            auto date = CalendarDate::parse(when->value);
            if (!date) {
                error(p, "invalid change date '" + when->value + "'");
                continue;
            }
            Change ch;
            ch.when = *date;
            ch.description = inlines(*c, p);
            if (const auto* type = c->attribute("type"); type && !type->value.empty()) {
                ch.kind = text::to_lower_ascii(type->value);
            } else {
                auto words = text::normalize_space(flatten(ch.description));
                auto first = words.substr(0, words.find(' '));
                while (!first.empty() && !std::isalnum(static_cast<unsigned char>(first.back()))) first.pop_back();
                ch.kind = first.empty() ? "change" : text::to_lower_ascii(first);
            }
            out.changes.push_back(std::move(ch));
        }
    }

    // ---- bibliographic records ------------------------------------------

    Title parse_title(const Element& e, const std::string& path, std::string_view default_level) {
        Title t;
        t.level = e.attribute_or("level", default_level);
        t.type = e.attribute_or("type", "main");
        t.text = inlines(e, path);
        return t;
    }

    Author parse_author(const Element& e, const std::string& path) {
        Author a;
        auto role = e.attribute_or("type", e.attribute_or("role"));
        a.corresponding = (role == "corresp" || role == "corresponding");
        auto elements = e.child_elements();
        if (elements.empty()) {
            a.surname = norm(e);
            return a;
        }
        for (const auto* c : elements) {
            auto p = child_path(path, *c);
            if (c->is("idno")) {
                a.identifiers.push_back(Identifier{c->attribute_or("type"), norm(*c)});
            } else if (c->is("persName")) {
                auto fores = c->children_named("forename");
                auto sur = c->children_named("surname");
                if (fores.empty() && sur.empty()) {
                    a.surname = norm(*c);
                } else {
                    for (const auto* f : fores) a.forenames.push_back(norm(*f));
                    std::string surname;
                    for (const auto* s : sur) {
                        if (!surname.empty()) surname += ' ';
                        surname += norm(*s);
                    }
                    a.surname = surname;
                }
            } else if (c->is("orgName") || c->is("name")) {
                a.surname = norm(*c);
            } else if (c->is("affiliation")) {
                if (a.affiliation) {
                    warn(p, "additional affiliation dropped (one affiliation per author is supported)");
                } else {
                    a.affiliation = parse_affiliation(*c, p);
                }
            } else if (c->is("email")) {
                a.email = norm(*c);
            } else {
                drop(*c, p, "author");
            }
        }
        return a;
    }

    Affiliation parse_affiliation(const Element& e, const std::string& path) {
        Affiliation aff;
        auto elements = e.child_elements();
        if (elements.empty()) {
            if (auto t = norm(e); !t.empty()) aff.org_units.push_back(OrgUnit{"", t});
            return aff;
        }
        for (const auto* c : elements) {
            auto p = child_path(path, *c);
            if (c->is("orgName")) {
                aff.org_units.push_back(OrgUnit{c->attribute_or("type"), norm(*c)});
            } else if (c->is("address") && !aff.address) {
                aff.address = parse_address(*c, p);
            } else {
                drop(*c, p, "affiliation");
            }
        }
        return aff;
    }

    Address parse_address(const Element& e, const std::string& path) {
        Address a;
        for (const auto* c : e.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("settlement")) {
                a.settlement = norm(*c);
            } else if (c->is("postCode")) {
                a.post_code = norm(*c);
            } else if (c->is("country")) {
                a.country = norm(*c);
            } else if (c->is("addrLine") || c->is("street")) {
                std::optional<std::string> kind;
                if (const auto* t = c->attribute("type")) kind = t->value;
                a.lines.push_back(AddressLine{kind, norm(*c)});
            } else {
                drop(*c, p, "address");
            }
        }
        return a;
    }

    Imprint parse_imprint(const Element& e, const std::string& path) {
        Imprint im;
        for (const auto* c : e.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("publisher")) {
                im.publisher = norm(*c);
            } else if (c->is("pubPlace")) {
                im.pub_place = norm(*c);
            } else if (c->is("date")) {
                auto d = date_of(*c, p);
                if (!d) continue;
                ImprintDate id;
                id.date = *d;
                if (const auto* type = c->attribute("type")) {
                    id.role = text::to_lower_ascii(type->value);
                } else if (const auto* typ = c->attribute("typ")) {
                    warn(p, "attribute 'typ' on date read as 'type'");
                    id.role = text::to_lower_ascii(typ->value);
                }
                im.date = std::move(id);
            } else if (c->is("biblScope")) {
                auto kind = c->attribute_or("type", c->attribute_or("unit"));
                im.scopes.push_back(Scope{kind, norm(*c)});
            } else {
                drop(*c, p, "imprint");
            }
        }
        return im;
    }

    Monogr parse_monogr(const Element& e, const std::string& path, bool has_analytic) {
        Monogr m;
        bool have_imprint = false;
        for (const auto* c : e.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("title")) {
                m.titles.push_back(parse_title(*c, p, has_analytic ? "j" : "m"));
            } else if (c->is("author")) {
                m.container_authors.push_back(parse_author(*c, p));
            } else if (c->is("idno")) {
                auto kind = c->attribute_or("type");
                if (text::to_lower_ascii(kind) == "issn" && !m.issn) {
                    m.issn = norm(*c);
                } else {
                    m.identifiers.push_back(Identifier{kind, norm(*c)});
                }
            } else if (c->is("imprint") && !have_imprint) {
                have_imprint = true;
                m.imprint = parse_imprint(*c, p);
            } else {
                drop(*c, p, "monogr");
            }
        }
        return m;
    }

    BiblStruct parse_bibl(const Element& e, const std::string& path) {
        BiblStruct b;
        if (const auto* id = e.attribute("id", xml::kXmlNamespace)) b.xml_id = id->value;
        const Element* monogr = nullptr;
        for (const auto* c : e.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("analytic") && !b.analytic) {
                Analytic a;
                for (const auto* ac : c->child_elements()) {
                    auto ap = child_path(p, *ac);
                    if (ac->is("title")) {
                        a.titles.push_back(parse_title(*ac, ap, "a"));
                    } else if (ac->is("author")) {
                        a.authors.push_back(parse_author(*ac, ap));
                    } else {
                        drop(*ac, ap, "analytic");
                    }
                }
                b.analytic = std::move(a);
            } else if (c->is("monogr") && !monogr) {
                monogr = c;
            } else if (c->is("idno")) {
                b.identifiers.push_back(Identifier{c->attribute_or("type"), norm(*c)});
            } else {
                drop(*c, p, "biblStruct");
            }
        }
        if (monogr) {
            b.monogr = parse_monogr(*monogr, child_path(path, *monogr), b.analytic.has_value());
        } else {
            warn(path, "biblStruct without monogr");
        }
        if (const auto* type = e.attribute("type"); type && !type->value.empty()) {
            b.doc_type.value = type->value;
        } else if (b.analytic) {
            b.doc_type.value = "article";
        } else if (!b.monogr.titles.empty()) {
            b.doc_type.value = "book";
        }
        return b;
    }

    // ---- text -------------------------------------------------------------

    void collect_bibl_ids(const Element& text) {
        xml::walk(text, [&](const Element& e, const std::string&) {
            if (is_tei(e) && e.local == "biblStruct") {
                if (const auto* id = e.attribute("id", xml::kXmlNamespace)) bibl_ids_.insert(id->value);
            }
        });
    }

    RichText inlines(const Element& e, const std::string& path) {
        RichText out;
        for (const auto& node : e.children) {
            if (const auto* t = node.text()) {
                append_text(out, t->value);
                continue;
            }
            const Element* c = node.element();
            if (!c) continue;
            auto p = child_path(path, *c);
            if (!is_tei(*c)) {
                out.emplace_back(OpaqueInline{c->qname, raw(*c), c->text()});
            } else if (c->local == "hi") {
                out.emplace_back(Emph{c->attribute_or("rend"), inlines(*c, p)});
            } else if (c->local == "emph") {
                out.emplace_back(Emph{"emph", inlines(*c, p)});
            } else if (c->local == "ref" || c->local == "ptr") {
                auto target = c->attribute_or("target");
                bool bibl = !target.empty() && target.front() == '#' &&
                            (c->attribute_or("type") == "bibl" || bibl_ids_.count(target.substr(1)) > 0);
                if (bibl) {
                    out.emplace_back(BiblRef{RefTarget{target}, c->text()});
                } else if (!target.empty() && c->child_elements().empty()) {
                    out.emplace_back(Link{target, c->text()});
                } else {
                    out.emplace_back(OpaqueInline{c->qname, raw(*c), c->text()});
                }
            } else if (c->local == "persName" || c->local == "orgName" || c->local == "placeName") {
                NameMention m;
                m.kind = c->local == "persName"  ? NameKind::person
                         : c->local == "orgName" ? NameKind::organization
                                                 : NameKind::place;
                m.text = c->text();
                if (const auto* key = c->attribute("key")) {
                    m.key = key->value;
                } else if (const auto* ref = c->attribute("ref")) {
                    m.key = ref->value;
                }
                out.emplace_back(std::move(m));
            } else if (c->local == "term") {
                std::optional<std::string> kind;
                if (const auto* type = c->attribute("type")) kind = type->value;
                out.emplace_back(TermMention{kind, c->text()});
            } else if (c->local == "abbr") {
                out.emplace_back(AbbrMention{c->text(), std::nullopt});
            } else if (c->local == "choice" && c->first_child("abbr") && c->child_elements().size() <= 2 &&
                       (c->child_elements().size() == 1 || c->first_child("expan"))) {
                std::optional<std::string> expansion;
                if (const auto* ex = c->first_child("expan")) expansion = ex->text();
                out.emplace_back(AbbrMention{c->first_child("abbr")->text(), expansion});
            } else {
                out.emplace_back(OpaqueInline{c->qname, raw(*c), c->text()});
            }
        }
        return out;
    }

    OpaqueBlock opaque(const Element& e) const { return OpaqueBlock{e.qname, raw(e), e.text()}; }

    static bool only_children(const Element& e, std::initializer_list<std::string_view> allowed) {
        for (const auto* c : e.child_elements()) {
            if (!is_tei(*c)) return false;
            if (std::find(allowed.begin(), allowed.end(), c->local) == allowed.end()) return false;
        }
        return !e.has_significant_text();
    }

    Block parse_block(const Element& e, const std::string& path) {
        if (!is_tei(e)) return opaque(e);
        const auto& name = e.local;
        if (name == "p") return Paragraph{inlines(e, path)};
        if (name == "cit" && only_children(e, {"quote", "biblStruct", "ref", "ptr", "note"})) {
            const auto* quote = e.first_child("quote");
            const auto* bibl = e.first_child("biblStruct");
            const Element* ref = e.first_child("ptr");
            if (!ref) ref = e.first_child("ref");
            auto counts_ok = e.children_named("quote").size() <= 1 && e.children_named("biblStruct").size() <= 1 &&
                             e.children_named("note").size() <= 1 &&
                             e.children_named("ptr").size() + e.children_named("ref").size() <= 1;
            if (counts_ok && (bibl != nullptr) != (ref != nullptr)) {
                CitBlock cit{{}, RefTarget{}, {}};
                if (quote) cit.quote = inlines(*quote, child_path(path, *quote));
                if (bibl) {
                    cit.source = parse_bibl(*bibl, child_path(path, *bibl));
                } else {
                    cit.source = RefTarget{ref->attribute_or("target")};
                }
                if (const auto* note = e.first_child("note")) cit.qualifiers = inlines(*note, child_path(path, *note));
                return cit;
            }
            warn(path, "cit needs exactly one biblStruct or reference; kept verbatim");
            return opaque(e);
        }
        if (name == "figure" && only_children(e, {"graphic", "head", "biblStruct"}) &&
            e.children_named("graphic").size() <= 1 && e.children_named("head").size() <= 1 &&
            e.children_named("biblStruct").size() <= 1) {
            FigureBlock fig;
            if (const auto* g = e.first_child("graphic")) fig.graphic = g->attribute_or("url");
            if (const auto* head = e.first_child("head")) fig.caption = inlines(*head, child_path(path, *head));
            if (const auto* bibl = e.first_child("biblStruct")) fig.source = parse_bibl(*bibl, child_path(path, *bibl));
            return fig;
        }
        if (name == "table") {
            TableBlock table{raw(e), {}};
            if (const auto* head = e.first_child("head")) table.caption = inlines(*head, child_path(path, *head));
            return table;
        }
        if (name == "formula") return FormulaBlock{raw(e), e.attribute_or("notation")};
        if (name == "list" && e.attributes.empty() && only_children(e, {"item"})) {
            ListBlock list;
            for (const auto* item : e.child_elements()) list.items.push_back(inlines(*item, child_path(path, *item)));
            return list;
        }
        if (name == "quote" && e.attributes.empty()) return QuoteBlock{inlines(e, path)};
        return opaque(e);
    }

    enum class Region { front, body, back };

    Division parse_division(const Element& e, const std::string& path, Region region, Article& article) {
        Division d;
        d.kind = e.attribute_or("type", "section");
        bool have_head = false;
        for (const auto& node : e.children) {
            if (const auto* t = node.text()) {
                if (auto s = text::normalize_space(t->value); !s.empty()) {
                    warn(path, "text directly inside div wrapped in a paragraph");
                    d.blocks.emplace_back(Paragraph{plain(t->value)});
                }
                continue;
            }
            const Element* c = node.element();
            if (!c) continue;
            auto p = child_path(path, *c);
            if (c->is("head") && !have_head && d.blocks.empty() && d.children.empty()) {
                have_head = true;
                d.head = inlines(*c, p);
            } else if (c->is("div")) {
                d.children.push_back(parse_division(*c, p, region, article));
            } else if (region == Region::back && (c->is("listBibl") || c->is("listBib"))) {
                parse_list_bibl(*c, p, article.back);
            } else {
                d.blocks.push_back(parse_block(*c, p));
            }
        }
        return d;
    }

    void parse_list_bibl(const Element& e, const std::string& path, BackMatter& back) {
        if (e.local == "listBib") warn(path, "'listBib' read as 'listBibl'");
        if (back.reference_list) {
            warn(path, "additional reference list merged into the first");
        } else {
            back.reference_list.emplace();
        }
        for (const auto* c : e.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("biblStruct")) {
                auto b = parse_bibl(*c, p);
                if (!b.xml_id) warn(p, "reference entry without xml:id");
                back.reference_list->entries.push_back(std::move(b));
            } else if (!c->is("head")) {
                drop(*c, p, "listBibl");
            }
        }
    }

    // A back-matter div whose only content is a heading and a reference list.
    static bool is_reference_wrapper(const Element& div) {
        bool has_list = false;
        for (const auto* c : div.child_elements()) {
            if (c->is("listBibl") || c->is("listBib")) {
                has_list = true;
            } else if (!c->is("head")) {
                return false;
            }
        }
        return has_list && !div.has_significant_text();
    }

    std::vector<Division> parse_container(const Element& e, const std::string& path, Region region, Article& article) {
        std::vector<Division> out;
        auto loose = [&]() -> Division& {
            if (out.empty() || !out.back().implicit) {
                Division d;
                d.kind.clear();
                d.implicit = true;
                out.push_back(std::move(d));
            }
            return out.back();
        };
        for (const auto& node : e.children) {
            if (const auto* t = node.text()) {
                if (!text::normalize_space(t->value).empty()) {
                    warn(path, "loose text wrapped in a paragraph");
                    loose().blocks.emplace_back(Paragraph{plain(t->value)});
                }
                continue;
            }
            const Element* c = node.element();
            if (!c) continue;
            auto p = child_path(path, *c);
            if (c->is("div")) {
                if (region == Region::back && is_reference_wrapper(*c)) {
                    for (const auto* l : c->child_elements()) {
                        if (!l->is("head")) parse_list_bibl(*l, child_path(p, *l), article.back);
                    }
                } else {
                    out.push_back(parse_division(*c, p, region, article));
                }
            } else if (region == Region::back && (c->is("listBibl") || c->is("listBib"))) {
                parse_list_bibl(*c, p, article.back);
            } else if (region == Region::back && c->is("note")) {
                article.back.notes.push_back(inlines(*c, p));
            } else {
                loose().blocks.push_back(parse_block(*c, p));
            }
        }
        return out;
    }

    void parse_text(const Element& text, const std::string& path, Article& article) {
        for (const auto* c : text.child_elements()) {
            auto p = child_path(path, *c);
            if (c->is("front")) {
                article.front = parse_container(*c, p, Region::front, article);
            } else if (c->is("body")) {
                article.body = parse_container(*c, p, Region::body, article);
            } else if (c->is("back")) {
                article.back.divisions = parse_container(*c, p, Region::back, article);
            } else {
                warn(p, "unexpected element '" + c->qname + "' in text dropped");
            }
        }
    }
};

// ---- serialization --------------------------------------------------------

Element el(std::string name) { return Element(std::move(name)); }

Element text_el(std::string name, const std::string& value) {
    Element e(std::move(name));
    e.add_text(value);
    e.mixed = true;
    return e;
}

void write_inlines(const RichText& rich, Element& parent);

Element rich_el(std::string name, const RichText& rich) {
    Element e(std::move(name));
    e.mixed = true;
    write_inlines(rich, e);
    return e;
}

void write_inlines(const RichText& rich, Element& parent) {
    for (const auto& in : rich) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, TextRun>) {
                    parent.add_text(v.text);
                } else if constexpr (std::is_same_v<T, Emph>) {
                    auto e = rich_el(v.rend == "emph" ? "emph" : "hi", v.content);
                    if (!v.rend.empty() && v.rend != "emph") e.set("rend", v.rend);
                    parent.add(std::move(e));
                } else if constexpr (std::is_same_v<T, BiblRef>) {
                    auto e = text_el("ref", v.text);
                    e.set("target", v.target.uri).set("type", "bibl");
                    parent.add(std::move(e));
                } else if constexpr (std::is_same_v<T, NameMention>) {
                    auto e = text_el(*element_name(Inline(v)), v.text);
                    if (v.key) e.set("key", *v.key);
                    parent.add(std::move(e));
                } else if constexpr (std::is_same_v<T, TermMention>) {
                    auto e = text_el("term", v.text);
                    if (v.kind) e.set("type", *v.kind);
                    parent.add(std::move(e));
                } else if constexpr (std::is_same_v<T, AbbrMention>) {
                    if (v.expansion) {
                        auto choice = el("choice");
                        choice.mixed = true;
                        choice.add(text_el("abbr", v.abbr));
                        choice.add(text_el("expan", *v.expansion));
                        parent.add(std::move(choice));
                    } else {
                        parent.add(text_el("abbr", v.abbr));
                    }
                } else if constexpr (std::is_same_v<T, Link>) {
                    auto e = text_el("ref", v.text);
                    e.set("target", v.target);
                    parent.add(std::move(e));
                } else {
                    parent.add_raw(v.markup);
                }
            },
            in.value);
    }
}

void add_optional(Element& parent, std::string name, const std::optional<std::string>& value) {
    if (value) parent.add(text_el(std::move(name), *value));
}

Element idno_el(const Identifier& id) {
    auto e = text_el("idno", id.value);
    if (!id.kind.empty()) e.set("type", id.kind);
    return e;
}

Element title_el(const Title& t) {
    auto e = rich_el("title", t.text);
    if (!t.level.empty()) e.set("level", t.level);
    if (!t.type.empty()) e.set("type", t.type);
    return e;
}

Element author_el(const Author& a) {
    auto e = el("author");
    if (a.corresponding) e.set("type", "corresp");
    bool structured = !a.forenames.empty() || !a.identifiers.empty() || a.affiliation || a.email;
    if (!structured) {
        e.add_text(a.surname);
        e.mixed = true;
        return e;
    }
    for (const auto& id : a.identifiers) e.add(idno_el(id));
    if (a.forenames.empty()) {
        e.add(text_el("name", a.surname));
    } else {
        auto pers = el("persName");
        for (const auto& f : a.forenames) pers.add(text_el("forename", f));
        pers.add(text_el("surname", a.surname));
        e.add(std::move(pers));
    }
    if (a.affiliation) {
        auto aff = el("affiliation");
        for (const auto& ou : a.affiliation->org_units) {
            auto o = text_el("orgName", ou.name);
            if (!ou.kind.empty()) o.set("type", ou.kind);
            aff.add(std::move(o));
        }
        if (const auto& addr = a.affiliation->address) {
            auto ad = el("address");
            add_optional(ad, "settlement", addr->settlement);
            add_optional(ad, "postCode", addr->post_code);
            add_optional(ad, "country", addr->country);
            for (const auto& line : addr->lines) {
                auto l = text_el("addrLine", line.text);
                if (line.kind) l.set("type", *line.kind);
                ad.add(std::move(l));
            }
            aff.add(std::move(ad));
        }
        e.add(std::move(aff));
    }
    add_optional(e, "email", a.email);
    return e;
}

Element bibl_el(const BiblStruct& b) {
    auto e = el("biblStruct");
    e.set("type", b.doc_type.value);
    if (b.xml_id) e.set("xml:id", *b.xml_id);
    if (b.analytic) {
        auto an = el("analytic");
        for (const auto& t : b.analytic->titles) an.add(title_el(t));
        for (const auto& a : b.analytic->authors) an.add(author_el(a));
        e.add(std::move(an));
    }
    auto mo = el("monogr");
    for (const auto& a : b.monogr.container_authors) mo.add(author_el(a));
    for (const auto& t : b.monogr.titles) mo.add(title_el(t));
    if (b.monogr.issn) mo.add(idno_el(Identifier{"ISSN", *b.monogr.issn}));
    for (const auto& id : b.monogr.identifiers) mo.add(idno_el(id));
    auto im = el("imprint");
    const auto& imprint = b.monogr.imprint;
    add_optional(im, "publisher", imprint.publisher);
    add_optional(im, "pubPlace", imprint.pub_place);
    if (imprint.date) {
        auto d = el("date");
        d.set("type", imprint.date->role).set("when", imprint.date->date.raw);
        im.add(std::move(d));
    }
    for (const auto& s : imprint.scopes) {
        auto sc = text_el("biblScope", s.value);
        sc.set("type", s.kind);
        im.add(std::move(sc));
    }
    mo.add(std::move(im));
    e.add(std::move(mo));
    for (const auto& id : b.identifiers) e.add(idno_el(id));
    return e;
}

void write_block(const Block& block, Element& parent) {
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Paragraph>) {
                parent.add(rich_el("p", v.content));
            } else if constexpr (std::is_same_v<T, CitBlock>) {
                auto cit = el("cit");
                cit.add(rich_el("quote", v.quote));
                if (const auto* bibl = std::get_if<BiblStruct>(&v.source)) {
                    cit.add(bibl_el(*bibl));
                } else {
                    auto ptr = el("ptr");
                    ptr.set("target", std::get<RefTarget>(v.source).uri).set("type", "bibl");
                    cit.add(std::move(ptr));
                }
                if (!v.qualifiers.empty()) cit.add(rich_el("note", v.qualifiers));
                parent.add(std::move(cit));
            } else if constexpr (std::is_same_v<T, FigureBlock>) {
                auto fig = el("figure");
                if (!v.graphic.empty()) {
                    auto g = el("graphic");
                    g.set("url", v.graphic);
                    fig.add(std::move(g));
                }
                if (!v.caption.empty()) fig.add(rich_el("head", v.caption));
                if (v.source) fig.add(bibl_el(*v.source));
                parent.add(std::move(fig));
            } else if constexpr (std::is_same_v<T, ListBlock>) {
                auto list = el("list");
                for (const auto& item : v.items) list.add(rich_el("item", item));
                parent.add(std::move(list));
            } else if constexpr (std::is_same_v<T, QuoteBlock>) {
                parent.add(rich_el("quote", v.content));
            } else {
                parent.add_raw(v.markup);
            }
        },
        block.value);
}

void write_division(const Division& d, Element& parent) {
    if (d.implicit) {
        for (const auto& b : d.blocks) write_block(b, parent);
        return;
    }
    auto div = el("div");
    div.set("type", d.kind);
    if (d.head) div.add(rich_el("head", *d.head));
    for (const auto& b : d.blocks) write_block(b, div);
    for (const auto& c : d.children) write_division(c, div);
    parent.add(std::move(div));
}

}  // namespace

ParseReport parse_article(const xml::Document& doc, const std::optional<std::string>& source_path) {
    return Builder(doc).run(source_path);
}

ParseReport parse_article(std::string bytes, const std::optional<std::string>& source_path) {
    try {
        auto doc = xml::parse(std::move(bytes));
        return parse_article(doc, source_path);
    } catch (const xml::SyntaxError& e) {
        ParseReport report;
        report.issues.push_back(Issue{Severity::error, e.path(),
                                      "line " + std::to_string(e.line()) + ", column " + std::to_string(e.column()) +
                                          ": " + e.what()});
        return report;
    }
}

std::string element_name(const Block& block) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Paragraph>) return "p";
            if constexpr (std::is_same_v<T, CitBlock>) return "cit";
            if constexpr (std::is_same_v<T, FigureBlock>) return "figure";
            if constexpr (std::is_same_v<T, TableBlock>) return "table";
            if constexpr (std::is_same_v<T, FormulaBlock>) return "formula";
            if constexpr (std::is_same_v<T, ListBlock>) return "list";
            if constexpr (std::is_same_v<T, QuoteBlock>) return "quote";
            if constexpr (std::is_same_v<T, OpaqueBlock>) return v.qname;
        },
        block.value);
}

std::optional<std::string> element_name(const Inline& in) {
    return std::visit(
        [](const auto& v) -> std::optional<std::string> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, TextRun>) return std::nullopt;
            if constexpr (std::is_same_v<T, Emph>) return v.rend == "emph" ? "emph" : "hi";
            if constexpr (std::is_same_v<T, BiblRef> || std::is_same_v<T, Link>) return "ref";
            if constexpr (std::is_same_v<T, NameMention>) {
                switch (v.kind) {
                    case NameKind::person: return "persName";
                    case NameKind::organization: return "orgName";
                    case NameKind::place: return "placeName";
                }
                return "name";
            }
            if constexpr (std::is_same_v<T, TermMention>) return "term";
            if constexpr (std::is_same_v<T, AbbrMention>) return v.expansion ? "choice" : "abbr";
            if constexpr (std::is_same_v<T, OpaqueInline>) return v.qname;
        },
        in.value);
}

xml::Element to_tei(const Article& a) {
    auto root = el("TEI");
    root.set("xmlns", std::string(xml::kTeiNamespace));
    for (const auto& ns : a.namespaces) root.set("xmlns:" + ns.prefix, ns.uri);

    auto header = el("teiHeader");
    if (const auto& fd = a.header.file_desc) {
        auto file_desc = el("fileDesc");
        if (fd->has_title_stmt) {
            auto ts = el("titleStmt");
            auto title = rich_el("title", fd->main_title);
            title.set("level", "a").set("type", "main");
            ts.add(std::move(title));
            file_desc.add(std::move(ts));
        }
        if (fd->has_publication_stmt) {
            auto ps = el("publicationStmt");
            if (!fd->availability.empty()) {
                auto av = el("availability");
                av.add(rich_el("p", fd->availability));
                ps.add(std::move(av));
            }
            if (fd->publication_date) {
                auto d = text_el("date", fd->publication_date->raw);
                d.set("when", fd->publication_date->raw);
                ps.add(std::move(d));
            }
            if (!fd->authority.empty()) ps.add(text_el("authority", fd->authority));
            file_desc.add(std::move(ps));
        }
        if (fd->has_source_desc) {
            auto sd = el("sourceDesc");
            for (const auto& s : fd->sources) sd.add(bibl_el(s));
            file_desc.add(std::move(sd));
        }
        header.add(std::move(file_desc));
    }

    auto profile = el("profileDesc");
    const auto& pd = a.header.profile_desc;
    if (!pd.languages.empty()) {
        auto lu = el("langUsage");
        for (const auto& l : pd.languages) {
            auto lang = el("language");
            lang.set("ident", l);
            lu.add(std::move(lang));
        }
        profile.add(std::move(lu));
    }
    if (!pd.keywords.empty()) {
        auto tc = el("textClass");
        std::size_t i = 0;
        while (i < pd.keywords.size()) {
            auto kw = el("keywords");
            const auto& scheme = pd.keywords[i].scheme;
            if (scheme) kw.set("scheme", *scheme);
            auto list = el("list");
            list.add(text_el("head", "Keywords"));
            while (i < pd.keywords.size() && pd.keywords[i].scheme == scheme) {
                auto item = el("item");
                item.add(text_el("term", pd.keywords[i].term));
                list.add(std::move(item));
                ++i;
            }
            kw.add(std::move(list));
            tc.add(std::move(kw));
        }
        profile.add(std::move(tc));
    }
    header.add(std::move(profile));

    auto revision = el("revisionDesc");
    for (const auto& ch : a.header.revision_desc.changes) {
        auto c = rich_el("change", ch.description);
        c.set("type", ch.kind).set("when", ch.when.raw);
        revision.add(std::move(c));
    }
    header.add(std::move(revision));
    root.add(std::move(header));

    auto text = el("text");
    if (!a.front.empty()) {
        auto front = el("front");
        for (const auto& d : a.front) write_division(d, front);
        text.add(std::move(front));
    }
    auto body = el("body");
    for (const auto& d : a.body) write_division(d, body);
    text.add(std::move(body));
    if (!a.back.empty()) {
        auto back = el("back");
        for (const auto& d : a.back.divisions) write_division(d, back);
        if (a.back.reference_list) {
            auto refs = el("div");
            refs.set("type", "references");
            auto list = el("listBibl");
            for (const auto& b : a.back.reference_list->entries) list.add(bibl_el(b));
            refs.add(std::move(list));
            back.add(std::move(refs));
        }
        for (const auto& n : a.back.notes) back.add(rich_el("note", n));
        text.add(std::move(back));
    }
    root.add(std::move(text));
    return root;
}

std::string serialize_article(const Article& article) { return xml::write(to_tei(article)); }

}  // namespace tj
