#include "tj/validator.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "json.hpp"

#include "tj/io.hpp"
#include "tj/paths.hpp"
#include "tj/text.hpp"
#include "tj/xml_io.hpp"

namespace tj {

const std::vector<Rule>& rules() {
    static const std::vector<Rule> kRules = {
        {"R1", Severity::error, "The header has a fileDesc containing titleStmt, publicationStmt and sourceDesc.",
         "These three parts carry the title, the publication and rights statement, and the bibliographic "
         "description; downstream tools rely on all of them."},
        {"R2", Severity::error, "sourceDesc holds exactly one biblStruct.",
         "The article's own bibliographic data lives in a single structured record so there is one place to "
         "read it from."},
        {"R3", Severity::error,
         "The titleStmt title equals the main analytic title of the source record (whitespace-normalized text).",
         "Title duplication: the title is repeated in titleStmt so generic TEI tools can find it without "
         "understanding biblStruct. Markup differences are ignored; only the text must agree."},
        {"R4", Severity::error,
         "The source record has an analytic part with at least one author and exactly one main title, and a "
         "monogr part with exactly one main title.",
         "The analytic part describes the article itself and the monogr part the journal; each needs an "
         "unambiguous title."},
        {"R5", Severity::error,
         "Every biblScope type is one of vol, issue, fpage, lpage, pp; no type repeats within an imprint; "
         "fpage does not exceed lpage.",
         "The five scope kinds are vol (volume), issue, fpage (first page), lpage (last page) and pp (page "
         "count when full pagination is unknown). A closed list keeps scopes machine-readable."},
        {"R6", Severity::warning,
         "Each source author has forenames and a surname; a corresponding author has an email address that "
         "contains '@'.",
         "Author records feed indexes and contact details, so names should be split and the corresponding "
         "author reachable."},
        {"R7", Severity::warning,
         "Every orgName type in an affiliation comes from the configured vocabulary (and every biblStruct type "
         "from the document-type vocabulary, when one is configured).",
         "A fixed set of organisational levels makes affiliations comparable across articles."},
        {"R8", Severity::error,
         "The body is not empty, abstracts appear only in front, and front holds at most one abstract.",
         "Front matter carries the abstract and the body the full text; renderers depend on that split."},
        {"R9", Severity::error, "Every bibliographic reference and cit pointer resolves to a reference-list entry.",
         "Citation links must point at an identified entry so numbering and hyperlinks can be generated."},
        {"R10", Severity::warning, "Revision changes are in non-decreasing date order.",
         "The revision history records editorial stages in sequence; out-of-order entries usually mean a "
         "typing error in a date."},
        {"R11", Severity::warning, "The profileDesc lists at least one keyword.",
         "Keywords support quick search and the keyword index."},
        {"R12", Severity::error, "Reference-list entries have unique xml:id values and each has a main title.",
         "Entries are citation targets and are rendered in styled bibliographies; both need an id and a title."},
    };
    return kRules;
}

const Rule* find_rule(std::string_view id) {
    for (const auto& r : rules()) {
        if (r.id == id) return &r;
    }
    return nullptr;
}

std::string explain(std::string_view rule_id) {
    const auto* r = find_rule(rule_id);
    if (!r) throw Error("unknown rule '" + std::string(rule_id) + "'");
    return r->id + " (" + std::string(to_string(r->severity)) + "): " + r->description + "\n" + r->rationale;
}

namespace {

std::set<std::string> string_set(const nlohmann::json& j, const char* key) {
    if (!j.is_array()) throw Error(std::string(key) + " must be an array of strings");
    std::set<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw Error(std::string(key) + " must be an array of strings");
        out.insert(v.get<std::string>());
    }
    return out;
}

}  // namespace

ValidatorConfig ValidatorConfig::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(std::string("invalid validator config: ") + e.what());
    }
    if (!j.is_object()) throw Error("validator config must be a JSON object");
    ValidatorConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "org_unit_vocabulary") {
            cfg.org_unit_vocabulary = string_set(value, "org_unit_vocabulary");
        } else if (key == "doc_type_vocabulary") {
            cfg.doc_type_vocabulary = string_set(value, "doc_type_vocabulary");
        } else if (key == "severity_overrides") {
            if (!value.is_object()) throw Error("severity_overrides must be an object");
            for (const auto& [rule, sev] : value.items()) {
                if (!find_rule(rule)) throw Error("severity_overrides names unknown rule '" + rule + "'");
                if (!sev.is_string()) throw Error("severity for " + rule + " must be a string");
                cfg.severity_overrides[rule] = severity_from_string(sev.get<std::string>());
            }
        } else {
            throw Error("unknown validator config key '" + key + "'");
        }
    }
    return cfg;
}

ValidatorConfig ValidatorConfig::load(const std::string& path) { return from_json(io::read_file(path)); }

namespace {

std::optional<long> as_number(const std::string& s) {
    auto t = text::normalize_space(s);
    long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
    return v;
}

int rule_number(const std::string& id) { return std::stoi(id.substr(1)); }

// Document-order ordinal of every element path in the canonical serialization.
void number_paths(const xml::Element& e, const std::string& path, std::map<std::string, std::size_t>& out) {
    out.emplace(path, out.size());
    std::map<std::string, std::size_t> counts;
    for (const auto& node : e.children) {
        if (const auto* c = node.element()) {
            number_paths(*c, path + "/" + c->qname + "[" + std::to_string(++counts[c->qname]) + "]", out);
        }
    }
}

class Checker : public paths::TextVisitor {
  public:
    Checker(const Article& a, const ValidatorConfig& cfg) : a_(a), cfg_(cfg) {}

    std::vector<Finding> run() {
        check_header();
        paths::walk_text(a_, *this);
        check_text_structure();
        check_reference_list();
        return std::move(findings_);
    }

    void division(const Division& d, paths::Region region, const std::string& path) override {
        if (d.kind != "abstract") return;
        if (region != paths::Region::front) {
            add("R8", path, "abstract division outside front");
        } else if (++front_abstracts_ > 1) {
            add("R8", path, "more than one abstract in front");
        }
    }

    void inline_node(const Inline& in, const std::string& path) override {
        if (const auto* ref = std::get_if<BiblRef>(&in.value)) check_target(ref->target, path);
    }

    void block(const Block& b, const std::string& path) override {
        if (const auto* cit = std::get_if<CitBlock>(&b.value)) {
            if (const auto* t = std::get_if<RefTarget>(&cit->source)) check_target(*t, path + "/ptr[1]");
        }
    }

    void bibl(const BiblStruct& b, const std::string& path) override { check_record(b, path); }

  private:
    const Article& a_;
    const ValidatorConfig& cfg_;
    std::vector<Finding> findings_;
    int front_abstracts_ = 0;

    void add(const std::string& rule, std::string location, std::string message) {
        auto severity = find_rule(rule)->severity;
        if (auto it = cfg_.severity_overrides.find(rule); it != cfg_.severity_overrides.end()) severity = it->second;
        findings_.push_back(Finding{rule, severity, std::move(location), std::move(message)});
    }

    void check_target(const RefTarget& target, const std::string& path) {
        if (!target.is_fragment()) {
            add("R9", path, "reference target '" + target.uri + "' is not a local '#id' fragment");
        } else if (!resolve_ref(a_, target)) {
            add("R9", path, "reference target '" + target.uri + "' has no reference-list entry");
        }
    }

    // R5 and R7 apply to every record in the article.
    void check_record(const BiblStruct& b, const std::string& path) {
        if (!cfg_.doc_type_vocabulary.empty() && !cfg_.doc_type_vocabulary.count(b.doc_type.value)) {
            add("R7", path, "document type '" + b.doc_type.value + "' is not in the configured vocabulary");
        }
        const auto& scopes = b.monogr.imprint.scopes;
        std::set<std::string> seen;
        for (std::size_t i = 0; i < scopes.size(); ++i) {
            const auto& kind = scopes[i].kind;
            auto p = paths::scope(path, i);
            if (std::find(kScopeKinds.begin(), kScopeKinds.end(), kind) == kScopeKinds.end()) {
                add("R5", p, "biblScope type '" + kind + "' is not one of vol, issue, fpage, lpage, pp");
            } else if (!seen.insert(kind).second) {
                add("R5", p, "biblScope type '" + kind + "' repeated in one imprint");
            }
        }
        const auto* fpage = b.monogr.imprint.scope("fpage");
        const auto* lpage = b.monogr.imprint.scope("lpage");
        if (fpage && lpage) {
            auto f = as_number(fpage->value);
            auto l = as_number(lpage->value);
            if (f && l && *f > *l) {
                auto index = static_cast<std::size_t>(lpage - scopes.data());
                add("R5", paths::scope(path, index),
                    "first page " + std::to_string(*f) + " exceeds last page " + std::to_string(*l));
            }
        }
        auto check_authors = [&](const std::vector<Author>& authors, auto path_of) {
            for (std::size_t i = 0; i < authors.size(); ++i) {
                const auto& aff = authors[i].affiliation;
                if (!aff) continue;
                for (std::size_t k = 0; k < aff->org_units.size(); ++k) {
                    const auto& unit = aff->org_units[k];
                    if (cfg_.org_unit_vocabulary.count(unit.kind)) continue;
                    add("R7", path_of(i) + "/affiliation[1]/orgName[" + std::to_string(k + 1) + "]",
                        unit.kind.empty() ? "orgName '" + unit.name + "' has no type"
                                          : "orgName type '" + unit.kind + "' is not in the configured vocabulary");
                }
            }
        };
        if (b.analytic) check_authors(b.analytic->authors, [&](std::size_t i) { return paths::analytic_author(path, i); });
        check_authors(b.monogr.container_authors, [&](std::size_t i) { return paths::monogr_author(path, i); });
    }

    void check_header() {
        if (!a_.header.file_desc) {
            add("R1", paths::header(), "teiHeader has no fileDesc");
        } else {
            const auto& fd = *a_.header.file_desc;
            if (!fd.has_title_stmt) add("R1", paths::file_desc(), "fileDesc has no titleStmt");
            if (!fd.has_publication_stmt) add("R1", paths::file_desc(), "fileDesc has no publicationStmt");
            if (!fd.has_source_desc) add("R1", paths::file_desc(), "fileDesc has no sourceDesc");
            if (fd.has_source_desc && fd.sources.size() != 1) {
                add("R2", paths::source_desc(),
                    "sourceDesc holds " + std::to_string(fd.sources.size()) + " biblStruct records, expected 1");
            }
            for (std::size_t i = 0; i < fd.sources.size(); ++i) check_record(fd.sources[i], paths::source(i));
            if (const auto* src = fd.source()) {
                check_title_duplication(fd, *src);
                check_source(*src);
            }
        }
        if (a_.header.profile_desc.keywords.empty()) add("R11", paths::profile_desc(), "no keywords");
        const auto& changes = a_.header.revision_desc.changes;
        for (std::size_t i = 1; i < changes.size(); ++i) {
            if (date_before(changes[i].when, changes[i - 1].when)) {
                add("R10", paths::change(i),
                    "change dated " + changes[i].when.raw + " follows a change dated " + changes[i - 1].when.raw);
            }
        }
    }

    void check_title_duplication(const FileDesc& fd, const BiblStruct& src) {
        if (!fd.has_title_stmt || !src.analytic) return;
        const auto* analytic_main = find_main_title(src.analytic->titles);
        if (!analytic_main) return;
        auto declared = normalize_title(fd.main_title);
        auto expected = normalize_title(analytic_main->text);
        if (declared != expected) {
            add("R3", paths::main_title(),
                "title '" + declared + "' differs from the source record's main title '" + expected + "'");
        }
    }

    void check_source(const BiblStruct& src) {
        const auto path = paths::source(0);
        if (!src.analytic) {
            add("R4", path, "source record has no analytic part");
        } else {
            if (src.analytic->authors.empty()) add("R4", paths::analytic(path), "analytic part lists no authors");
            if (auto n = count_main_titles(src.analytic->titles); n != 1) {
                add("R4", paths::analytic(path), "analytic part has " + std::to_string(n) + " main titles, expected 1");
            }
            const auto& authors = src.analytic->authors;
            for (std::size_t i = 0; i < authors.size(); ++i) {
                const auto& au = authors[i];
                auto p = paths::analytic_author(path, i);
                if (au.forenames.empty() || au.surname.empty()) {
                    add("R6", p, "author '" + au.display_name() + "' lacks forename or surname");
                }
                if (au.email && au.email->find('@') == std::string::npos) {
                    add("R6", p + "/email[1]", "email '" + *au.email + "' has no '@'");
                } else if (au.corresponding && !au.email) {
                    add("R6", p, "corresponding author '" + au.display_name() + "' has no email");
                }
            }
        }
        if (auto n = count_main_titles(src.monogr.titles); n != 1) {
            add("R4", paths::monogr(path), "monogr part has " + std::to_string(n) + " main titles, expected 1");
        }
    }

    void check_text_structure() {
        bool empty_body = std::all_of(a_.body.begin(), a_.body.end(), [](const Division& d) {
            return d.implicit && d.blocks.empty();
        });
        if (empty_body) add("R8", paths::body(), "body is empty");
    }

    void check_reference_list() {
        if (!a_.back.reference_list) return;
        // Same path arithmetic as the text walker: the references div follows the back divisions.
        std::size_t divs = static_cast<std::size_t>(std::count_if(
            a_.back.divisions.begin(), a_.back.divisions.end(), [](const Division& d) { return !d.implicit; }));
        auto list = paths::text() + "/back[1]/div[" + std::to_string(divs + 1) + "]/listBibl[1]";
        std::set<std::string> ids;
        const auto& entries = a_.back.reference_list->entries;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            auto p = list + "/biblStruct[" + std::to_string(i + 1) + "]";
            const auto& e = entries[i];
            if (!e.xml_id || e.xml_id->empty()) {
                add("R12", p, "reference entry has no xml:id");
            } else if (!ids.insert(*e.xml_id).second) {
                add("R12", p, "duplicate reference id '" + *e.xml_id + "'");
            }
            if (!e.main_title()) add("R12", p, "reference entry has no main title");
        }
    }
};

}  // namespace

std::vector<Finding> validate(const Article& article, const ValidatorConfig& config) {
    auto findings = Checker(article, config).run();
    std::map<std::string, std::size_t> order;
    number_paths(to_tei(article), "TEI[1]", order);
    auto ordinal = [&](const Finding& f) {
        auto it = order.find(f.location);
        return it == order.end() ? order.size() : it->second;
    };
    std::stable_sort(findings.begin(), findings.end(), [&](const Finding& x, const Finding& y) {
        auto ox = ordinal(x);
        auto oy = ordinal(y);
        if (ox != oy) return ox < oy;
        return rule_number(x.rule_id) < rule_number(y.rule_id);
    });
    return findings;
}

}  // namespace tj
