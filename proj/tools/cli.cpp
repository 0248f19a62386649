#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tj/corpus.hpp"
#include "tj/io.hpp"
#include "tj/model.hpp"
#include "tj/records.hpp"
#include "tj/render.hpp"
#include "tj/schema.hpp"
#include "tj/validator.hpp"
#include "tj/xml.hpp"
#include "tj/xml_io.hpp"

namespace tj::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::vector<std::string> files;
    std::string dir;
    std::string config;
    std::string format;
    std::string out;
    std::vector<std::string> enumerable;
    std::size_t cap = schema::CodifyOptions{}.enumeration_cap;
    double threshold = schema::CodifyOptions{}.required_child_threshold;
    std::string rules;
    bool in_place = false;
    std::string out_dir;
    std::string schema;
    bool base = false;
    std::string base_file;
    std::string style = "chicago";
    std::string to = "xhtml";
    std::vector<std::string> kinds;
    std::string kind = "correction";
    std::string in;
    std::string text;
    std::string from;
    std::string until;
    std::string cites;
    std::string rule;
};

void emit(std::ostream& out, const std::string& text, const std::string& path) {
    if (path.empty()) out << text;
    else io::write_file(path, text);
}

std::string severity_kind(Severity s) { return std::string(to_string(s)); }

// Prints records either as lines or in the human form "file:path: kind [code] message".
void print_records(std::ostream& out, const std::vector<records::Record>& recs, const std::vector<std::string>& files,
                   const std::string& format) {
    if (format == "records") {
        out << records::write(recs);
        return;
    }
    for (const auto& f : files) {
        bool any = false;
        for (const auto& r : recs) {
            if (r.file != f) continue;
            any = true;
            out << r.file << ":" << (r.path.empty() ? "" : r.path + ":") << " " << r.kind << " [" << r.code << "] "
                << r.message << "\n";
        }
        if (!any) out << f << ": ok\n";
    }
}

struct Tree {
    std::string file;
    xml::Document doc;
};

// Reads and parses one XML file; failures become an error record.
std::optional<xml::Document> read_tree(const std::string& file, std::vector<records::Record>& recs) {
    std::string bytes;
    try {
        bytes = io::read_file(file);
    } catch (const Error& e) {
        recs.push_back({"error", file, "", "io", e.what()});
        return std::nullopt;
    }
    try {
        return xml::parse(std::move(bytes));
    } catch (const xml::SyntaxError& e) {
        recs.push_back({"error", file, e.path(), "xml",
                        "line " + std::to_string(e.line()) + ", column " + std::to_string(e.column()) + ": " + e.what()});
        return std::nullopt;
    }
}

// All *.xml files of dir as trees. Unparseable files are skipped with a
// note on err unless strict, in which case they are an error.
std::vector<Tree> load_trees(const std::string& dir, std::ostream& err, bool strict) {
    std::vector<Tree> out;
    for (const auto& p : io::xml_files(dir)) {
        std::vector<records::Record> recs;
        auto doc = read_tree(p.generic_string(), recs);
        if (!doc) {
            if (strict) throw Error(recs.front().file + ": " + recs.front().message);
            err << "tj: skipping " << recs.front().file << ": " << recs.front().message << "\n";
            continue;
        }
        out.push_back(Tree{p.generic_string(), std::move(*doc)});
    }
    return out;
}

std::vector<xml::Document> documents(std::vector<Tree>& trees) {
    std::vector<xml::Document> out;
    for (auto& t : trees) out.push_back(std::move(t.doc));
    return out;
}

corpus::Corpus load_corpus_dir(const std::string& dir, std::ostream& err) {
    auto c = corpus::load_directory(dir);
    for (const auto& r : c.records) {
        if (r.accepted) continue;
        std::string why = "rejected";
        for (const auto& i : r.report.issues) {
            if (i.severity == Severity::error) {
                why = i.message;
                break;
            }
        }
        err << "tj: skipping " << r.path << ": " << why << "\n";
    }
    return c;
}

schema::CodifyOptions codify_options(const Options& o) {
    schema::CodifyOptions co;
    if (!o.enumerable.empty()) co.enumerable_attributes = std::set<std::string>(o.enumerable.begin(), o.enumerable.end());
    co.enumeration_cap = o.cap;
    co.required_child_threshold = o.threshold;
    co.check();
    return co;
}

// ---- subcommands -------------------------------------------------------------

int cmd_validate(const Options& o, std::ostream& out) {
    std::string config_path = o.config;
    if (config_path.empty()) {
        if (const char* env = std::getenv("TJ_CONFIG"); env && *env) config_path = env;
    }
    ValidatorConfig config = config_path.empty() ? ValidatorConfig{} : ValidatorConfig::load(config_path);

    int status = kOk;
    std::vector<records::Record> recs;
    for (const auto& file : o.files) {
        auto doc = read_tree(file, recs);
        if (!doc) {
            status = kFailure;
            continue;
        }
        auto report = parse_article(*doc, file);
        for (const auto& i : report.issues) {
            recs.push_back({severity_kind(i.severity), file, i.location, "parse", i.message});
            if (i.severity == Severity::error) status = std::max(status, kFindings);
        }
        if (!report.ok()) continue;
        for (const auto& f : validate(*report.outcome, config)) {
            recs.push_back({severity_kind(f.severity), file, f.location, f.rule_id, f.message});
            if (f.severity == Severity::error) status = std::max(status, kFindings);
        }
    }
    print_records(out, recs, o.files, o.format);
    return status;
}

int cmd_codify(const Options& o, std::ostream& out, std::ostream& err) {
    auto co = codify_options(o);
    auto trees = load_trees(o.dir, err, false);
    if (trees.empty()) throw Error("no parseable XML files in " + o.dir);
    auto docs = documents(trees);
    auto s = schema::codify(schema::profile_corpus(docs), co);
    std::size_t attributes = 0, closed = 0;
    for (const auto& [key, r] : s.elements) {
        attributes += r.attributes.size();
        for (const auto& [name, a] : r.attributes) closed += a.values ? 1 : 0;
    }
    auto summary = "codified " + std::to_string(docs.size()) + " documents: " + std::to_string(s.elements.size()) +
                   " elements, " + std::to_string(attributes) + " attributes, " + std::to_string(closed) +
                   " closed value lists\n";
    if (o.out.empty()) {
        out << s.to_json();
        err << summary;
    } else {
        io::write_file(o.out, s.to_json());
        out << summary;
    }
    return kOk;
}

int cmd_variants(const Options& o, std::ostream& out, std::ostream& err) {
    auto attrs = o.enumerable.empty() ? schema::CodifyOptions{}.enumerable_attributes
                                      : std::set<std::string>(o.enumerable.begin(), o.enumerable.end());
    auto trees = load_trees(o.dir, err, false);
    auto clusters = schema::detect_variants(schema::profile_corpus(documents(trees)), attrs);
    std::vector<records::Record> recs;
    for (const auto& c : clusters) {
        std::string members;
        for (const auto& [v, n] : c.members) members += (members.empty() ? "" : " ") + v + "=" + std::to_string(n);
        recs.push_back({"variant", "", c.element + "/@" + c.attribute, c.key, members});
    }
    if (o.format == "records") {
        out << records::write(recs);
    } else if (clusters.empty()) {
        out << "no variant clusters\n";
    } else {
        for (const auto& c : clusters) {
            out << c.element << "/@" << c.attribute << " " << c.key << ":";
            bool first = true;
            for (const auto& [v, n] : c.members) {
                out << (first ? " " : ", ") << v << " (" << n << ")";
                first = false;
            }
            out << "\n";
        }
    }
    return kOk;
}

int cmd_arbitrate(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.in_place == !o.out_dir.empty()) throw Error("arbitrate needs exactly one of --in-place and --out-dir");
    auto rules = schema::parse_rules(io::read_file(o.rules));
    schema::check_rules(rules);
    // Every file must parse before anything is written.
    auto trees = load_trees(o.dir, err, true);
    std::vector<std::string> files;
    for (const auto& t : trees) files.push_back(t.file);
    auto docs = documents(trees);
    auto result = schema::arbitrate(docs, rules);

    std::size_t touched = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (result.changes_per_document[i] > 0) ++touched;
        if (o.in_place) {
            if (result.changes_per_document[i] > 0) io::write_file(files[i], result.sources[i]);
        } else {
            fs::create_directories(o.out_dir);
            io::write_file(fs::path(o.out_dir) / fs::path(files[i]).filename(), result.sources[i]);
        }
    }
    out << result.changes << " changes in " << touched << " of " << files.size() << " files\n";
    return kOk;
}

int cmd_schema_validate(const Options& o, std::ostream& out) {
    auto s = schema::RestrictedSchema::from_json(io::read_file(o.schema));
    std::optional<schema::RestrictedSchema> custom_base;
    const schema::RestrictedSchema* base = nullptr;
    if (!o.base_file.empty()) {
        custom_base = schema::RestrictedSchema::from_json(io::read_file(o.base_file));
        base = &*custom_base;
    } else if (o.base) {
        base = &schema::base_schema();
    }
    int status = kOk;
    std::vector<records::Record> recs;
    for (const auto& file : o.files) {
        auto doc = read_tree(file, recs);
        if (!doc) {
            status = kFailure;
            continue;
        }
        for (const auto& f : schema::validate_against(s, doc->root, base)) {
            recs.push_back({severity_kind(f.severity), file, f.location, f.rule_id, f.message});
            if (f.severity == Severity::error) status = std::max(status, kFindings);
        }
    }
    print_records(out, recs, o.files, o.format);
    return status;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream& err) {
    auto guide = render::resolve_style(o.style);
    const auto& file = o.files.front();
    auto report = parse_article(io::read_file(file), file);
    if (!report.ok()) {
        for (const auto& i : report.issues) {
            if (i.severity == Severity::error) err << file << ":" << i.location << ": " << i.message << "\n";
        }
        throw Error(file + " does not parse");
    }
    emit(out, o.to == "text" ? render::render_plaintext(*report.outcome) : render::render_xhtml(*report.outcome, guide),
         o.out);
    return kOk;
}

int cmd_index(const Options& o, std::ostream& out, std::ostream& err) {
    auto kinds = o.kinds.empty() ? corpus::kIndexKinds : std::set<std::string>(o.kinds.begin(), o.kinds.end());
    auto c = load_corpus_dir(o.dir, err);
    auto entries = corpus::build_indexes(c, kinds);
    if (o.format == "records") {
        std::vector<records::Record> recs;
        for (const auto& e : entries) {
            for (const auto& l : e.locators) recs.push_back({"index", l.id, l.path, e.kind, e.display});
        }
        emit(out, records::write(recs), o.out);
    } else {
        emit(out, corpus::index_xhtml(entries), o.out);
    }
    return kOk;
}

int cmd_biblio(const Options& o, std::ostream& out, std::ostream& err) {
    auto guide = render::resolve_style(o.style);
    auto c = load_corpus_dir(o.dir, err);
    auto entries = corpus::unified_bibliography(c);
    if (o.format == "records") {
        std::vector<records::Record> recs;
        for (const auto& e : entries) {
            std::string citing;
            for (const auto& id : e.citing) citing += (citing.empty() ? "" : ",") + id;
            auto text = e.record.main_title() ? render::format_entry(e.record, guide).text() : std::string("[untitled]");
            recs.push_back({"biblio", citing, "", e.key, text});
        }
        emit(out, records::write(recs), o.out);
    } else {
        emit(out, corpus::unibib_xhtml(entries, guide), o.out);
    }
    return kOk;
}

int cmd_corrigenda(const Options& o, std::ostream& out, std::ostream& err) {
    auto c = load_corpus_dir(o.dir, err);
    auto entries = corpus::corrigenda(c, o.kind);
    if (o.format == "records") {
        std::vector<records::Record> recs;
        for (const auto& e : entries) recs.push_back({"corrigendum", e.article_id, "", e.when.raw, normalize_title(e.description)});
        emit(out, records::write(recs), o.out);
    } else {
        emit(out, corpus::corrigenda_xhtml(entries), o.out);
    }
    return kOk;
}

CalendarDate date_arg(const std::string& s, const char* flag) {
    auto d = CalendarDate::parse(s);
    if (!d) throw Error(std::string("invalid date for ") + flag + ": '" + s + "'");
    return *d;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream& err) {
    corpus::Query q;
    if (!o.in.empty()) {
        q.kind = corpus::node_kind_from_string(o.in);
        if (!q.kind) throw Error("unknown node kind '" + o.in + "'");
    }
    if (!o.text.empty()) q.text = o.text;
    if (!o.from.empty() || !o.until.empty()) {
        auto from = o.from.empty() ? CalendarDate::ymd(1, 1, 1) : date_arg(o.from, "--from");
        auto to = o.until.empty() ? CalendarDate::ymd(9999, 12, 31) : date_arg(o.until, "--to");
        if (from.first_day() > to.last_day()) throw Error("--from is after --to");
        q.date_range = std::make_pair(from, to);
    }
    if (!o.cites.empty()) q.cites_surname = o.cites;
    if (!q.valid()) throw Error("query needs at least one of --in, --text, --from, --to, --cites-surname");

    auto c = load_corpus_dir(o.dir, err);
    auto hits = corpus::query(c, q);
    if (o.format == "records") {
        std::vector<records::Record> recs;
        auto kind = corpus::to_string(q.kind.value_or(corpus::NodeKind::any));
        for (const auto& h : hits) recs.push_back({"hit", h.id, h.path, kind, h.snippet});
        out << records::write(recs);
    } else {
        for (const auto& h : hits) out << h.id << " " << h.path << ": " << h.snippet << "\n";
    }
    return kOk;
}

int cmd_explain(const Options& o, std::ostream& out) {
    out << explain(o.rule);
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Journal article toolkit: validation, schema evolution, rendering and corpus products.", "tj"};
    app.require_subcommand(1);
    Options o;

    auto text_or_records = CLI::IsMember({"text", "records"});
    auto xhtml_or_records = CLI::IsMember({"xhtml", "records"});

    auto* validate = app.add_subcommand("validate", "Check articles against the editorial rules");
    validate->add_option("files", o.files, "TEI files")->required();
    validate->add_option("--config", o.config, "Validator config (JSON); defaults to $TJ_CONFIG");
    validate->add_option("--format", o.format, "Output format")->check(text_or_records)->default_val("text");

    auto* codify = app.add_subcommand("codify", "Infer a restricted schema from a corpus directory");
    codify->add_option("dir", o.dir, "Corpus directory")->required();
    codify->add_option("--out", o.out, "Schema file to write (default: stdout)");
    codify->add_option("--enumerable", o.enumerable, "Attributes with closed value lists")->delimiter(',');
    codify->add_option("--cap", o.cap, "Most distinct values a closed list may hold")->capture_default_str();
    codify->add_option("--threshold", o.threshold, "Fraction of parents that makes a child required")->capture_default_str();

    auto* variants = app.add_subcommand("variants", "Report competing spellings of attribute values");
    variants->add_option("dir", o.dir, "Corpus directory")->required();
    variants->add_option("--enumerable", o.enumerable, "Attributes to inspect")->delimiter(',');
    variants->add_option("--format", o.format, "Output format")->check(text_or_records)->default_val("text");

    auto* arbitrate = app.add_subcommand("arbitrate", "Rewrite attribute values by rule");
    arbitrate->add_option("dir", o.dir, "Corpus directory")->required();
    arbitrate->add_option("--rules", o.rules, "Rules file: element attribute from -> to")->required();
    auto* in_place = arbitrate->add_flag("--in-place", o.in_place, "Rewrite the corpus files");
    arbitrate->add_option("--out-dir", o.out_dir, "Write the rewritten corpus here")->excludes(in_place);

    auto* schema_validate = app.add_subcommand("schema-validate", "Check files against a codified schema");
    schema_validate->add_option("files", o.files, "XML files")->required();
    schema_validate->add_option("--schema", o.schema, "Schema file")->required();
    auto* base = schema_validate->add_flag("--base", o.base, "Downgrade constructs the built-in base schema permits");
    schema_validate->add_option("--base-file", o.base_file, "Use this base schema instead")->excludes(base);
    schema_validate->add_option("--format", o.format, "Output format")->check(text_or_records)->default_val("text");

    auto* render = app.add_subcommand("render", "Render one article");
    render->add_option("file", o.files, "TEI file")->required()->expected(1);
    render->add_option("--style", o.style, "apa, chicago, mla or a style file")->capture_default_str();
    render->add_option("--to", o.to, "Output format")->check(CLI::IsMember({"xhtml", "text"}))->capture_default_str();
    render->add_option("--out", o.out, "Output file (default: stdout)");

    auto* index = app.add_subcommand("index", "Build the cross-document indexes");
    index->add_option("dir", o.dir, "Corpus directory")->required();
    index->add_option("--kinds", o.kinds, "Index kinds")->delimiter(',')->check(CLI::IsMember(corpus::kIndexKinds));
    index->add_option("--format", o.format, "Output format")->check(xhtml_or_records)->default_val("xhtml");
    index->add_option("--out", o.out, "Output file (default: stdout)");

    auto* biblio = app.add_subcommand("biblio", "Compile the unified bibliography");
    biblio->add_option("dir", o.dir, "Corpus directory")->required();
    biblio->add_option("--style", o.style, "apa, chicago, mla or a style file")->capture_default_str();
    biblio->add_option("--format", o.format, "Output format")->check(xhtml_or_records)->default_val("xhtml");
    biblio->add_option("--out", o.out, "Output file (default: stdout)");

    auto* corrigenda = app.add_subcommand("corrigenda", "Collect corrections into one page");
    corrigenda->add_option("dir", o.dir, "Corpus directory")->required();
    corrigenda->add_option("--kind", o.kind, "Change kind to collect")->capture_default_str();
    corrigenda->add_option("--format", o.format, "Output format")->check(xhtml_or_records)->default_val("xhtml");
    corrigenda->add_option("--out", o.out, "Output file (default: stdout)");

    auto* query = app.add_subcommand("query", "Search the text of a corpus");
    query->add_option("dir", o.dir, "Corpus directory")->required();
    query->add_option("--in", o.in, "Node kind: person, org, place, term, abbr, paragraph, heading, any");
    query->add_option("--text", o.text, "Case-insensitive substring");
    query->add_option("--from", o.from, "Earliest document date (YYYY[-MM[-DD]])");
    query->add_option("--to", o.until, "Latest document date (YYYY[-MM[-DD]])");
    query->add_option("--cites-surname", o.cites, "Only articles citing this surname");
    query->add_option("--format", o.format, "Output format")->check(text_or_records)->default_val("text");

    auto* explain = app.add_subcommand("explain", "Describe a validator rule");
    explain->add_option("rule", o.rule, "Rule id, e.g. R9")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (validate->parsed()) return cmd_validate(o, out);
        if (codify->parsed()) return cmd_codify(o, out, err);
        if (variants->parsed()) return cmd_variants(o, out, err);
        if (arbitrate->parsed()) return cmd_arbitrate(o, out, err);
        if (schema_validate->parsed()) return cmd_schema_validate(o, out);
        if (render->parsed()) return cmd_render(o, out, err);
        if (index->parsed()) return cmd_index(o, out, err);
        if (biblio->parsed()) return cmd_biblio(o, out, err);
        if (corrigenda->parsed()) return cmd_corrigenda(o, out, err);
        if (query->parsed()) return cmd_query(o, out, err);
        if (explain->parsed()) return cmd_explain(o, out);
    } catch (const std::exception& e) {
        err << "tj: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace tj::cli
