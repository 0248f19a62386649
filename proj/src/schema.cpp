#include "tj/schema.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include "json.hpp"
#include "tj/model.hpp"
#include "tj/text.hpp"
#include "tj_embedded.hpp"

namespace tj::schema {

using nlohmann::json;

std::string element_key(const xml::Element& e) {
    if (e.ns == xml::kTeiNamespace) return e.local;
    return "{" + e.ns + "}" + e.local;
}

std::string attribute_key(const xml::Attribute& a) {
    if (a.ns.empty()) return a.local;
    if (a.ns == xml::kXmlNamespace) return "xml:" + a.local;
    return "{" + a.ns + "}" + a.local;
}

namespace {

bool is_foreign(const xml::Element& e) { return e.ns != xml::kTeiNamespace; }

bool has_text(const xml::Element& e) {
    for (const auto& n : e.children) {
        if (const auto* t = n.text(); t && !text::normalize_space(t->value).empty()) return true;
    }
    return false;
}

void profile_element(const xml::Element& e, UsageProfile& p) {
    auto& usage = p.elements[element_key(e)];
    ++usage.count;
    for (const auto& a : e.attributes) ++usage.attribute_values[attribute_key(a)][a.value];
    if (is_foreign(e)) {
        usage.foreign = true;
        return;
    }
    if (has_text(e)) usage.text = true;
    std::set<std::string> seen;
    for (const auto* c : e.child_elements()) {
        auto key = element_key(*c);
        ++usage.child_counts[key];
        seen.insert(key);
    }
    for (const auto& key : seen) ++usage.parents_with_child[key];
    for (const auto* c : e.child_elements()) profile_element(*c, p);
}

template <typename Map>
void add_counts(Map& into, const Map& from) {
    for (const auto& [k, v] : from) into[k] += v;
}

}  // namespace

void UsageProfile::merge(const UsageProfile& other) {
    documents += other.documents;
    add_counts(roots, other.roots);
    for (const auto& [key, u] : other.elements) {
        auto& mine = elements[key];
        mine.count += u.count;
        add_counts(mine.child_counts, u.child_counts);
        add_counts(mine.parents_with_child, u.parents_with_child);
        for (const auto& [attr, values] : u.attribute_values) add_counts(mine.attribute_values[attr], values);
        mine.text = mine.text || u.text;
        mine.foreign = mine.foreign || u.foreign;
    }
}

UsageProfile profile_document(const xml::Element& root) {
    UsageProfile p;
    p.documents = 1;
    ++p.roots[element_key(root)];
    profile_element(root, p);
    return p;
}

UsageProfile profile_corpus(const std::vector<xml::Document>& docs) {
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, docs.size());
    if (workers <= 1) {
        UsageProfile p;
        for (const auto& d : docs) p.merge(profile_document(d.root));
        return p;
    }
    std::vector<std::future<UsageProfile>> parts;
    for (std::size_t w = 0; w < workers; ++w) {
        parts.push_back(std::async(std::launch::async, [&docs, w, workers] {
            UsageProfile p;
            for (std::size_t i = w; i < docs.size(); i += workers) p.merge(profile_document(docs[i].root));
            return p;
        }));
    }
    UsageProfile total;
    for (auto& f : parts) total.merge(f.get());
    return total;
}

void CodifyOptions::check() const {
    if (enumeration_cap < 1) throw Error("enumeration cap must be at least 1");
    if (!(required_child_threshold > 0.0 && required_child_threshold <= 1.0)) {
        throw Error("required-child threshold must be in (0, 1]");
    }
}

const ElementRule* RestrictedSchema::rule(const std::string& key) const {
    auto it = elements.find(key);
    return it == elements.end() ? nullptr : &it->second;
}

RestrictedSchema codify(const UsageProfile& profile, const CodifyOptions& options) {
    options.check();
    RestrictedSchema s;
    if (profile.empty()) return s;
    std::size_t best = 0;
    for (const auto& [root, n] : profile.roots) {
        if (n > best) {
            best = n;
            s.root = root;
        }
    }
    for (const auto& [key, u] : profile.elements) {
        ElementRule r;
        r.text = u.text;
        r.foreign = u.foreign;
        for (const auto& [child, n] : u.child_counts) r.children.insert(child);
        for (const auto& [child, parents] : u.parents_with_child) {
            // Integer comparison for the default threshold avoids rounding surprises.
            bool required = options.required_child_threshold >= 1.0
                                ? parents == u.count
                                : static_cast<double>(parents) >= options.required_child_threshold * static_cast<double>(u.count);
            if (required) r.required_children.insert(child);
        }
        for (const auto& [attr, values] : u.attribute_values) {
            AttributeRule a;
            std::size_t present = 0;
            for (const auto& [v, n] : values) present += n;
            a.required = present == u.count;
            if (options.enumerable_attributes.count(attr) && values.size() <= options.enumeration_cap) {
                std::set<std::string> closed;
                for (const auto& [v, n] : values) closed.insert(v);
                a.values = std::move(closed);
            }
            r.attributes.emplace(attr, std::move(a));
        }
        s.elements.emplace(key, std::move(r));
    }
    return s;
}

// ---- JSON -----------------------------------------------------------------

std::string RestrictedSchema::to_json() const {
    json j;
    j["content_model"] = "unordered";
    j["root"] = root;
    j["elements"] = json::object();
    for (const auto& [key, r] : elements) {
        json e;
        e["children"] = r.children;
        e["required_children"] = r.required_children;
        e["text"] = r.text;
        if (r.foreign) e["foreign"] = true;
        e["attributes"] = json::object();
        for (const auto& [name, a] : r.attributes) {
            json attr;
            attr["required"] = a.required;
            attr["values"] = a.values ? json(*a.values) : json(nullptr);
            e["attributes"][name] = attr;
        }
        j["elements"][key] = e;
    }
    return j.dump(2) + "\n";
}

namespace {

std::set<std::string> string_set(const json& j, const std::string& where) {
    if (!j.is_array()) throw Error(where + " must be an array");
    std::set<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw Error(where + " must contain strings");
        out.insert(v.get<std::string>());
    }
    return out;
}

RestrictedSchema schema_from(const json& j);

}  // namespace

RestrictedSchema RestrictedSchema::from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("invalid schema file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("elements") || !j["elements"].is_object()) {
        throw Error("schema file needs an 'elements' object");
    }
    try {
        return schema_from(j);
    } catch (const json::exception& e) {
        throw Error(std::string("invalid schema file: ") + e.what());
    }
}

namespace {

RestrictedSchema schema_from(const json& j) {
    RestrictedSchema s;
    if (j.contains("root")) {
        if (!j["root"].is_string()) throw Error("schema 'root' must be a string");
        s.root = j["root"].get<std::string>();
    }
    for (const auto& [key, e] : j["elements"].items()) {
        if (!e.is_object()) throw Error("schema element '" + key + "' must be an object");
        ElementRule r;
        if (e.contains("children")) r.children = string_set(e["children"], key + ".children");
        if (e.contains("required_children")) r.required_children = string_set(e["required_children"], key + ".required_children");
        r.text = e.value("text", false);
        r.foreign = e.value("foreign", false);
        if (e.contains("attributes")) {
            for (const auto& [name, a] : e["attributes"].items()) {
                AttributeRule ar;
                ar.required = a.value("required", false);
                if (a.contains("values") && !a["values"].is_null()) ar.values = string_set(a["values"], key + "@" + name);
                r.attributes.emplace(name, std::move(ar));
            }
        }
        s.elements.emplace(key, std::move(r));
    }
    return s;
}

}  // namespace

const RestrictedSchema& base_schema() {
    static const RestrictedSchema kBase = RestrictedSchema::from_json(embedded::kBaseSchema);
    return kBase;
}

// ---- validation ------------------------------------------------------------

namespace {

class SchemaChecker {
  public:
    SchemaChecker(const RestrictedSchema& s, const RestrictedSchema* base) : s_(s), base_(base) {}

    std::vector<Finding> run(const xml::Element& root) {
        auto key = element_key(root);
        auto path = xml::path_segment(root);
        if (!s_.root.empty() && key != s_.root) {
            report(base_ && base_->root == key, "schema-root", path,
                   "root element '" + key + "' differs from schema root '" + s_.root + "'");
        }
        element(root, path);
        return std::move(findings_);
    }

  private:
    const RestrictedSchema& s_;
    const RestrictedSchema* base_;
    std::vector<Finding> findings_;

    void report(bool base_permits, const char* code, const std::string& path, std::string message) {
        Severity sev = base_permits ? Severity::warning : Severity::error;
        if (base_permits) message += " (permitted by the base schema)";
        findings_.push_back(Finding{code, sev, path, std::move(message)});
    }

    const ElementRule* base_rule(const std::string& key) const { return base_ ? base_->rule(key) : nullptr; }

    static bool value_ok(const AttributeRule& a, const std::string& v) { return !a.values || a.values->count(v); }

    void element(const xml::Element& e, const std::string& path) {
        auto key = element_key(e);
        const auto* rule = s_.rule(key);
        const auto* base = base_rule(key);
        if (!rule) report(base != nullptr, "schema-element", path, "element '" + key + "' is not in the schema");

        for (const auto& a : e.attributes) {
            auto name = attribute_key(a);
            const AttributeRule* ar = nullptr;
            if (rule) {
                auto it = rule->attributes.find(name);
                if (it != rule->attributes.end()) ar = &it->second;
            }
            const AttributeRule* br = nullptr;
            if (base) {
                auto it = base->attributes.find(name);
                if (it != base->attributes.end()) br = &it->second;
            }
            if (rule && !ar) {
                report(br != nullptr, "schema-attribute", path, "attribute '" + name + "' not allowed on '" + key + "'");
            } else if (ar && !value_ok(*ar, a.value)) {
                report(br && value_ok(*br, a.value), "schema-value", path,
                       "value '" + a.value + "' not allowed for " + key + "/@" + name);
            }
        }
        if (rule) {
            for (const auto& [name, ar] : rule->attributes) {
                if (!ar.required) continue;
                bool present = std::any_of(e.attributes.begin(), e.attributes.end(),
                                           [&](const xml::Attribute& a) { return attribute_key(a) == name; });
                if (!present) {
                    bool base_requires = false;
                    if (base) {
                        auto it = base->attributes.find(name);
                        base_requires = it != base->attributes.end() && it->second.required;
                    }
                    report(base_ && !base_requires, "schema-required-attribute", path,
                           "required attribute '" + name + "' missing on '" + key + "'");
                }
            }
        }
        if (is_foreign(e)) return;

        if (rule && has_text(e) && !rule->text) {
            report(base && base->text, "schema-text", path, "text content not allowed in '" + key + "'");
        }
        std::set<std::string> present;
        for (const auto* c : e.child_elements()) {
            auto ck = element_key(*c);
            present.insert(ck);
            if (rule && !rule->children.count(ck)) {
                report(base && base->children.count(ck), "schema-child", path + "/" + xml::path_segment(*c),
                       "'" + ck + "' not allowed inside '" + key + "'");
            }
        }
        if (rule) {
            for (const auto& req : rule->required_children) {
                if (present.count(req)) continue;
                bool base_requires = base && base->required_children.count(req);
                report(base_ && !base_requires, "schema-required-child", path,
                       "required child '" + req + "' missing in '" + key + "'");
            }
        }
        for (const auto* c : e.child_elements()) element(*c, path + "/" + xml::path_segment(*c));
    }
};

}  // namespace

std::vector<Finding> validate_against(const RestrictedSchema& schema, const xml::Element& root,
                                      const RestrictedSchema* base) {
    return SchemaChecker(schema, base).run(root);
}

std::vector<std::string> not_permitted(const RestrictedSchema& narrow, const RestrictedSchema& wide) {
    std::vector<std::string> out;
    for (const auto& [key, r] : narrow.elements) {
        const auto* w = wide.rule(key);
        if (!w) {
            out.push_back("element " + key);
            continue;
        }
        for (const auto& c : r.children) {
            if (!w->children.count(c)) out.push_back("child " + key + "/" + c);
        }
        for (const auto& c : w->required_children) {
            if (!r.required_children.count(c)) out.push_back("required child " + key + "/" + c);
        }
        if (r.text && !w->text) out.push_back("text in " + key);
        for (const auto& [name, a] : r.attributes) {
            auto it = w->attributes.find(name);
            if (it == w->attributes.end()) {
                out.push_back("attribute " + key + "/@" + name);
                continue;
            }
            const auto& wa = it->second;
            if (wa.required && !a.required) out.push_back("optional attribute " + key + "/@" + name);
            if (!wa.values) continue;
            if (!a.values) {
                out.push_back("open values " + key + "/@" + name);
                continue;
            }
            for (const auto& v : *a.values) {
                if (!wa.values->count(v)) out.push_back("value " + key + "/@" + name + "=" + v);
            }
        }
    }
    return out;
}

// ---- variants --------------------------------------------------------------

std::size_t VariantCluster::total() const {
    std::size_t n = 0;
    for (const auto& [v, c] : members) n += c;
    return n;
}

std::string normalize_variant(std::string_view value) {
    auto folded = text::casefold(value);
    if (!folded.empty() && folded.back() == 's') folded.pop_back();
    std::string out;
    bool in_sep = false;
    for (char c : folded) {
        bool sep = c == '-' || c == '_' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (sep) {
            if (!in_sep) out += '-';
            in_sep = true;
        } else {
            out += c;
            in_sep = false;
        }
    }
    return out;
}

std::vector<VariantCluster> detect_variants(const UsageProfile& profile, const std::set<std::string>& attributes) {
    std::vector<VariantCluster> out;
    for (const auto& [element, usage] : profile.elements) {
        for (const auto& [attr, values] : usage.attribute_values) {
            if (!attributes.count(attr)) continue;
            std::map<std::string, VariantCluster> by_key;
            for (const auto& [value, n] : values) {
                auto key = normalize_variant(value);
                auto& c = by_key[key];
                c.element = element;
                c.attribute = attr;
                c.key = key;
                c.members[value] += n;
            }
            for (auto& [key, c] : by_key) {
                if (c.members.size() >= 2) out.push_back(std::move(c));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const VariantCluster& a, const VariantCluster& b) {
        if (a.total() != b.total()) return a.total() > b.total();
        return std::tie(a.element, a.attribute, a.key) < std::tie(b.element, b.attribute, b.key);
    });
    return out;
}

// ---- arbitration -----------------------------------------------------------

namespace {

std::string unquote(std::string_view s, std::size_t line) {
    auto t = text::normalize_space(s);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return std::string(t.substr(1, t.size() - 2));
    if (t.find('"') != std::string::npos) throw Error("rules line " + std::to_string(line) + ": unbalanced quote");
    return t;
}

}  // namespace

std::vector<RewriteRule> parse_rules(std::string_view text) {
    std::vector<RewriteRule> rules;
    std::size_t line_no = 0;
    for (const auto& raw : text::split(text, '\n')) {
        ++line_no;
        auto line = text::normalize_space(raw);
        if (line.empty() || line.front() == '#') continue;
        auto arrow = line.find("->");
        if (arrow == std::string::npos) throw Error("rules line " + std::to_string(line_no) + ": missing '->'");
        std::string_view left = std::string_view(line).substr(0, arrow);
        auto first = left.find(' ');
        auto second = first == std::string_view::npos ? first : left.find(' ', first + 1);
        if (second == std::string_view::npos) {
            throw Error("rules line " + std::to_string(line_no) + ": expected 'element attribute from -> to'");
        }
        RewriteRule r;
        r.element = std::string(left.substr(0, first));
        r.attribute = std::string(left.substr(first + 1, second - first - 1));
        r.from = unquote(left.substr(second + 1), line_no);
        r.to = unquote(std::string_view(line).substr(arrow + 2), line_no);
        if (r.from.empty() || r.to.empty()) throw Error("rules line " + std::to_string(line_no) + ": empty value");
        if (r.from == r.to) throw Error("rules line " + std::to_string(line_no) + ": from and to are equal");
        rules.push_back(std::move(r));
    }
    return rules;
}

void check_rules(const std::vector<RewriteRule>& rules) {
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& a = rules[i];
        if (a.from == a.to) throw Error("rule for " + a.element + "/@" + a.attribute + " maps '" + a.from + "' to itself");
        for (std::size_t j = i + 1; j < rules.size(); ++j) {
            const auto& b = rules[j];
            bool overlap = a.attribute == b.attribute && a.from == b.from &&
                           (a.element == b.element || a.element == "*" || b.element == "*");
            if (overlap && a.to != b.to) {
                throw Error("conflicting rules: " + a.element + " " + a.attribute + " " + a.from + " -> " + a.to +
                            " and " + b.element + " " + b.attribute + " " + b.from + " -> " + b.to);
            }
        }
    }
}

namespace {

std::string escape_for_quote(std::string_view v, char quote) {
    std::string out;
    for (char c : v) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '"': out += quote == '"' ? "&quot;" : "\""; break;
            case '\'': out += quote == '\'' ? "&apos;" : "'"; break;
            case '\n': out += "&#10;"; break;
            case '\t': out += "&#9;"; break;
            case '\r': out += "&#13;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Patch {
    xml::SourceRange range;
    std::string replacement;
};

void collect_patches(const xml::Element& e, const std::string& source, const std::vector<RewriteRule>& rules,
                     std::vector<Patch>& out) {
    auto key = element_key(e);
    for (const auto& a : e.attributes) {
        auto name = attribute_key(a);
        for (const auto& r : rules) {
            if ((r.element == "*" || r.element == key) && r.attribute == name && r.from == a.value &&
                a.value_range.size() > 0) {
                char quote = a.value_range.begin > 0 ? source[a.value_range.begin - 1] : '"';
                out.push_back(Patch{a.value_range, escape_for_quote(r.to, quote)});
                break;
            }
        }
    }
    for (const auto* c : e.child_elements()) collect_patches(*c, source, rules, out);
}

}  // namespace

ArbitrationResult arbitrate(const std::vector<xml::Document>& docs, const std::vector<RewriteRule>& rules) {
    check_rules(rules);
    ArbitrationResult result;
    for (const auto& doc : docs) {
        std::vector<Patch> patches;
        if (!rules.empty()) collect_patches(doc.root, doc.source, rules, patches);
        std::sort(patches.begin(), patches.end(),
                  [](const Patch& a, const Patch& b) { return a.range.begin < b.range.begin; });
        std::string out;
        out.reserve(doc.source.size());
        std::size_t pos = 0;
        for (const auto& p : patches) {
            out.append(doc.source, pos, p.range.begin - pos);
            out += p.replacement;
            pos = p.range.end;
        }
        out.append(doc.source, pos, std::string::npos);
        result.sources.push_back(std::move(out));
        result.changes_per_document.push_back(patches.size());
        result.changes += patches.size();
    }
    return result;
}

}  // namespace tj::schema
