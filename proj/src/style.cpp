#include <array>
#include <utility>

#include "json.hpp"
#include "tj/io.hpp"
#include "tj/render.hpp"
#include "tj_embedded.hpp"

namespace tj::render {

using json = nlohmann::ordered_json;

namespace {

template <typename E, std::size_t N>
E token_to_enum(const std::array<std::pair<std::string_view, E>, N>& table, const std::string& value,
                const std::string& key) {
    for (const auto& [name, e] : table) {
        if (name == value) return e;
    }
    throw Error("style: unknown " + key + " '" + value + "'");
}

template <typename E, std::size_t N>
std::string enum_to_token(const std::array<std::pair<std::string_view, E>, N>& table, E e) {
    for (const auto& [name, v] : table) {
        if (v == e) return std::string(name);
    }
    return {};
}

constexpr std::array<std::pair<std::string_view, MarkerScheme>, 2> kSchemes{{
    {"numeric-bracket", MarkerScheme::numeric_bracket},
    {"author-date", MarkerScheme::author_date},
}};
constexpr std::array<std::pair<std::string_view, ListOrder>, 2> kOrders{{
    {"alphabetical", ListOrder::alphabetical},
    {"citation-order", ListOrder::citation_order},
}};
constexpr std::array<std::pair<std::string_view, NameFormat>, 3> kNameFormats{{
    {"surname-first-initials", NameFormat::surname_first_initials},
    {"surname-first-full", NameFormat::surname_first_full},
    {"as-encoded", NameFormat::as_encoded},
}};
constexpr std::array<std::pair<std::string_view, Typography>, 3> kTypography{{
    {"plain", Typography::plain},
    {"italic", Typography::italic},
    {"quoted", Typography::quoted},
}};

std::string string_field(const json& j, const std::string& key) {
    if (!j.contains(key)) throw Error("style: missing '" + key + "'");
    if (!j[key].is_string()) throw Error("style: '" + key + "' must be a string");
    return j[key].get<std::string>();
}

Segment parse_segment(const json& j, const std::string& where) {
    if (!j.is_object()) throw Error("style: " + where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "path" && key != "typography" && key != "prefix" && key != "suffix" && key != "omit_if_absent") {
            throw Error("style: unknown key '" + key + "' in " + where);
        }
    }
    Segment s;
    s.path = string_field(j, "path");
    if (!is_known_field(s.path)) throw Error("style: unknown field path '" + s.path + "' in " + where);
    if (j.contains("typography")) s.typography = token_to_enum(kTypography, string_field(j, "typography"), "typography");
    if (j.contains("prefix")) s.prefix = string_field(j, "prefix");
    if (j.contains("suffix")) s.suffix = string_field(j, "suffix");
    if (j.contains("omit_if_absent")) {
        if (!j["omit_if_absent"].is_boolean()) throw Error("style: omit_if_absent must be a boolean in " + where);
        s.omit_if_absent = j["omit_if_absent"].get<bool>();
    }
    return s;
}

}  // namespace

bool is_known_field(std::string_view path) {
    static const std::array<std::string_view, 13> kFields = {
        "authors",      "title",        "analytic.title", "monogr.title", "monogr.issn",
        "imprint.publisher", "imprint.pub_place", "imprint.year", "imprint.date", "scope.vol",
        "scope.issue",  "scope.pages",  "scope.pp"};
    for (auto f : kFields) {
        if (f == path) return true;
    }
    return path.size() > 5 && path.substr(0, 5) == "idno.";
}

const std::vector<Segment>& StyleGuide::layout(const DocumentType& type) const {
    if (auto it = layouts.find(type.value); it != layouts.end()) return it->second;
    if (type.is_article()) {
        for (const char* alias : {"article", "journalArticle"}) {
            if (auto it = layouts.find(alias); it != layouts.end()) return it->second;
        }
    }
    return layouts.at("unknown");
}

StyleGuide StyleGuide::from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("style: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error("style: top level must be an object");
    for (const auto& [key, _] : j.items()) {
        if (key != "id" && key != "marker_scheme" && key != "list_order" && key != "author_name_format" &&
            key != "layouts") {
            throw Error("style: unknown key '" + key + "'");
        }
    }
    StyleGuide g;
    g.id = string_field(j, "id");
    if (g.id.empty()) throw Error("style: empty id");
    g.marker_scheme = token_to_enum(kSchemes, string_field(j, "marker_scheme"), "marker_scheme");
    g.list_order = token_to_enum(kOrders, string_field(j, "list_order"), "list_order");
    g.author_name_format = token_to_enum(kNameFormats, string_field(j, "author_name_format"), "author_name_format");
    if (!j.contains("layouts") || !j["layouts"].is_object()) throw Error("style: 'layouts' must be an object");
    for (const auto& [type, segments] : j["layouts"].items()) {
        if (!segments.is_array()) throw Error("style: layout '" + type + "' must be an array");
        std::vector<Segment> layout;
        for (std::size_t i = 0; i < segments.size(); ++i) {
            layout.push_back(parse_segment(segments[i], "layouts." + type + "[" + std::to_string(i) + "]"));
        }
        g.layouts.emplace(type, std::move(layout));
    }
    if (!g.layouts.count("unknown")) throw Error("style: no 'unknown' layout");
    return g;
}

std::string StyleGuide::to_json() const {
    json j = json::object();
    j["author_name_format"] = enum_to_token(kNameFormats, author_name_format);
    j["id"] = id;
    json layouts_json = json::object();
    for (const auto& [type, layout] : layouts) {
        json arr = json::array();
        for (const auto& s : layout) {
            arr.push_back(json{{"omit_if_absent", s.omit_if_absent},
                               {"path", s.path},
                               {"prefix", s.prefix},
                               {"suffix", s.suffix},
                               {"typography", enum_to_token(kTypography, s.typography)}});
        }
        layouts_json[type] = std::move(arr);
    }
    j["layouts"] = std::move(layouts_json);
    j["list_order"] = enum_to_token(kOrders, list_order);
    j["marker_scheme"] = enum_to_token(kSchemes, marker_scheme);
    return j.dump(2) + "\n";
}

const std::vector<std::string>& builtin_style_ids() {
    static const std::vector<std::string> kIds = {"apa", "chicago", "mla"};
    return kIds;
}

const StyleGuide& builtin_style(std::string_view id) {
    static const StyleGuide kApa = StyleGuide::from_json(embedded::kStyleApa);
    static const StyleGuide kChicago = StyleGuide::from_json(embedded::kStyleChicago);
    static const StyleGuide kMla = StyleGuide::from_json(embedded::kStyleMla);
    if (id == "apa") return kApa;
    if (id == "chicago") return kChicago;
    if (id == "mla") return kMla;
    throw Error("unknown style '" + std::string(id) + "'");
}

StyleGuide resolve_style(const std::string& id_or_path) {
    for (const auto& id : builtin_style_ids()) {
        if (id == id_or_path) return builtin_style(id);
    }
    if (id_or_path.find('/') == std::string::npos && id_or_path.find('.') == std::string::npos) {
        throw Error("unknown style '" + id_or_path + "'");
    }
    return StyleGuide::from_json(io::read_file(id_or_path));
}

}  // namespace tj::render
