#include "tj/paths.hpp"

#include <map>

#include "tj/xml_io.hpp"

namespace tj::paths {

namespace {

std::string seg(std::string_view name, std::size_t index) {
    return std::string(name) + "[" + std::to_string(index) + "]";
}

class Counter {
  public:
    explicit Counter(std::string base) : base_(std::move(base)) {}
    std::string next(const std::string& name) { return base_ + "/" + seg(name, ++counts_[name]); }

  private:
    std::string base_;
    std::map<std::string, std::size_t> counts_;
};

class Walker {
  public:
    explicit Walker(TextVisitor& v) : v_(v) {}

    void rich(const RichText& content, const std::string& path) {
        Counter counter(path);
        for (const auto& in : content) {
            auto name = element_name(in);
            if (!name) continue;
            auto p = counter.next(*name);
            v_.inline_node(in, p);
            if (const auto* emph = std::get_if<Emph>(&in.value)) rich(emph->content, p);
        }
    }

    void block(const Block& b, const std::string& path) {
        v_.block(b, path);
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Paragraph>) {
                    rich(x.content, path);
                } else if constexpr (std::is_same_v<T, CitBlock>) {
                    rich(x.quote, path + "/quote[1]");
                    if (const auto* bibl = std::get_if<BiblStruct>(&x.source)) v_.bibl(*bibl, path + "/biblStruct[1]");
                    if (!x.qualifiers.empty()) rich(x.qualifiers, path + "/note[1]");
                } else if constexpr (std::is_same_v<T, FigureBlock>) {
                    if (!x.caption.empty()) rich(x.caption, path + "/head[1]");
                    if (x.source) v_.bibl(*x.source, path + "/biblStruct[1]");
                } else if constexpr (std::is_same_v<T, TableBlock>) {
                    if (!x.caption.empty()) rich(x.caption, path + "/head[1]");
                } else if constexpr (std::is_same_v<T, ListBlock>) {
                    for (std::size_t i = 0; i < x.items.size(); ++i) rich(x.items[i], path + "/" + seg("item", i + 1));
                } else if constexpr (std::is_same_v<T, QuoteBlock>) {
                    rich(x.content, path);
                }
            },
            b.value);
    }

    void division(const Division& d, Region region, Counter& parent) {
        if (d.implicit) {
            for (const auto& b : d.blocks) block(b, parent.next(element_name(b)));
            return;
        }
        auto path = parent.next("div");
        v_.division(d, region, path);
        Counter counter(path);
        if (d.head) {
            auto hp = counter.next("head");
            v_.heading(*d.head, hp);
            rich(*d.head, hp);
        }
        for (const auto& b : d.blocks) block(b, counter.next(element_name(b)));
        for (const auto& c : d.children) division(c, region, counter);
    }

    void run(const Article& a) {
        auto text_path = paths::text();
        if (!a.front.empty()) {
            Counter counter(text_path + "/front[1]");
            for (const auto& d : a.front) division(d, Region::front, counter);
        }
        {
            Counter counter(paths::body());
            for (const auto& d : a.body) division(d, Region::body, counter);
        }
        if (!a.back.empty()) {
            Counter counter(text_path + "/back[1]");
            for (const auto& d : a.back.divisions) division(d, Region::back, counter);
            if (a.back.reference_list) {
                auto list = counter.next("div") + "/listBibl[1]";
                const auto& entries = a.back.reference_list->entries;
                for (std::size_t i = 0; i < entries.size(); ++i) v_.bibl(entries[i], list + "/" + seg("biblStruct", i + 1));
            }
            for (const auto& n : a.back.notes) {
                auto p = counter.next("note");
                v_.note(n, p);
                rich(n, p);
            }
        }
    }

  private:
    TextVisitor& v_;
};

}  // namespace

std::string header() { return "TEI[1]/teiHeader[1]"; }
std::string file_desc() { return header() + "/fileDesc[1]"; }
std::string title_stmt() { return file_desc() + "/titleStmt[1]"; }
std::string main_title() { return title_stmt() + "/title[1]"; }
std::string publication_stmt() { return file_desc() + "/publicationStmt[1]"; }
std::string source_desc() { return file_desc() + "/sourceDesc[1]"; }
std::string source(std::size_t index) { return source_desc() + "/" + seg("biblStruct", index + 1); }
std::string profile_desc() { return header() + "/profileDesc[1]"; }
std::string revision_desc() { return header() + "/revisionDesc[1]"; }
std::string change(std::size_t index) { return revision_desc() + "/" + seg("change", index + 1); }
std::string text() { return "TEI[1]/text[1]"; }
std::string body() { return text() + "/body[1]"; }

std::vector<std::string> keywords(const ProfileDesc& profile) {
    // Mirrors the grouping in to_tei: one <keywords> per run of equal schemes.
    std::vector<std::string> out;
    std::size_t group = 0;
    std::size_t item = 0;
    for (std::size_t i = 0; i < profile.keywords.size(); ++i) {
        if (i == 0 || profile.keywords[i].scheme != profile.keywords[i - 1].scheme) {
            ++group;
            item = 0;
        }
        ++item;
        out.push_back(profile_desc() + "/textClass[1]/" + seg("keywords", group) + "/list[1]/" + seg("item", item) +
                      "/term[1]");
    }
    return out;
}

std::string analytic(const std::string& bibl) { return bibl + "/analytic[1]"; }
std::string analytic_title(const std::string& bibl, std::size_t index) {
    return analytic(bibl) + "/" + seg("title", index + 1);
}
std::string analytic_author(const std::string& bibl, std::size_t index) {
    return analytic(bibl) + "/" + seg("author", index + 1);
}
std::string monogr(const std::string& bibl) { return bibl + "/monogr[1]"; }
std::string monogr_title(const std::string& bibl, std::size_t index) {
    return monogr(bibl) + "/" + seg("title", index + 1);
}
std::string monogr_author(const std::string& bibl, std::size_t index) {
    return monogr(bibl) + "/" + seg("author", index + 1);
}
std::string scope(const std::string& bibl, std::size_t index) {
    return monogr(bibl) + "/imprint[1]/" + seg("biblScope", index + 1);
}
std::string primary_author(const std::string& bibl, const BiblStruct& b, std::size_t index) {
    if (b.analytic && !b.analytic->authors.empty()) return analytic_author(bibl, index);
    return monogr_author(bibl, index);
}

void walk_text(const Article& article, TextVisitor& visitor) { Walker(visitor).run(article); }

}  // namespace tj::paths
