#include "tj/model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "tj/text.hpp"

namespace tj {

namespace {

bool parse_digits(std::string_view s, int& out) {
    if (s.empty()) return false;
    if (!std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : kDays[m - 1];
}

}  // namespace

std::optional<CalendarDate> CalendarDate::parse(std::string_view s) {
    CalendarDate d;
    d.raw = std::string(s);
    if (s.size() != 4 && s.size() != 7 && s.size() != 10) return std::nullopt;
    if (!parse_digits(s.substr(0, 4), d.year)) return std::nullopt;
    if (s.size() == 4) return d;
    int m = 0;
    if (s[4] != '-' || !parse_digits(s.substr(5, 2), m) || m < 1 || m > 12) return std::nullopt;
    d.month = m;
    d.precision = DatePrecision::month;
    if (s.size() == 7) return d;
    int day = 0;
    if (s[7] != '-' || !parse_digits(s.substr(8, 2), day) || day < 1 || day > days_in_month(d.year, m))
        return std::nullopt;
    d.day = day;
    d.precision = DatePrecision::day;
    return d;
}

CalendarDate CalendarDate::ymd(int y, int m, int d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return *parse(buf);
}

std::tuple<int, int, int> CalendarDate::first_day() const { return {year, month.value_or(1), day.value_or(1)}; }

std::tuple<int, int, int> CalendarDate::last_day() const {
    int m = month.value_or(12);
    return {year, m, day.value_or(days_in_month(year, m))};
}

bool date_before(const CalendarDate& a, const CalendarDate& b) {
    if (a.first_day() != b.first_day()) return a.first_day() < b.first_day();
    return a.precision < b.precision;
}

std::string RefTarget::fragment() const {
    if (!is_fragment()) throw Error("malformed reference target '" + uri + "': expected a local '#id' fragment");
    return uri.substr(1);
}

RichText plain(std::string s) {
    RichText r;
    if (!s.empty()) r.emplace_back(TextRun{std::move(s)});
    return r;
}

namespace {

void flatten_into(const RichText& rich, std::string& out) {
    for (const auto& in : rich) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, TextRun>) {
                    out += v.text;
                } else if constexpr (std::is_same_v<T, Emph>) {
                    flatten_into(v.content, out);
                } else if constexpr (std::is_same_v<T, AbbrMention>) {
                    out += v.abbr;
                } else {
                    out += v.text;
                }
            },
            in.value);
    }
}

}  // namespace

std::string flatten(const RichText& rich) {
    std::string out;
    flatten_into(rich, out);
    return out;
}

std::string normalize_title(const RichText& rich) { return text::normalize_space(flatten(rich)); }

std::string Author::display_name() const {
    std::string out;
    for (const auto& f : forenames) {
        out += f;
        out += ' ';
    }
    return out + surname;
}

const Title* find_main_title(const std::vector<Title>& titles) {
    for (const auto& t : titles) {
        if (t.type == "main") return &t;
    }
    return nullptr;
}

std::size_t count_main_titles(const std::vector<Title>& titles) {
    return static_cast<std::size_t>(std::count_if(titles.begin(), titles.end(), [](const Title& t) { return t.type == "main"; }));
}

const Scope* Imprint::scope(std::string_view kind) const {
    for (const auto& s : scopes) {
        if (s.kind == kind) return &s;
    }
    return nullptr;
}

const std::vector<std::string>& DocumentType::seeded() {
    static const std::vector<std::string> kSeeded = {"article",         "journalArticle", "book",   "bookSection",
                                                     "conferencePaper", "thesis",         "report", "webPage",
                                                     "standard",        "unknown"};
    return kSeeded;
}

bool DocumentType::is_known() const {
    const auto& s = seeded();
    return value != "unknown" && std::find(s.begin(), s.end(), value) != s.end();
}

const Title* BiblStruct::main_title() const {
    if (analytic) {
        if (const auto* t = find_main_title(analytic->titles)) return t;
    }
    return find_main_title(monogr.titles);
}

const std::vector<Author>& BiblStruct::primary_authors() const {
    if (analytic && !analytic->authors.empty()) return analytic->authors;
    return monogr.container_authors;
}

std::optional<std::string> BiblStruct::identifier(std::string_view kind) const {
    auto lowered = text::to_lower_ascii(kind);
    for (const auto& id : identifiers) {
        if (text::to_lower_ascii(id.kind) == lowered) return id.value;
    }
    return std::nullopt;
}

std::optional<int> BiblStruct::year() const {
    if (monogr.imprint.date) return monogr.imprint.date->date.year;
    return std::nullopt;
}

std::optional<CalendarDate> document_date(const Article& article) {
    const auto* source = article.source();
    if (!source || !source->monogr.imprint.date) return std::nullopt;
    return source->monogr.imprint.date->date;
}

const BiblStruct* resolve_ref(const Article& article, const RefTarget& target) {
    auto id = target.fragment();
    if (!article.back.reference_list) return nullptr;
    for (const auto& entry : article.back.reference_list->entries) {
        if (entry.xml_id && *entry.xml_id == id) return &entry;
    }
    return nullptr;
}

std::string derive_article_id(const Article& article, const std::optional<std::string>& source_path) {
    if (const auto* source = article.source()) {
        if (auto doi = source->doi(); doi && !doi->empty()) return *doi;
    }
    if (!source_path) return {};
    std::string_view path(*source_path);
    if (auto slash = path.find_last_of('/'); slash != std::string_view::npos) path.remove_prefix(slash + 1);
    if (auto dot = path.find_last_of('.'); dot != std::string_view::npos && dot > 0) path = path.substr(0, dot);
    return std::string(path);
}

}  // namespace tj
