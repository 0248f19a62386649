#include "tj/records.hpp"

#include "tj/model.hpp"

namespace tj::records {

std::string escape(std::string_view field) {
    std::string out;
    out.reserve(field.size());
    for (char c : field) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape(std::string_view field) {
    std::string out;
    out.reserve(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (field[i] != '\\') {
            out += field[i];
            continue;
        }
        if (++i == field.size()) throw Error("records: dangling backslash");
        switch (field[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: throw Error(std::string("records: unknown escape \\") + field[i]);
        }
    }
    return out;
}

std::string to_line(const Record& r) {
    return escape(r.kind) + '\t' + escape(r.file) + '\t' + escape(r.path) + '\t' + escape(r.code) + '\t' +
           escape(r.message);
}

Record parse_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        auto tab = line.find('\t', start);
        fields.push_back(unescape(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start)));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    if (fields.size() != 5) throw Error("records: expected 5 fields, got " + std::to_string(fields.size()));
    return Record{fields[0], fields[1], fields[2], fields[3], fields[4]};
}

std::string write(const std::vector<Record>& records) {
    std::string out;
    for (const auto& r : records) out += to_line(r) + '\n';
    return out;
}

std::vector<Record> read(std::string_view text) {
    std::vector<Record> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!line.empty() && line != "\r") out.push_back(parse_line(line));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return out;
}

}  // namespace tj::records
