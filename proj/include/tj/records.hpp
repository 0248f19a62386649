#pragma once

// Line-oriented report format: one record per line, five tab-separated
// fields (kind, file, path, code, message). Backslash, tab, newline and
// carriage return inside fields are written as \\, \t, \n and \r.

#include <string>
#include <string_view>
#include <vector>

namespace tj::records {

struct Record {
    std::string kind;
    std::string file;
    std::string path;
    std::string code;
    std::string message;

    bool operator==(const Record&) const = default;
    auto operator<=>(const Record&) const = default;
};

std::string escape(std::string_view field);
std::string unescape(std::string_view field);  // throws Error on a bad escape

std::string to_line(const Record& r);  // no trailing newline
Record parse_line(std::string_view line);  // throws Error

std::string write(const std::vector<Record>& records);
std::vector<Record> read(std::string_view text);  // blank lines skipped

}  // namespace tj::records
