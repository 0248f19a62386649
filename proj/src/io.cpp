#include "tj/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tj/model.hpp"

namespace tj::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error("error reading " + path.string());
    return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("error writing " + path.string());
}

std::vector<std::filesystem::path> xml_files(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::directory_iterator it(dir, ec);
    if (ec) throw Error("cannot list " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> out;
    for (const auto& entry : it) {
        if (entry.is_regular_file() && entry.path().extension() == ".xml") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace tj::io
