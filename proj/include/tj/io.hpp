#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tj::io {

// Throw tj::Error when the file cannot be read or written.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Regular *.xml files directly inside `dir`, sorted by path.
std::vector<std::filesystem::path> xml_files(const std::filesystem::path& dir);

}  // namespace tj::io
