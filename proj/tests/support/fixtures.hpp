#pragma once

#include <filesystem>
#include <string>

#include "tj/model.hpp"

namespace tj::testing {

std::filesystem::path data_dir();
std::string read_data(const std::string& name);

// The completed skeleton article from tests/data; aborts the test run if it
// does not parse.
const Article& skeleton();

// Parses a document that must be free of errors; throws Error with the
// issues otherwise.
Article parse_ok(std::string xml);

// A small complete article: header with one source record (author Ada Byron,
// journal "Test Journal", dated 2010-05-01) around the given <text> content.
std::string tei_document(const std::string& text_content, const std::string& title = "Test Article");

}  // namespace tj::testing
