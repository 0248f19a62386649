#include "fixtures.hpp"

#include <cstdlib>
#include <iostream>

#include "tj/io.hpp"
#include "tj/xml_io.hpp"

namespace tj::testing {

std::filesystem::path data_dir() { return TJ_TEST_DATA_DIR; }

std::string read_data(const std::string& name) { return io::read_file(data_dir() / name); }

const Article& skeleton() {
    static const Article article = [] {
        auto report = parse_article(read_data("skeleton_completed.xml"), "skeleton_completed.xml");
        if (!report.ok()) {
            for (const auto& issue : report.issues) std::cerr << issue.location << ": " << issue.message << "\n";
            std::abort();
        }
        return *report.outcome;
    }();
    return article;
}

Article parse_ok(std::string xml) {
    auto report = parse_article(std::move(xml));
    if (!report.ok()) {
        std::string msg = "document did not parse:";
        for (const auto& issue : report.issues) msg += "\n  " + issue.location + ": " + issue.message;
        throw Error(msg);
    }
    return *report.outcome;
}

std::string tei_document(const std::string& text_content, const std::string& title) {
    return R"(<?xml version="1.0" encoding="UTF-8"?>
<TEI xmlns="http://www.tei-c.org/ns/1.0">
  <teiHeader>
    <fileDesc>
      <titleStmt><title level="a" type="main">)" +
           title + R"(</title></titleStmt>
      <publicationStmt><date>2010</date><authority>Test</authority></publicationStmt>
      <sourceDesc>
        <biblStruct type="article">
          <analytic>
            <title level="a" type="main">)" +
           title + R"(</title>
            <author type="corresp"><persName><forename>Ada</forename><surname>Byron</surname></persName>
              <email>ada@example.org</email></author>
          </analytic>
          <monogr>
            <title level="j" type="main">Test Journal</title>
            <idno type="ISSN">1234-5678</idno>
            <imprint><publisher>Test Press</publisher><date when="2010-05-01"/></imprint>
          </monogr>
        </biblStruct>
      </sourceDesc>
    </fileDesc>
    <profileDesc><textClass><keywords><list><item><term>testing</term></item></list></keywords></textClass></profileDesc>
  </teiHeader>
  <text>
)" + text_content +
           R"(
  </text>
</TEI>
)";
}

}  // namespace tj::testing
