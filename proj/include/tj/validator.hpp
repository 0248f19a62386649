#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tj/finding.hpp"
#include "tj/model.hpp"

namespace tj {

struct Rule {
    std::string id;
    Severity severity;
    std::string description;
    std::string rationale;
};

// R1..R12 in evaluation order.
const std::vector<Rule>& rules();
const Rule* find_rule(std::string_view id);

struct ValidatorConfig {
    std::set<std::string> org_unit_vocabulary{"laboratory", "department", "institution"};
    std::map<std::string, Severity> severity_overrides;
    // Allowed biblStruct types; empty means any. Checked under R7.
    std::set<std::string> doc_type_vocabulary;

    // JSON object with optional keys org_unit_vocabulary, severity_overrides,
    // doc_type_vocabulary. Throws Error on unknown keys or rule ids.
    static ValidatorConfig from_json(std::string_view text);
    static ValidatorConfig load(const std::string& path);
};

// Findings ordered by position in the canonical serialization, then rule number.
std::vector<Finding> validate(const Article& article, const ValidatorConfig& config = {});

// Rule description and rationale. Throws Error for unknown ids.
std::string explain(std::string_view rule_id);

}  // namespace tj
