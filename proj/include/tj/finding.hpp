#pragma once

#include <string>
#include <string_view>

namespace tj {

enum class Severity { error, warning };

std::string_view to_string(Severity s);
Severity severity_from_string(std::string_view s);  // throws Error on anything else

// A reported problem. `location` is a slash-joined element path with 1-based
// sibling indexes, e.g. "TEI[1]/teiHeader[1]/fileDesc[1]".
struct Finding {
    std::string rule_id;
    Severity severity = Severity::error;
    std::string location;
    std::string message;

    bool operator==(const Finding&) const = default;
};

}  // namespace tj
