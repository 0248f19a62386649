#include "tj/finding.hpp"

#include "tj/model.hpp"

namespace tj {

std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

Severity severity_from_string(std::string_view s) {
    if (s == "error") return Severity::error;
    if (s == "warning") return Severity::warning;
    throw Error("unknown severity '" + std::string(s) + "'");
}

}  // namespace tj
