#pragma once

#include <string>
#include <vector>

#include "tj/model.hpp"

namespace tj::testing {

// Article record: Dean, EJHG, ISSN 1018-4813, imprint date 2009-02-03.
BiblStruct dean_record();
// Book record from the cit example: Brecht, Edition Suhrkamp, 1981, ISBN.
BiblStruct brecht_record();
// Book section built on the imprint example (Oxford, Clarendon Press,
// 1969-02-07, vol 3, issue 2); author and titles are made up.
BiblStruct section_record();

struct Golden {
    std::string style;
    std::string record;  // dean, brecht, section
    std::string markdown;
};

// Expected format_entry(...).markdown() for every style and record.
const std::vector<Golden>& golden_entries();
BiblStruct golden_record(const std::string& name);

}  // namespace tj::testing
