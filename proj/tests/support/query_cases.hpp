#pragma once

// Random corpus queries paired with the same question for the oracle.

#include <cstdint>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "tj/corpus.hpp"

namespace tj::testing {

struct QueryCase {
    corpus::Query query;
    OracleQuery oracle;
    std::string label;
};

// Needles and surnames are drawn from the synthetic generator's vocabulary,
// plus a few that never occur.
std::vector<QueryCase> random_queries(std::size_t n, std::uint32_t seed);

}  // namespace tj::testing
