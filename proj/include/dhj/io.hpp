#pragma once

// JSON forms of sets, distributions and subspaces.

#include <string>

#include "json.hpp"

#include "dhj/cube.hpp"
#include "dhj/measures.hpp"

namespace dhj {

using Json = nlohmann::json;

/// {"k","n","points":[...]} with 1-based digit strings.
Json set_to_json(const CubeSet& a);
/// {"k","n","bitset_hex":...}: byte 0 first, least significant bit is index 0.
Json set_to_json_bitset(const CubeSet& a);
/// Accepts either form.
CubeSet set_from_json(const Json& j);

std::string bitset_hex(const CubeSet& a);

/// {"k","n","probs":{point:"p/q"}}, zero entries omitted.
Json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const Json& j);

Json subspace_to_json(const Subspace& v);
Json line_to_json(const LinePattern& l);

Json read_json_file(const std::string& path);

}  // namespace dhj
