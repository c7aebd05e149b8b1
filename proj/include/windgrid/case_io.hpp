#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "windgrid/network.hpp"

namespace windgrid {

// Loads a network case, dispatching on extension: `.m` (MATPOWER-style text,
// read-only) or `.json` (the canonical schema, see docs/case-schema.md).
// Unsupported matrix blocks in `.m` files are skipped and reported through
// `warnings` when provided. The returned case is validated.
NetworkCase import_case(const std::string& path, std::vector<std::string>* warnings = nullptr);

NetworkCase parse_matpower_case(std::istream& in, const std::string& source_name,
                                std::vector<std::string>* warnings = nullptr);

NetworkCase parse_case_json(const std::string& text, const std::string& source_name);
std::string case_to_json(const NetworkCase& net);  // canonical schema, round-trip exact
void save_case_json(const NetworkCase& net, const std::string& path);

}  // namespace windgrid
