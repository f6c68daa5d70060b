#pragma once

#include <iosfwd>
#include <string>

#include "tanksched/core/instance.hpp"

namespace tanksched {

// Structured-document load/store for Instance. The schema is documented in
// docs/instance_format.md and versioned with "schema_version". Volumes are in
// kiloliters, times in hours, costs in abstract currency units. Every
// cross-reference is resolved eagerly; unknown identifiers raise
// InstanceFormatError with the offending path.
struct InstanceFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& text, const std::string& origin = "<string>");
std::string instance_to_json(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace tanksched
