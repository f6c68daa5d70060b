#pragma once

#include <string>
#include <vector>

#include "tanksched/core/instance.hpp"

namespace tanksched {

struct Violation {
    std::string path;     // dotted path to the offending field, with ids
    std::string message;  // what is wrong
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> warnings;
    bool ok() const { return violations.empty(); }
};

// Pure check of every instance invariant; returns all violations (never just
// the first) with the path of the offending field. Warnings do not make the
// instance invalid.
ValidationReport validate_instance(const Instance& inst);

}  // namespace tanksched
