#pragma once

// Runtime self-checks of the engine, grouped by model. Each check reports the
// measured worst-case value against its pinned tolerance.

#include "qcons/models.hpp"

#include <string>
#include <vector>

namespace qcons {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

std::vector<CheckResult> verify_model(ModelId model);
std::vector<CheckResult> verify_all();

}  // namespace qcons
