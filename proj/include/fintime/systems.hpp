#pragma once

#include <string>
#include <vector>

#include "fintime/process.hpp"

namespace fintime {

// Built-in catalog: "diag", "rotation", "saddle_quadratic", "cubic_contraction".
SystemSpec make_system(const std::string& name);
std::vector<std::string> system_catalog();

}  // namespace fintime
