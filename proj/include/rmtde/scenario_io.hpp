#pragma once

#include "rmtde/channel_models.hpp"

#include <string>

namespace rmtde {

// JSON document layout:
//   { "N": 8,
//     "users": [ { "n": 8, "R": [[re,im],...], "T": [...], "Hbar": [...],
//                  "fading": {"family": "gaussian"|"nakagami"|"lognormal",
//                             "m"?: 0.6, "sigma"?: 0.83} } ],
//     "S": [...] }
// Complex matrices are flat row-major arrays of [re, im] pairs; "Hbar" and
// "S" may be omitted (or null) for all-zero. Loading always revalidates and
// renormalizes through build_scenario.
std::string scenario_to_json_string(const ScenarioSpec& spec, int indent = 2);
ScenarioSpec scenario_from_json_string(const std::string& text);

void save_scenario(const ScenarioSpec& spec, const std::string& path);
ScenarioSpec load_scenario(const std::string& path);

}  // namespace rmtde
