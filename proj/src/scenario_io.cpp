#include "rmtde/scenario_io.hpp"

#include "scenario_json.hpp"

#include <fstream>

namespace rmtde {

std::string scenario_to_json_string(const ScenarioSpec& spec, int indent) {
  return detail::scenario_to_json(spec).dump(indent);
}

ScenarioSpec scenario_from_json_string(const std::string& text) {
  detail::json j;
  try {
    j = detail::json::parse(text);
  } catch (const detail::json::parse_error& ex) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + ex.what());
  }
  return detail::scenario_from_json(j);
}

void save_scenario(const ScenarioSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("save_scenario: cannot open " + path + " for writing");
  out << scenario_to_json_string(spec) << "\n";
  if (!out) throw ConfigError("save_scenario: write to " + path + " failed");
}

ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_scenario: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return scenario_from_json_string(text);
}

}  // namespace rmtde
