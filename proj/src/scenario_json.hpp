#pragma once

#include "rmtde/channel_models.hpp"

#include <json.hpp>

namespace rmtde::detail {

using nlohmann::json;

inline json matrix_to_json(const Matrix& M) {
  json arr = json::array();
  for (Index r = 0; r < M.rows(); ++r)
    for (Index c = 0; c < M.cols(); ++c) arr.push_back({M(r, c).real(), M(r, c).imag()});
  return arr;
}

inline Matrix matrix_from_json(const json& arr, Index rows, Index cols, const std::string& name) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != rows * cols)
    throw ConfigError(name + ": expected a flat row-major array of " + std::to_string(rows * cols) +
                      " [re, im] pairs");
  Matrix M(rows, cols);
  Index i = 0;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c, ++i) {
      const json& cell = arr[i];
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number() || !cell[1].is_number())
        throw ConfigError(name + ": entry " + std::to_string(i) + " is not a [re, im] pair");
      M(r, c) = cxd(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return M;
}

inline json fading_to_json(const FadingSpec& f) {
  json j{{"family", f.family_name()}};
  if (f.family == FadingFamily::NakagamiPhase) j["m"] = f.m;
  if (f.family == FadingFamily::LogNormalPhase) j["sigma"] = f.sigma;
  return j;
}

inline FadingSpec fading_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw ConfigError("fading: expected an object with a \"family\" string");
  const std::string family = j["family"].get<std::string>();
  if (family == "gaussian") return FadingSpec::gaussian();
  if (family == "nakagami") {
    if (!j.contains("m") || !j["m"].is_number())
      throw ConfigError("fading: nakagami requires a numeric \"m\"");
    return FadingSpec::nakagami(j["m"].get<double>());
  }
  if (family == "lognormal") {
    const bool has_sigma = j.contains("sigma") && j["sigma"].is_number();
    const bool has_cv = j.contains("cv") && j["cv"].is_number();
    if (has_sigma == has_cv)
      throw ConfigError("fading: lognormal requires exactly one of numeric \"sigma\" or \"cv\"");
    if (has_cv) return FadingSpec::lognormal_with_cv(j["cv"].get<double>());
    return FadingSpec::lognormal(j["sigma"].get<double>());
  }
  throw ConfigError("fading: unknown family \"" + family + "\"");
}

inline json scenario_to_json(const ScenarioSpec& spec) {
  json users = json::array();
  for (const auto& u : spec.users) {
    json ju{{"n", u.n}, {"R", matrix_to_json(u.R)}, {"T", matrix_to_json(u.T)},
            {"fading", fading_to_json(u.fading)}};
    if (!u.Hbar.isZero(0.0)) ju["Hbar"] = matrix_to_json(u.Hbar);
    users.push_back(std::move(ju));
  }
  json j{{"N", spec.N}, {"users", std::move(users)}};
  if (spec.has_interference()) j["S"] = matrix_to_json(spec.S);
  return j;
}

inline ScenarioSpec scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  if (!j.contains("N") || !j["N"].is_number_integer())
    throw ConfigError("scenario: missing integer \"N\"");
  if (!j.contains("users") || !j["users"].is_array() || j["users"].empty())
    throw ConfigError("scenario: missing nonempty \"users\" array");

  const Index N = j["N"].get<Index>();
  if (N <= 0) throw ConfigError("scenario: N must be positive");

  std::vector<UserSpec> users;
  Index k = 0;
  for (const json& ju : j["users"]) {
    if (!ju.is_object() || !ju.contains("n") || !ju["n"].is_number_integer())
      throw ConfigError("scenario: user " + std::to_string(k) + " missing integer \"n\"");
    UserSpec u;
    u.n = ju["n"].get<Index>();
    if (u.n <= 0) throw ConfigError("scenario: user " + std::to_string(k) + " has non-positive n");
    if (ju.contains("R") && !ju["R"].is_null())
      u.R = matrix_from_json(ju["R"], N, N, "scenario: user " + std::to_string(k) + " R");
    if (ju.contains("T") && !ju["T"].is_null())
      u.T = matrix_from_json(ju["T"], u.n, u.n, "scenario: user " + std::to_string(k) + " T");
    if (ju.contains("Hbar") && !ju["Hbar"].is_null())
      u.Hbar = matrix_from_json(ju["Hbar"], N, u.n, "scenario: user " + std::to_string(k) + " Hbar");
    if (ju.contains("fading") && !ju["fading"].is_null()) u.fading = fading_from_json(ju["fading"]);
    users.push_back(std::move(u));
    ++k;
  }

  Matrix S;
  if (j.contains("S") && !j["S"].is_null()) S = matrix_from_json(j["S"], N, N, "scenario: S");

  try {
    return build_scenario(N, std::move(users), std::move(S));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("scenario: ") + ex.what());
  }
}

}  // namespace rmtde::detail
